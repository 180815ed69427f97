#include "tvqs/simd/kernels.hpp"

namespace tvqs::simd {
namespace {

void cmul_inplace_scalar(double* a, const double* b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double br = b[2 * j], bi = b[2 * j + 1];
    a[2 * j] = ar * br - ai * bi;
    a[2 * j + 1] = ar * bi + ai * br;
  }
}

void cgemv_scalar(const double* mat, const double* x, double* y, std::size_t m) {
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = mat + 2 * r * m;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const double mr = row[2 * c], mi = row[2 * c + 1];
      const double xr = x[2 * c], xi = x[2 * c + 1];
      re += mr * xr - mi * xi;
      im += mr * xi + mi * xr;
    }
    y[2 * r] = re;
    y[2 * r + 1] = im;
  }
}

double norm_sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < 2 * n; ++j) s += a[j] * a[j];
  return s;
}

double weighted_norm_sq_scalar(const double* a, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += w[j] * (a[2 * j] * a[2 * j] + a[2 * j + 1] * a[2 * j + 1]);
  }
  return s;
}

void cdot_scalar(const double* a, const double* b, std::size_t n, double* out) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double br = b[2 * j], bi = b[2 * j + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  out[0] = re;
  out[1] = im;
}

void abs_sq_scalar(const double* a, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = a[2 * j] * a[2 * j] + a[2 * j + 1] * a[2 * j + 1];
  }
}

constexpr KernelTable kScalar{
    Isa::Scalar,       "scalar",           cmul_inplace_scalar, cgemv_scalar,
    norm_sq_scalar,    weighted_norm_sq_scalar, cdot_scalar,    abs_sq_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace tvqs::simd
