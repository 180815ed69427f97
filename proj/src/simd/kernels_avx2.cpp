// Compiled with -mavx2 -mfma. Nothing in this file may be reached unless the
// dispatcher has confirmed both features at runtime, and it must not odr-use
// inline library templates that other translation units could share.

#include <immintrin.h>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::simd {
namespace {

// (ar, ai) * (br, bi) for two packed complex values.
inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d br = _mm256_movedup_pd(b);
  const __m256d bi = _mm256_permute_pd(b, 0xF);
  const __m256d as = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cmul_inplace_avx2(double* a, const double* b, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d x = _mm256_loadu_pd(a + 2 * j);
    const __m256d y = _mm256_loadu_pd(b + 2 * j);
    _mm256_storeu_pd(a + 2 * j, cmul2(x, y));
  }
  for (; j < n; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double br = b[2 * j], bi = b[2 * j + 1];
    a[2 * j] = ar * br - ai * bi;
    a[2 * j + 1] = ar * bi + ai * br;
  }
}

void cgemv_avx2(const double* mat, const double* x, double* y, std::size_t m) {
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = mat + 2 * r * m;
    // acc_re lanes hold (mr*xr, mi*xr); acc_im lanes hold (mi*xi, mr*xi).
    __m256d acc_re0 = _mm256_setzero_pd(), acc_im0 = _mm256_setzero_pd();
    __m256d acc_re1 = _mm256_setzero_pd(), acc_im1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= m; c += 4) {
      const __m256d m0 = _mm256_loadu_pd(row + 2 * c);
      const __m256d m1 = _mm256_loadu_pd(row + 2 * c + 4);
      const __m256d x0 = _mm256_loadu_pd(x + 2 * c);
      const __m256d x1 = _mm256_loadu_pd(x + 2 * c + 4);
      acc_re0 = _mm256_fmadd_pd(m0, _mm256_movedup_pd(x0), acc_re0);
      acc_im0 = _mm256_fmadd_pd(_mm256_permute_pd(m0, 0x5), _mm256_permute_pd(x0, 0xF), acc_im0);
      acc_re1 = _mm256_fmadd_pd(m1, _mm256_movedup_pd(x1), acc_re1);
      acc_im1 = _mm256_fmadd_pd(_mm256_permute_pd(m1, 0x5), _mm256_permute_pd(x1, 0xF), acc_im1);
    }
    for (; c + 2 <= m; c += 2) {
      const __m256d m0 = _mm256_loadu_pd(row + 2 * c);
      const __m256d x0 = _mm256_loadu_pd(x + 2 * c);
      acc_re0 = _mm256_fmadd_pd(m0, _mm256_movedup_pd(x0), acc_re0);
      acc_im0 = _mm256_fmadd_pd(_mm256_permute_pd(m0, 0x5), _mm256_permute_pd(x0, 0xF), acc_im0);
    }
    const __m256d acc = _mm256_addsub_pd(_mm256_add_pd(acc_re0, acc_re1), _mm256_add_pd(acc_im0, acc_im1));
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double out[2];
    _mm_storeu_pd(out, s);
    for (; c < m; ++c) {
      const double mr = row[2 * c], mi = row[2 * c + 1];
      const double xr = x[2 * c], xi = x[2 * c + 1];
      out[0] += mr * xr - mi * xi;
      out[1] += mr * xi + mi * xr;
    }
    y[2 * r] = out[0];
    y[2 * r + 1] = out[1];
  }
}

double norm_sq_avx2(const double* a, std::size_t n) {
  const std::size_t len = 2 * n;
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= len; j += 8) {
    const __m256d v0 = _mm256_loadu_pd(a + j);
    const __m256d v1 = _mm256_loadu_pd(a + j + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < len; ++j) s += a[j] * a[j];
  return s;
}

double weighted_norm_sq_avx2(const double* a, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d v = _mm256_loadu_pd(a + 2 * j);
    const __m256d wd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + j)), 0x50);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), wd, acc);
  }
  double s = hsum(acc);
  for (; j < n; ++j) s += w[j] * (a[2 * j] * a[2 * j] + a[2 * j + 1] * a[2 * j + 1]);
  return s;
}

void cdot_avx2(const double* a, const double* b, std::size_t n, double* out) {
  // acc_re lanes: (ar*br, ai*bi); acc_im lanes: (ar*bi, ai*br).
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d x = _mm256_loadu_pd(a + 2 * j);
    const __m256d y = _mm256_loadu_pd(b + 2 * j);
    acc_re = _mm256_fmadd_pd(x, y, acc_re);
    acc_im = _mm256_fmadd_pd(x, _mm256_permute_pd(y, 0x5), acc_im);
  }
  double re = hsum(acc_re);
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; j < n; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double br = b[2 * j], bi = b[2 * j + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  out[0] = re;
  out[1] = im;
}

void abs_sq_avx2(const double* a, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v0 = _mm256_loadu_pd(a + 2 * j);
    const __m256d v1 = _mm256_loadu_pd(a + 2 * j + 4);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    _mm256_storeu_pd(out + j, _mm256_permute4x64_pd(h, 0xD8));
  }
  for (; j < n; ++j) out[j] = a[2 * j] * a[2 * j] + a[2 * j + 1] * a[2 * j + 1];
}

constexpr KernelTable kAvx2{
    Isa::Avx2,      "avx2",                cmul_inplace_avx2, cgemv_avx2,
    norm_sq_avx2,   weighted_norm_sq_avx2, cdot_avx2,         abs_sq_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace tvqs::simd
