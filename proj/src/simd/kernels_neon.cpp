#include <arm_neon.h>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::simd {
namespace {

// One complex double per float64x2_t.
inline float64x2_t cmul1(float64x2_t a, float64x2_t b) {
  const float64x2_t br = vdupq_laneq_f64(b, 0);
  const float64x2_t bi = vdupq_laneq_f64(b, 1);
  const float64x2_t as = vextq_f64(a, a, 1);  // (ai, ar)
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(vmulq_f64(a, br), vmulq_f64(as, bi), sign);
}

void cmul_inplace_neon(double* a, const double* b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    vst1q_f64(a + 2 * j, cmul1(vld1q_f64(a + 2 * j), vld1q_f64(b + 2 * j)));
  }
}

void cgemv_neon(const double* mat, const double* x, double* y, std::size_t m) {
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = mat + 2 * r * m;
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t c = 0;
    for (; c + 2 <= m; c += 2) {
      acc0 = vaddq_f64(acc0, cmul1(vld1q_f64(row + 2 * c), vld1q_f64(x + 2 * c)));
      acc1 = vaddq_f64(acc1, cmul1(vld1q_f64(row + 2 * c + 2), vld1q_f64(x + 2 * c + 2)));
    }
    for (; c < m; ++c) acc0 = vaddq_f64(acc0, cmul1(vld1q_f64(row + 2 * c), vld1q_f64(x + 2 * c)));
    vst1q_f64(y + 2 * r, vaddq_f64(acc0, acc1));
  }
}

double norm_sq_neon(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t v0 = vld1q_f64(a + 2 * j);
    const float64x2_t v1 = vld1q_f64(a + 2 * j + 2);
    acc0 = vfmaq_f64(acc0, v0, v0);
    acc1 = vfmaq_f64(acc1, v1, v1);
  }
  for (; j < n; ++j) {
    const float64x2_t v = vld1q_f64(a + 2 * j);
    acc0 = vfmaq_f64(acc0, v, v);
  }
  return vaddvq_f64(vaddq_f64(acc0, acc1));
}

double weighted_norm_sq_neon(const double* a, const double* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t v = vld1q_f64(a + 2 * j);
    acc = vfmaq_f64(acc, vmulq_f64(v, v), vdupq_n_f64(w[j]));
  }
  return vaddvq_f64(acc);
}

void cdot_neon(const double* a, const double* b, std::size_t n, double* out) {
  float64x2_t acc_re = vdupq_n_f64(0.0), acc_im = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t x = vld1q_f64(a + 2 * j);
    const float64x2_t y = vld1q_f64(b + 2 * j);
    acc_re = vfmaq_f64(acc_re, x, y);                 // (ar*br, ai*bi)
    acc_im = vfmaq_f64(acc_im, x, vextq_f64(y, y, 1));  // (ar*bi, ai*br)
  }
  out[0] = vaddvq_f64(acc_re);
  out[1] = vgetq_lane_f64(acc_im, 0) - vgetq_lane_f64(acc_im, 1);
}

void abs_sq_neon(const double* a, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t v = vld1q_f64(a + 2 * j);
    out[j] = vaddvq_f64(vmulq_f64(v, v));
  }
}

constexpr KernelTable kNeon{
    Isa::Neon,      "neon",                cmul_inplace_neon, cgemv_neon,
    norm_sq_neon,   weighted_norm_sq_neon, cdot_neon,         abs_sq_neon,
};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace tvqs::simd
