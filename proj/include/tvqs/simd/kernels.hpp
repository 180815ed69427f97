#pragma once

// Data-parallel inner loops of the statevector simulator.
//
// Every kernel has a scalar reference implementation and optional AVX2 (x86-64)
// and NEON (aarch64) variants. The variant is chosen once per process from the
// CPU feature set; TVQS_ISA=scalar|avx2|neon overrides the choice. Complex
// buffers are passed as interleaved (re, im) doubles, which is the layout
// std::complex<double> guarantees.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tvqs::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  const char* name;
  // a[j] *= b[j] for n complex entries.
  void (*cmul_inplace)(double* a, const double* b, std::size_t n);
  // y = M x with M an m-by-m complex matrix in row-major order.
  void (*cgemv)(const double* mat, const double* x, double* y, std::size_t m);
  // sum_j |a_j|^2
  double (*norm_sq)(const double* a, std::size_t n);
  // sum_j w_j |a_j|^2 with real weights w.
  double (*weighted_norm_sq)(const double* a, const double* w, std::size_t n);
  // out = sum_j conj(a_j) b_j, written as (re, im).
  void (*cdot)(const double* a, const double* b, std::size_t n, double* out);
  // out_j = |a_j|^2
  void (*abs_sq)(const double* a, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled for this target.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
std::vector<Isa> available_isas();

// Throws std::invalid_argument for an ISA that is absent or unsupported by the CPU.
const KernelTable& kernels_for(Isa isa);

// The process-wide selection.
const KernelTable& active();

using cplx = std::complex<double>;

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

void cmul_inplace(std::span<cplx> a, std::span<const cplx> b);
void cgemv(std::span<const cplx> mat, std::span<const cplx> x, std::span<cplx> y);
double norm_sq(std::span<const cplx> a);
double weighted_norm_sq(std::span<const cplx> a, std::span<const double> w);
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);
void abs_sq(std::span<const cplx> a, std::span<double> out);

}  // namespace tvqs::simd
