#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::simd {

#ifndef TVQS_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef TVQS_HAVE_NEON
const KernelTable* neon_kernels() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(TVQS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(TVQS_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("SIMD variant not available on this host: " + std::string(isa_name(isa)));
  }
  switch (isa) {
    case Isa::Avx2: return *avx2_kernels();
    case Isa::Neon: return *neon_kernels();
    case Isa::Scalar: break;
  }
  return scalar_kernels();
}

namespace {

const KernelTable& select_kernels() {
  if (const char* env = std::getenv("TVQS_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return kernels_for(isa);
    }
  }
  if (isa_supported(Isa::Avx2)) return kernels_for(Isa::Avx2);
  if (isa_supported(Isa::Neon)) return kernels_for(Isa::Neon);
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select_kernels();
  return table;
}

void cmul_inplace(std::span<cplx> a, std::span<const cplx> b) {
  active().cmul_inplace(raw(a.data()), raw(b.data()), a.size());
}

void cgemv(std::span<const cplx> mat, std::span<const cplx> x, std::span<cplx> y) {
  active().cgemv(raw(mat.data()), raw(x.data()), raw(y.data()), x.size());
}

double norm_sq(std::span<const cplx> a) { return active().norm_sq(raw(a.data()), a.size()); }

double weighted_norm_sq(std::span<const cplx> a, std::span<const double> w) {
  return active().weighted_norm_sq(raw(a.data()), w.data(), a.size());
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  double out[2];
  active().cdot(raw(a.data()), raw(b.data()), a.size(), out);
  return {out[0], out[1]};
}

void abs_sq(std::span<const cplx> a, std::span<double> out) {
  active().abs_sq(raw(a.data()), out.data(), a.size());
}

}  // namespace tvqs::simd
