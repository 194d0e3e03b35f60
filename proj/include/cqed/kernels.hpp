#pragma once
// Dense complex-array kernels behind the Fock-basis oracle.
//
// Every kernel has a portable scalar reference implementation. Vectorized
// variants are compiled into separate translation units and chosen at
// runtime from the CPU feature set; tests hold each variant to the scalar
// reference.

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace cqed::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // x[i] *= factor
  void (*scale)(std::span<cplx> x, cplx factor);
  // x[i] *= pattern[i % pattern.size()]; x.size() must be a multiple of pattern.size()
  void (*multiply_periodic)(std::span<cplx> x, std::span<const cplx> pattern);
  // y[i] += a * x[i]
  void (*axpy)(std::span<cplx> y, cplx a, std::span<const cplx> x);
  // (g, e) <- (c g + s e, c e - s g), elementwise
  void (*rotate_pair)(std::span<cplx> g, std::span<cplx> e, double c, double s);
  // sum_i conj(x[i]) y[i]
  cplx (*dot)(std::span<const cplx> x, std::span<const cplx> y);
  // sum_i |x[i]|^2
  double (*norm_sq)(std::span<const cplx> x);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

/// Every variant that is both compiled in and supported by this CPU,
/// scalar first.
std::vector<const KernelTable*> available_kernels();

/// Best available table. The environment variable CQED_ISA=scalar forces
/// the reference path.
const KernelTable& active_kernels();

}  // namespace cqed::simd
