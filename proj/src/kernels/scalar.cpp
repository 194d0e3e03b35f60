#include "cqed/kernels.hpp"

#include <cassert>

namespace cqed::simd {

namespace {

// Explicit real arithmetic: std::complex operator* carries NaN recovery
// branches that are irrelevant here and slow down the loops.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void scale(std::span<cplx> x, cplx factor) {
  for (auto& v : x) v = mul(v, factor);
}

void multiply_periodic(std::span<cplx> x, std::span<const cplx> pattern) {
  const std::size_t period = pattern.size();
  assert(period > 0 && x.size() % period == 0);
  for (std::size_t base = 0; base < x.size(); base += period) {
    for (std::size_t i = 0; i < period; ++i) x[base + i] = mul(x[base + i], pattern[i]);
  }
}

void axpy(std::span<cplx> y, cplx a, std::span<const cplx> x) {
  assert(y.size() == x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += mul(a, x[i]);
}

void rotate_pair(std::span<cplx> g, std::span<cplx> e, double c, double s) {
  assert(g.size() == e.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx gi = g[i];
    const cplx ei = e[i];
    g[i] = c * gi + s * ei;
    e[i] = c * ei - s * gi;
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm_sq(std::span<const cplx> x) {
  double acc = 0.0;
  for (const auto& v : x) acc += v.real() * v.real() + v.imag() * v.imag();
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, scale, multiply_periodic, axpy, rotate_pair, dot, norm_sq};
  return table;
}

}  // namespace cqed::simd
