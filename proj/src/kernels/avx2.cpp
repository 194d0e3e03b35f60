// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma
// and must only be entered after cpu_supports(Isa::avx2) returned true.

#include <immintrin.h>

#include <cassert>

#include "cqed/kernels.hpp"

namespace cqed::simd {

namespace {

// Two complex doubles per register: [re0, im0, re1, im1].
inline __m256d load(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// (a + bi)(c + di) for two packed pairs.
inline __m256d cmul(__m256d x, __m256d y) {
  const __m256d y_re = _mm256_movedup_pd(y);
  const __m256d y_im = _mm256_permute_pd(y, 0xF);
  const __m256d x_swap = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, y_re, _mm256_mul_pd(x_swap, y_im));
}

inline __m256d broadcast(cplx z) { return _mm256_setr_pd(z.real(), z.imag(), z.real(), z.imag()); }

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void scale(std::span<cplx> x, cplx factor) {
  const __m256d f = broadcast(factor);
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) store(&x[i], cmul(load(&x[i]), f));
  for (; i < x.size(); ++i) x[i] = mul(x[i], factor);
}

void multiply_periodic(std::span<cplx> x, std::span<const cplx> pattern) {
  const std::size_t period = pattern.size();
  assert(period > 0 && x.size() % period == 0);
  for (std::size_t base = 0; base < x.size(); base += period) {
    cplx* row = x.data() + base;
    std::size_t i = 0;
    for (; i + 2 <= period; i += 2) store(row + i, cmul(load(row + i), load(&pattern[i])));
    for (; i < period; ++i) row[i] = mul(row[i], pattern[i]);
  }
}

void axpy(std::span<cplx> y, cplx a, std::span<const cplx> x) {
  assert(y.size() == x.size());
  const __m256d av = broadcast(a);
  std::size_t i = 0;
  for (; i + 2 <= y.size(); i += 2) {
    store(&y[i], _mm256_add_pd(load(&y[i]), cmul(av, load(&x[i]))));
  }
  for (; i < y.size(); ++i) y[i] += mul(a, x[i]);
}

void rotate_pair(std::span<cplx> g, std::span<cplx> e, double c, double s) {
  assert(g.size() == e.size());
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 2 <= g.size(); i += 2) {
    const __m256d gi = load(&g[i]);
    const __m256d ei = load(&e[i]);
    store(&g[i], _mm256_fmadd_pd(cv, gi, _mm256_mul_pd(sv, ei)));
    store(&e[i], _mm256_fmsub_pd(cv, ei, _mm256_mul_pd(sv, gi)));
  }
  for (; i < g.size(); ++i) {
    const cplx gi = g[i];
    const cplx ei = e[i];
    g[i] = c * gi + s * ei;
    e[i] = c * ei - s * gi;
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  // straight = [ac, bd, ...] sums to Re; crossed = [ad, bc, ...], Im = ad - bc.
  __m256d straight = _mm256_setzero_pd();
  __m256d crossed = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d xv = load(&x[i]);
    const __m256d yv = load(&y[i]);
    straight = _mm256_fmadd_pd(xv, yv, straight);
    crossed = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), crossed);
  }
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(straight);
  double im = hsum(_mm256_mul_pd(crossed, sign));
  for (; i < x.size(); ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm_sq(std::span<const cplx> x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d v = load(&x[i]);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double total = hsum(acc);
  for (; i < x.size(); ++i) total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return total;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::avx2, scale, multiply_periodic, axpy, rotate_pair, dot, norm_sq};
  return &table;
}

}  // namespace cqed::simd
