#include "cqed/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cqed {

namespace {

bool finite(Amplitude z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool same_sector(const Branch& a, const Branch& b) { return a.atom == b.atom; }
bool same_sector(const FieldTerm&, const FieldTerm&) { return true; }

bool labels_close(std::span<const Amplitude> a, std::span<const Amplitude> b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

// Overlap of two product terms ignoring coefficients.
template <typename Term>
Amplitude term_overlap(const Term& a, const Term& b) {
  if (!same_sector(a, b)) return {0.0, 0.0};
  Amplitude product{1.0, 0.0};
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    product *= coherent_overlap(a.labels[k], b.labels[k]);
  }
  return product;
}

}  // namespace

template <typename Term>
Superposition<Term>::Superposition(std::size_t modes, std::vector<Term> branches)
    : modes_(modes), branches_(std::move(branches)) {
  if (modes_ == 0) throw StateError("state needs at least one mode");
  for (const auto& b : branches_) {
    if (b.labels.size() != modes_) {
      throw StateError("branch has " + std::to_string(b.labels.size()) +
                       " labels, expected " + std::to_string(modes_));
    }
    if (!finite(b.coeff) || !std::all_of(b.labels.begin(), b.labels.end(), finite)) {
      throw StateError("non-finite amplitude in branch");
    }
  }
}

Amplitude coherent_overlap(Amplitude a, Amplitude b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

BranchState init_state(AtomicLevel atom, std::vector<Amplitude> labels) {
  if (labels.empty()) throw StateError("init_state: empty label list");
  const std::size_t modes = labels.size();
  return BranchState(modes, {Branch{atom, std::move(labels), {1.0, 0.0}}});
}

FieldState init_field(std::vector<Amplitude> labels) {
  if (labels.empty()) throw StateError("init_field: empty label list");
  const std::size_t modes = labels.size();
  return FieldState(modes, {FieldTerm{std::move(labels), {1.0, 0.0}}});
}

template <typename Term>
Amplitude inner_product(const Superposition<Term>& x, const Superposition<Term>& y) {
  if (x.modes() != y.modes()) {
    throw StateError("inner_product: mode count mismatch (" + std::to_string(x.modes()) +
                     " vs " + std::to_string(y.modes()) + ")");
  }
  Amplitude sum{0.0, 0.0};
  for (const auto& a : x.branches()) {
    for (const auto& b : y.branches()) {
      sum += std::conj(a.coeff) * b.coeff * term_overlap(a, b);
    }
  }
  return sum;
}

template <typename Term>
double norm(const Superposition<Term>& x) {
  return std::sqrt(std::max(0.0, inner_product(x, x).real()));
}

template <typename Term>
Superposition<Term> scaled(const Superposition<Term>& x, Amplitude factor) {
  std::vector<Term> out(x.branches().begin(), x.branches().end());
  for (auto& b : out) b.coeff *= factor;
  return Superposition<Term>(x.modes(), std::move(out));
}

template <typename Term>
Superposition<Term> normalize(const Superposition<Term>& x) {
  const double n = norm(x);
  if (!(n > 0.0)) throw StateError("normalize: zero-norm state");
  return scaled(x, Amplitude{1.0 / n, 0.0});
}

template <typename Term>
Superposition<Term> concatenate(const Superposition<Term>& x, const Superposition<Term>& y) {
  if (x.modes() != y.modes()) throw StateError("concatenate: mode count mismatch");
  std::vector<Term> out(x.branches().begin(), x.branches().end());
  out.insert(out.end(), y.branches().begin(), y.branches().end());
  return Superposition<Term>(x.modes(), std::move(out));
}

template <typename Term>
Superposition<Term> merge_branches(const Superposition<Term>& x, double tol) {
  if (tol < 0.0) throw StateError("merge_branches: negative tolerance");
  std::vector<Term> merged;
  merged.reserve(x.size());
  for (const auto& b : x.branches()) {
    auto hit = std::find_if(merged.begin(), merged.end(), [&](const Term& m) {
      return same_sector(m, b) && labels_close(m.labels, b.labels, tol);
    });
    if (hit != merged.end()) {
      hit->coeff += b.coeff;
    } else {
      merged.push_back(b);
    }
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.coeff) < kCoefficientDrop; });
  return Superposition<Term>(x.modes(), std::move(merged));
}

template <typename Term>
double fidelity(const Superposition<Term>& x, const Superposition<Term>& y) {
  constexpr double kNormSlack = 1e-6;
  if (x.modes() != y.modes()) throw StateError("fidelity: mode count mismatch");
  if (std::abs(norm(x) - 1.0) > kNormSlack || std::abs(norm(y) - 1.0) > kNormSlack) {
    throw StateError("fidelity: arguments must be normalized");
  }
  return std::clamp(std::norm(inner_product(x, y)), 0.0, 1.0);
}

FieldState field_part(const BranchState& x, AtomicLevel level) {
  std::vector<FieldTerm> terms;
  for (const auto& b : x.branches()) {
    if (b.atom == level) terms.push_back(FieldTerm{b.labels, b.coeff});
  }
  return FieldState(x.modes(), std::move(terms));
}

BranchState with_atom(const FieldState& field, AtomicLevel level) {
  std::vector<Branch> out;
  out.reserve(field.size());
  for (const auto& t : field.branches()) out.push_back(Branch{level, t.labels, t.coeff});
  return BranchState(field.modes(), std::move(out));
}

#define CQED_INSTANTIATE(Term)                                                                 \
  template class Superposition<Term>;                                                          \
  template Amplitude inner_product(const Superposition<Term>&, const Superposition<Term>&);    \
  template double norm(const Superposition<Term>&);                                            \
  template Superposition<Term> normalize(const Superposition<Term>&);                          \
  template Superposition<Term> scaled(const Superposition<Term>&, Amplitude);                  \
  template Superposition<Term> concatenate(const Superposition<Term>&,                         \
                                           const Superposition<Term>&);                        \
  template Superposition<Term> merge_branches(const Superposition<Term>&, double);             \
  template double fidelity(const Superposition<Term>&, const Superposition<Term>&);

CQED_INSTANTIATE(Branch)
CQED_INSTANTIATE(FieldTerm)

#undef CQED_INSTANTIATE

}  // namespace cqed
