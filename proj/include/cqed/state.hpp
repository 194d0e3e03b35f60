#pragma once
// Symbolic coherent-branch representation of atom (x) M bosonic modes.
//
// A state is a finite superposition of product terms
//     coeff * |level> (x) |label_0> (x) ... (x) |label_{M-1}>
// where every |label_k> is a coherent state. Inner products are exact:
// coherent states are not orthogonal, so the Gram sum carries the Gaussian
// overlap of every label pair.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cqed {

using Amplitude = std::complex<double>;

enum class AtomicLevel { g, e };

constexpr std::string_view to_string(AtomicLevel level) {
  return level == AtomicLevel::g ? "g" : "e";
}

constexpr AtomicLevel other(AtomicLevel level) {
  return level == AtomicLevel::g ? AtomicLevel::e : AtomicLevel::g;
}

/// Thrown when a state-level precondition is violated (mode mismatch,
/// zero norm, projection onto an empty sector, ...).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Label equality tolerance used when merging branches.
inline constexpr double kLabelTolerance = 1e-9;
/// Branches whose |coeff| falls below this are dropped on merge.
inline constexpr double kCoefficientDrop = 1e-14;

/// One term of a joint atom-field state.
struct Branch {
  AtomicLevel atom = AtomicLevel::g;
  std::vector<Amplitude> labels;
  Amplitude coeff{1.0, 0.0};
};

/// One term of a field-only state (the atom has been measured away).
struct FieldTerm {
  std::vector<Amplitude> labels;
  Amplitude coeff{1.0, 0.0};
};

/// Finite superposition of coherent product terms over a fixed mode count.
/// Immutable once built; every operation returns a new value.
template <typename Term>
class Superposition {
 public:
  Superposition(std::size_t modes, std::vector<Term> branches);

  std::size_t modes() const noexcept { return modes_; }
  std::span<const Term> branches() const noexcept { return branches_; }
  std::size_t size() const noexcept { return branches_.size(); }

 private:
  std::size_t modes_;
  std::vector<Term> branches_;
};

using BranchState = Superposition<Branch>;
using FieldState = Superposition<FieldTerm>;

/// <a|b> for coherent states: exp(-|a|^2/2 - |b|^2/2 + conj(a) b).
Amplitude coherent_overlap(Amplitude a, Amplitude b);

/// Single-branch product state with coefficient 1.
BranchState init_state(AtomicLevel atom, std::vector<Amplitude> labels);
FieldState init_field(std::vector<Amplitude> labels);

template <typename Term>
Amplitude inner_product(const Superposition<Term>& x, const Superposition<Term>& y);

template <typename Term>
double norm(const Superposition<Term>& x);

template <typename Term>
Superposition<Term> normalize(const Superposition<Term>& x);

/// Multiplies every coefficient by `factor`.
template <typename Term>
Superposition<Term> scaled(const Superposition<Term>& x, Amplitude factor);

/// Branch-list concatenation, i.e. the vector sum x + y (no merge).
template <typename Term>
Superposition<Term> concatenate(const Superposition<Term>& x, const Superposition<Term>& y);

/// Combines branches that share atomic level and labels (max abs complex
/// difference <= tol), then drops branches with |coeff| < kCoefficientDrop.
template <typename Term>
Superposition<Term> merge_branches(const Superposition<Term>& x, double tol = kLabelTolerance);

/// |<x|y>|^2; both arguments must be normalized.
template <typename Term>
double fidelity(const Superposition<Term>& x, const Superposition<Term>& y);

/// Restriction of `x` to `level` with the atomic factor dropped (not renormalized).
FieldState field_part(const BranchState& x, AtomicLevel level);

/// |level> (x) field.
BranchState with_atom(const FieldState& field, AtomicLevel level);

}  // namespace cqed
