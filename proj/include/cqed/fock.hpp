#pragma once
// Independent engine in a truncated photon-number basis.
//
// Amplitudes are stored densely with the atomic level as the slowest index
// (g sector first, then e), followed by the modes in declaration order,
// row-major. The dispersive evolution is diagonal in this basis and the
// Ramsey pulse mixes the two sectors index by index, so both act exactly on
// the truncated space.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cqed/kernels.hpp"
#include "cqed/protocol.hpp"
#include "cqed/state.hpp"

namespace cqed {

inline constexpr std::size_t kDefaultNMax = 24;

/// Smallest cutoff satisfying n_max >= |alpha|^2 + 8|alpha| (and >= 1).
std::size_t recommended_n_max(double max_abs_label);

class FockState {
 public:
  FockState(std::size_t modes, std::size_t n_max);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t levels_per_mode() const noexcept { return n_max_ + 1; }
  std::size_t sector_size() const noexcept { return sector_size_; }
  /// Distance in the flat sector index between neighbouring photon numbers of `mode`.
  std::size_t stride(std::size_t mode) const;

  std::span<Amplitude> sector(AtomicLevel level);
  std::span<const Amplitude> sector(AtomicLevel level) const;
  std::span<Amplitude> amplitudes() { return amplitudes_; }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }

  /// Amplitude of |level> (x) |n_0 ... n_{M-1}>.
  Amplitude at(AtomicLevel level, std::span<const std::size_t> photons) const;

 private:
  std::size_t modes_;
  std::size_t n_max_;
  std::size_t sector_size_;
  std::vector<Amplitude> amplitudes_;
};

struct FockExpansion {
  FockState state;
  double residual;  // norm(x)^2 - sum |amp|^2, the weight lost to truncation
};

/// c_n = exp(-|a|^2/2) a^n / sqrt(n!) for n = 0..n_max.
std::vector<Amplitude> coherent_coefficients(Amplitude label, std::size_t n_max);

FockExpansion to_fock(const BranchState& x, std::size_t n_max,
                      const simd::KernelTable& kernels = simd::active_kernels());

FockState fock_apply_dispersive(const FockState& x, std::size_t mode, double phi,
                                const simd::KernelTable& kernels = simd::active_kernels());
FockState fock_apply_ramsey(const FockState& x, double theta,
                            const simd::KernelTable& kernels = simd::active_kernels());

Amplitude fock_inner_product(const FockState& x, const FockState& y,
                             const simd::KernelTable& kernels = simd::active_kernels());
double fock_norm_sq(const FockState& x, const simd::KernelTable& kernels = simd::active_kernels());

/// Conditional probabilities of each level within the truncated space.
LevelProbabilities fock_detection_probabilities(
    const FockState& x, const simd::KernelTable& kernels = simd::active_kernels());

struct FockProjection {
  FockState state;  // other sector zeroed, renormalized
  double probability;
};

FockProjection fock_project(const FockState& x, AtomicLevel level,
                            const simd::KernelTable& kernels = simd::active_kernels());

FockState fock_apply_step(const FockState& x, const ProtocolStep& step,
                          const simd::KernelTable& kernels = simd::active_kernels());

/// |<x|y>|^2 / (<x|x><y|y>).
double fock_fidelity(const FockState& x, const FockState& y,
                     const simd::KernelTable& kernels = simd::active_kernels());

// ---------------------------------------------------------------------------
// Branch engine vs. oracle harness

inline constexpr double kOracleFidelityTolerance = 1e-7;
inline constexpr double kOracleProbabilityTolerance = 1e-8;
inline constexpr double kReliableResidual = 1e-8;

struct StepAgreement {
  std::string label;
  double fidelity;               // normalized overlap of the two engines' states
  double residual;               // truncation residual of the branch image
  double probability_deviation;  // max level-probability difference
};

struct CrossCheckReport {
  std::size_t n_max = 0;
  std::vector<StepAgreement> steps;
  double min_fidelity = 1.0;
  double max_residual = 0.0;
  double max_probability_deviation = 0.0;

  /// False when truncation dominates; agreement figures are then not meaningful.
  bool reliable() const { return max_residual < kReliableResidual; }
  bool agrees() const {
    return min_fidelity >= 1.0 - kOracleFidelityTolerance &&
           max_probability_deviation <= kOracleProbabilityTolerance;
  }
};

CrossCheckReport cross_check(const ProtocolSpec& spec, std::size_t n_max = kDefaultNMax,
                             const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace cqed
