#pragma once
// Ramsey rotations, dispersive phase kicks and post-selective detection on
// BranchStates, plus builders for the target cluster states.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cqed/state.hpp"

namespace cqed {

inline constexpr double kPi = 3.14159265358979323846;

struct RamseyStep {
  double theta = 0.0;  // radians; pi/4 is the usual pi/2 pulse
  bool operator==(const RamseyStep&) const = default;
};

struct DispersiveStep {
  std::size_t mode = 0;
  double phi = 0.0;  // radians
  bool operator==(const DispersiveStep&) const = default;
};

struct DetectStep {
  AtomicLevel level = AtomicLevel::e;
  bool operator==(const DetectStep&) const = default;
};

using ProtocolStep = std::variant<RamseyStep, DispersiveStep, DetectStep>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProtocolSpec {
  AtomicLevel atom_init = AtomicLevel::e;
  std::vector<Amplitude> mode_init;
  std::vector<ProtocolStep> steps;
  /// Optional display names for the modes (same length as mode_init, or empty).
  std::vector<std::string> mode_names;

  std::size_t modes() const noexcept { return mode_init.size(); }
  std::optional<AtomicLevel> detect_level() const;
  /// Throws ProtocolError if a mode index is out of range, Detect is not the
  /// final step, or there are no modes.
  void validate() const;

  bool operator==(const ProtocolSpec&) const = default;
};

/// Atom prepared in `atom`, four modes in |i alpha>, then
/// R(pi/4) D(0) D(1) R(pi/4) D(2) D(3) R(pi/4) [Detect].
ProtocolSpec canonical_spec(AtomicLevel atom, double alpha = 2.0,
                            std::optional<AtomicLevel> detect = std::nullopt);

struct TraceEntry {
  std::string label;
  BranchState state;
};

struct Detection {
  AtomicLevel level;
  FieldState field;    // normalized, atomic factor dropped
  double probability;  // probability of observing `level`
};

struct RunResult {
  std::vector<TraceEntry> trace;     // "init" first, then one entry per step
  BranchState final_joint;           // joint state before detection
  std::optional<Detection> detection;

  std::optional<double> detect_probability() const {
    return detection ? std::optional<double>(detection->probability) : std::nullopt;
  }
};

/// |e> -> cos(theta)|e> + sin(theta)|g>,  |g> -> cos(theta)|g> - sin(theta)|e>.
BranchState apply_ramsey(const BranchState& x, double theta);

/// exp(-i phi (n+1)) on |e>, exp(i phi n) on |g>, acting on one mode.
BranchState apply_dispersive(const BranchState& x, std::size_t mode, double phi);

struct LevelProbabilities {
  double g = 0.0;
  double e = 0.0;
  double operator[](AtomicLevel level) const { return level == AtomicLevel::g ? g : e; }
};

LevelProbabilities detection_probabilities(const BranchState& x);

struct Projection {
  FieldState field;
  double probability;
};

Projection project(const BranchState& x, AtomicLevel level);

BranchState apply_step(const BranchState& x, const ProtocolStep& step);
std::string step_label(const ProtocolStep& step, const ProtocolSpec& spec);

RunResult run_protocol(const ProtocolSpec& spec);

enum class ClusterKind { chi1, chi2, chi3, chi4 };

/// chi1 = (e,e), chi2 = (g,g), chi3 = (g,e), chi4 = (e,g) as (prepared, detected).
/// `linear` selects the L-family member obtained by starting mode D in |-i alpha>,
/// which negates every label of the last mode.
enum class ClusterFamily { standard, linear };

FieldState ideal_cluster(ClusterKind kind, Amplitude alpha,
                         ClusterFamily family = ClusterFamily::standard);

std::string_view to_string(ClusterKind kind);
std::string cluster_name(ClusterKind kind, ClusterFamily family);
AtomicLevel prepared_level(ClusterKind kind);
AtomicLevel detected_level(ClusterKind kind);
ClusterKind cluster_kind(AtomicLevel prepared, AtomicLevel detected);

}  // namespace cqed
