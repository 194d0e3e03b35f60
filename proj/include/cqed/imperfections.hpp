#pragma once
// Atomic velocity spread and detector efficiency.
//
// One atom crosses every Ramsey zone and cavity with the same velocity v.
// All interaction times scale as 1/v, so every pulse area and every
// dispersive phase in a protocol is rescaled by v0/v together.

#include <cstddef>
#include <span>
#include <vector>

#include "cqed/protocol.hpp"

namespace cqed {

enum class VelocityDistribution { uniform, gaussian };

/// Which step kinds pick up the 1/v scaling.
enum class PerturbedSteps { all, ramsey_only, dispersive_only };

struct VelocityModel {
  double v0 = 27.0;  // m/s
  double dv = 2.0;   // m/s; half-width (uniform) or standard deviation (gaussian)
  VelocityDistribution distribution = VelocityDistribution::uniform;
  std::size_t samples = 201;
  PerturbedSteps perturbed = PerturbedSteps::all;

  void validate() const;
};

struct DetectorModel {
  double eta = 1.0;

  void validate() const;
};

struct PulseParams {
  double theta;
  double phi;
};

PulseParams pulse_params_of_velocity(double v, double v0, double theta0, double phi0);

/// Every Ramsey angle and dispersive phase (or only the selected kind)
/// multiplied by v0 / v.
ProtocolSpec rescale_for_velocity(const ProtocolSpec& spec, double v, double v0,
                                  PerturbedSteps perturbed = PerturbedSteps::all);

/// Fidelity of the state heralded by `detect` at velocity v against the
/// state heralded at the nominal velocity v0. Any Detect step in `spec` is
/// replaced by `detect`.
double fidelity_at_velocity(const ProtocolSpec& spec, double v, double v0, AtomicLevel detect,
                            PerturbedSteps perturbed = PerturbedSteps::all);

struct VelocitySample {
  double v;
  double weight;     // quadrature weight, sums to 1 over the grid
  double theta;      // first Ramsey angle after rescaling (0 if none)
  double phi;        // first dispersive phase after rescaling (0 if none)
  double p_g;        // level probabilities before detection
  double p_e;
  double fidelity;
};

struct FidelityCurve {
  double mean = 1.0;
  double min = 1.0;
  std::vector<VelocitySample> samples;
};

/// Deterministic velocity grid: equally spaced over [v0 - dv, v0 + dv] with
/// equal weights (uniform), or over [v0 - 3dv, v0 + 3dv] with normalized
/// Gaussian weights (gaussian).
std::vector<std::pair<double, double>> velocity_grid(const VelocityModel& model);

FidelityCurve mean_fidelity(const ProtocolSpec& spec, const VelocityModel& model, AtomicLevel detect);

/// Weighted mean over an explicit list of (velocity, weight) points,
/// e.g. Monte Carlo draws with weight 1/N each.
FidelityCurve mean_fidelity_over(const ProtocolSpec& spec, double v0,
                                 std::span<const std::pair<double, double>> grid, AtomicLevel detect,
                                 PerturbedSteps perturbed = PerturbedSteps::all);

/// eta times the probability of detecting `detect` at the end of `spec`.
double success_probability(const ProtocolSpec& spec, AtomicLevel detect, const DetectorModel& detector);

/// Pairwise (cascade) summation; order-independent to rounding for symmetric inputs.
double pairwise_sum(std::span<const double> values);

}  // namespace cqed
