#include "cqed/imperfections.hpp"

#include <algorithm>
#include <cmath>

namespace cqed {

namespace {

ProtocolSpec with_detection(const ProtocolSpec& spec, AtomicLevel detect) {
  ProtocolSpec out = spec;
  if (out.detect_level()) out.steps.pop_back();
  out.steps.emplace_back(DetectStep{detect});
  return out;
}

ProtocolSpec without_detection(const ProtocolSpec& spec) {
  ProtocolSpec out = spec;
  if (out.detect_level()) out.steps.pop_back();
  return out;
}

template <typename Step>
double first_angle(const ProtocolSpec& spec) {
  for (const auto& step : spec.steps) {
    if (const auto* s = std::get_if<Step>(&step)) {
      if constexpr (std::is_same_v<Step, RamseyStep>) {
        return s->theta;
      } else {
        return s->phi;
      }
    }
  }
  return 0.0;
}

}  // namespace

void VelocityModel::validate() const {
  if (!(v0 > 0.0)) throw ProtocolError("velocity model: v0 must be positive");
  if (!(dv >= 0.0)) throw ProtocolError("velocity model: dv must be non-negative");
  if (!(dv < v0)) throw ProtocolError("velocity model: dv must be below v0");
  if (distribution == VelocityDistribution::gaussian && !(3.0 * dv < v0)) {
    throw ProtocolError("velocity model: gaussian grid v0 - 3 dv must stay positive");
  }
  if (samples < 1) throw ProtocolError("velocity model: at least one sample required");
}

void DetectorModel::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ProtocolError("detector efficiency must lie in [0, 1]");
}

PulseParams pulse_params_of_velocity(double v, double v0, double theta0, double phi0) {
  if (!(v > 0.0)) throw ProtocolError("velocity must be positive");
  if (!(v0 > 0.0)) throw ProtocolError("nominal velocity must be positive");
  const double factor = v0 / v;
  return {theta0 * factor, phi0 * factor};
}

ProtocolSpec rescale_for_velocity(const ProtocolSpec& spec, double v, double v0, PerturbedSteps perturbed) {
  const double factor = pulse_params_of_velocity(v, v0, 1.0, 1.0).theta;
  const bool ramsey = perturbed != PerturbedSteps::dispersive_only;
  const bool dispersive = perturbed != PerturbedSteps::ramsey_only;
  ProtocolSpec out = spec;
  for (auto& step : out.steps) {
    if (auto* r = std::get_if<RamseyStep>(&step); r && ramsey) r->theta *= factor;
    if (auto* d = std::get_if<DispersiveStep>(&step); d && dispersive) d->phi *= factor;
  }
  return out;
}

double fidelity_at_velocity(const ProtocolSpec& spec, double v, double v0, AtomicLevel detect,
                            PerturbedSteps perturbed_steps) {
  const ProtocolSpec nominal = with_detection(spec, detect);
  const auto reference = run_protocol(nominal);
  const auto perturbed = run_protocol(rescale_for_velocity(nominal, v, v0, perturbed_steps));
  return fidelity(reference.detection->field, perturbed.detection->field);
}

std::vector<std::pair<double, double>> velocity_grid(const VelocityModel& model) {
  model.validate();
  std::vector<std::pair<double, double>> grid;
  const std::size_t n = model.samples;
  if (n == 1 || model.dv == 0.0) {
    // Degenerate spread: every point sits at v0.
    for (std::size_t i = 0; i < n; ++i) grid.emplace_back(model.v0, 1.0 / static_cast<double>(n));
    return grid;
  }
  const double half = model.distribution == VelocityDistribution::uniform ? model.dv : 3.0 * model.dv;
  const double step = 2.0 * half / static_cast<double>(n - 1);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Symmetric construction keeps the grid exactly mirror-symmetric about v0.
    const double offset = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * step;
    grid.emplace_back(model.v0 + offset, 0.0);
    weights[i] = model.distribution == VelocityDistribution::uniform
                     ? 1.0
                     : std::exp(-0.5 * offset * offset / (model.dv * model.dv));
  }
  const double total = pairwise_sum(weights);
  for (std::size_t i = 0; i < n; ++i) grid[i].second = weights[i] / total;
  return grid;
}

FidelityCurve mean_fidelity_over(const ProtocolSpec& spec, double v0,
                                 std::span<const std::pair<double, double>> grid, AtomicLevel detect,
                                 PerturbedSteps perturbed) {
  if (grid.empty()) throw ProtocolError("mean_fidelity: empty velocity grid");
  const ProtocolSpec nominal = with_detection(spec, detect);
  const ProtocolSpec open = without_detection(spec);
  const auto reference = run_protocol(nominal);
  const double theta0 = first_angle<RamseyStep>(spec);
  const double phi0 = first_angle<DispersiveStep>(spec);
  const double theta_scale = perturbed == PerturbedSteps::dispersive_only ? 0.0 : 1.0;
  const double phi_scale = perturbed == PerturbedSteps::ramsey_only ? 0.0 : 1.0;

  FidelityCurve curve;
  std::vector<double> weighted;
  std::vector<double> weights;
  for (const auto& [v, w] : grid) {
    const auto pulses = pulse_params_of_velocity(v, v0, theta0, phi0);
    const double theta = theta_scale * pulses.theta + (1.0 - theta_scale) * theta0;
    const double phi = phi_scale * pulses.phi + (1.0 - phi_scale) * phi0;
    const auto run = run_protocol(rescale_for_velocity(open, v, v0, perturbed));
    const auto probabilities = detection_probabilities(run.final_joint);
    const auto heralded = project(run.final_joint, detect);
    const double f = fidelity(reference.detection->field, heralded.field);
    curve.samples.push_back({v, w, theta, phi, probabilities.g, probabilities.e, f});
    weighted.push_back(w * f);
    weights.push_back(w);
  }
  curve.mean = pairwise_sum(weighted) / pairwise_sum(weights);
  curve.min = std::min_element(curve.samples.begin(), curve.samples.end(),
                               [](const auto& a, const auto& b) { return a.fidelity < b.fidelity; })
                  ->fidelity;
  return curve;
}

FidelityCurve mean_fidelity(const ProtocolSpec& spec, const VelocityModel& model, AtomicLevel detect) {
  const auto grid = velocity_grid(model);
  return mean_fidelity_over(spec, model.v0, grid, detect, model.perturbed);
}

double success_probability(const ProtocolSpec& spec, AtomicLevel detect, const DetectorModel& detector) {
  detector.validate();
  const auto run = run_protocol(with_detection(spec, detect));
  return detector.eta * run.detection->probability;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 2) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace cqed
