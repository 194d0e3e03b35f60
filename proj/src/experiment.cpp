#include "cqed/experiment.hpp"

#include <cmath>
#include <numbers>

#include "cqed/protocol.hpp"

namespace cqed {

void CavityParams::validate() const {
  if (!(g > 0.0)) throw ProtocolError("coupling g must be positive");
  if (!(delta > 0.0)) throw ProtocolError("detuning must be positive");
  if (!(waist > 0.0)) throw ProtocolError("waist must be positive");
  if (!(t_damp > 0.0)) throw ProtocolError("photon damping time must be positive");
  if (!(t_atom > 0.0)) throw ProtocolError("atomic radiative time must be positive");
  if (!(n_bar >= 0.0)) throw ProtocolError("mean photon number must be non-negative");
}

double interaction_time(const CavityParams& p, double phi) {
  if (!(phi > 0.0)) throw ProtocolError("interaction_time: phase must be positive");
  return phi * p.delta / (p.g * p.g);
}

VelocityReport required_velocity(const CavityParams& p, double t_total_per_cavity) {
  if (!(t_total_per_cavity > 0.0)) throw ProtocolError("required_velocity: time must be positive");
  const double v = std::sqrt(std::numbers::pi) * p.waist / t_total_per_cavity;
  return {v, v >= kLabVelocityMin && v <= kLabVelocityMax};
}

double total_time(const CavityParams& p, std::size_t kicks, double phi) {
  if (kicks < 1) throw ProtocolError("total_time: at least one kick required");
  return static_cast<double>(kicks) * interaction_time(p, phi);
}

DispersiveReport dispersive_check(const CavityParams& p, const CheckThresholds& limits) {
  const double r1 = p.g * std::sqrt(p.n_bar) / p.delta;
  const double r2 = p.g * p.n_bar / p.delta;
  return {r1, r2, r1 <= limits.dispersive};
}

BudgetReport budget_check(const CavityParams& p, double tau, const CheckThresholds& limits) {
  if (!(tau > 0.0)) throw ProtocolError("budget_check: tau must be positive");
  const double a = tau / p.t_damp;
  const double b = tau / p.t_atom;
  return {a, b, a <= limits.budget && b <= limits.budget};
}

double orthogonality_margin(Amplitude alpha) { return std::abs(coherent_overlap(alpha, -alpha)); }

}  // namespace cqed
