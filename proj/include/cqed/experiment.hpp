#pragma once
// Experimental timing and regime checks for the bimodal-cavity setup.
// Angular frequencies are in rad/s, times in s, lengths in m.

#include <cstddef>

#include "cqed/state.hpp"

namespace cqed {

inline constexpr double kTwoPi = 6.28318530717958647692;

struct CavityParams {
  double g = kTwoPi * 51e3;      // vacuum Rabi coupling
  double delta = 40.0 * kTwoPi * 51e3;
  double waist = 6e-3;
  double t_damp = 0.130;         // photon damping time
  double t_atom = 0.030;         // atomic radiative time
  double n_bar = 4.0;            // mean photon number per mode, |alpha|^2

  void validate() const;
};

struct CheckThresholds {
  double dispersive = 0.1;
  double budget = 0.05;
};

inline constexpr double kLabVelocityMin = 20.0;
inline constexpr double kLabVelocityMax = 500.0;

/// Time for a dispersive phase phi: phi * delta / g^2.
double interaction_time(const CavityParams& p, double phi);

struct VelocityReport {
  double velocity;
  bool lab_feasible;  // within [20, 500] m/s
};

/// sqrt(pi) * w / t, the velocity that gives effective interaction time t
/// across a Gaussian mode of waist w.
VelocityReport required_velocity(const CavityParams& p, double t_total_per_cavity);

/// kicks * interaction_time(p, phi); Ramsey zones and flight between cavities neglected.
double total_time(const CavityParams& p, std::size_t kicks, double phi);

struct DispersiveReport {
  double r1;  // g sqrt(n_bar) / delta
  double r2;  // g n_bar / delta, i.e. (g^2 n_bar / delta) / g
  bool ok;
};

DispersiveReport dispersive_check(const CavityParams& p, const CheckThresholds& limits = {});

struct BudgetReport {
  double tau_over_tdamp;
  double tau_over_tatom;
  bool ok;
};

BudgetReport budget_check(const CavityParams& p, double tau, const CheckThresholds& limits = {});

/// |<alpha|-alpha>| = exp(-2|alpha|^2).
double orthogonality_margin(Amplitude alpha);

}  // namespace cqed
