#include "cqed/fock.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

namespace cqed {

namespace {

std::size_t checked_power(std::size_t base, std::size_t exponent) {
  constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 28;
  std::size_t result = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    result *= base;
    if (result > kMaxAmplitudes) throw StateError("Fock space too large for dense storage");
  }
  return result;
}

void require_same_shape(const FockState& x, const FockState& y, const char* who) {
  if (x.modes() != y.modes() || x.n_max() != y.n_max()) {
    throw StateError(std::string(who) + ": Fock state shape mismatch");
  }
}

std::size_t sector_index(AtomicLevel level) { return level == AtomicLevel::g ? 0 : 1; }

}  // namespace

std::size_t recommended_n_max(double max_abs_label) {
  const double a = std::abs(max_abs_label);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(a * a + 8.0 * a)));
}

FockState::FockState(std::size_t modes, std::size_t n_max)
    : modes_(modes), n_max_(n_max), sector_size_(0) {
  if (modes_ == 0) throw StateError("FockState needs at least one mode");
  if (n_max_ < 1) throw StateError("FockState needs n_max >= 1");
  sector_size_ = checked_power(n_max_ + 1, modes_);
  amplitudes_.assign(2 * sector_size_, Amplitude{0.0, 0.0});
}

std::size_t FockState::stride(std::size_t mode) const {
  if (mode >= modes_) throw StateError("FockState::stride: mode out of range");
  return checked_power(n_max_ + 1, modes_ - 1 - mode);
}

std::span<Amplitude> FockState::sector(AtomicLevel level) {
  return std::span<Amplitude>(amplitudes_).subspan(sector_index(level) * sector_size_, sector_size_);
}

std::span<const Amplitude> FockState::sector(AtomicLevel level) const {
  return std::span<const Amplitude>(amplitudes_)
      .subspan(sector_index(level) * sector_size_, sector_size_);
}

Amplitude FockState::at(AtomicLevel level, std::span<const std::size_t> photons) const {
  if (photons.size() != modes_) throw StateError("FockState::at: wrong number of photon indices");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < modes_; ++k) {
    if (photons[k] > n_max_) throw StateError("FockState::at: photon number above cutoff");
    flat = flat * (n_max_ + 1) + photons[k];
  }
  return sector(level)[flat];
}

std::vector<Amplitude> coherent_coefficients(Amplitude label, std::size_t n_max) {
  std::vector<Amplitude> c(n_max + 1);
  c[0] = std::exp(-0.5 * std::norm(label));
  for (std::size_t n = 1; n <= n_max; ++n) {
    c[n] = c[n - 1] * label / std::sqrt(static_cast<double>(n));
  }
  return c;
}

FockExpansion to_fock(const BranchState& x, std::size_t n_max, const simd::KernelTable& kernels) {
  FockState out(x.modes(), n_max);
  const std::size_t per_mode = n_max + 1;
  std::vector<Amplitude> prefix;
  std::vector<Amplitude> next;
  for (const auto& branch : x.branches()) {
    // Kronecker product of the per-mode expansions; the last factor is
    // accumulated straight into the sector.
    prefix.assign(1, branch.coeff);
    for (std::size_t k = 0; k + 1 < x.modes(); ++k) {
      const auto c = coherent_coefficients(branch.labels[k], n_max);
      next.assign(prefix.size() * per_mode, Amplitude{0.0, 0.0});
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        kernels.axpy(std::span(next).subspan(i * per_mode, per_mode), prefix[i], c);
      }
      prefix.swap(next);
    }
    const auto last = coherent_coefficients(branch.labels.back(), n_max);
    auto sector = out.sector(branch.atom);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      kernels.axpy(sector.subspan(i * per_mode, per_mode), prefix[i], last);
    }
  }
  const double expected = inner_product(x, x).real();
  const double residual = expected - kernels.norm_sq(out.amplitudes());
  return FockExpansion{std::move(out), residual};
}

FockState fock_apply_dispersive(const FockState& x, std::size_t mode, double phi,
                                const simd::KernelTable& kernels) {
  if (mode >= x.modes()) throw StateError("fock_apply_dispersive: mode out of range");
  FockState out = x;
  const std::size_t per_mode = x.levels_per_mode();
  const std::size_t stride = x.stride(mode);
  const std::size_t block = per_mode * stride;

  std::vector<Amplitude> phase_g(per_mode);
  std::vector<Amplitude> phase_e(per_mode);
  for (std::size_t n = 0; n < per_mode; ++n) {
    const double photons = static_cast<double>(n);
    phase_g[n] = std::polar(1.0, phi * photons);
    phase_e[n] = std::polar(1.0, -phi * (photons + 1.0));
  }

  for (const auto level : {AtomicLevel::g, AtomicLevel::e}) {
    const auto& phases = level == AtomicLevel::g ? phase_g : phase_e;
    auto sector = out.sector(level);
    if (stride == 1) {
      kernels.multiply_periodic(sector, phases);
      continue;
    }
    for (std::size_t start = 0; start < sector.size(); start += block) {
      for (std::size_t n = 0; n < per_mode; ++n) {
        kernels.scale(sector.subspan(start + n * stride, stride), phases[n]);
      }
    }
  }
  return out;
}

FockState fock_apply_ramsey(const FockState& x, double theta, const simd::KernelTable& kernels) {
  FockState out = x;
  kernels.rotate_pair(out.sector(AtomicLevel::g), out.sector(AtomicLevel::e), std::cos(theta),
                      std::sin(theta));
  return out;
}

Amplitude fock_inner_product(const FockState& x, const FockState& y, const simd::KernelTable& kernels) {
  require_same_shape(x, y, "fock_inner_product");
  return kernels.dot(x.amplitudes(), y.amplitudes());
}

double fock_norm_sq(const FockState& x, const simd::KernelTable& kernels) {
  return kernels.norm_sq(x.amplitudes());
}

LevelProbabilities fock_detection_probabilities(const FockState& x, const simd::KernelTable& kernels) {
  const double pg = kernels.norm_sq(x.sector(AtomicLevel::g));
  const double pe = kernels.norm_sq(x.sector(AtomicLevel::e));
  const double total = pg + pe;
  if (!(total > 0.0)) throw StateError("fock_detection_probabilities: zero-norm state");
  return {pg / total, pe / total};
}

FockProjection fock_project(const FockState& x, AtomicLevel level, const simd::KernelTable& kernels) {
  const double p = fock_detection_probabilities(x, kernels)[level];
  if (!(p > kCoefficientDrop)) {
    throw StateError("fock_project: zero-probability outcome " + std::string(to_string(level)));
  }
  FockState out = x;
  auto kept = out.sector(level);
  auto dropped = out.sector(other(level));
  std::fill(dropped.begin(), dropped.end(), Amplitude{0.0, 0.0});
  kernels.scale(kept, Amplitude{1.0 / std::sqrt(kernels.norm_sq(kept)), 0.0});
  return {std::move(out), p};
}

FockState fock_apply_step(const FockState& x, const ProtocolStep& step, const simd::KernelTable& kernels) {
  if (const auto* r = std::get_if<RamseyStep>(&step)) return fock_apply_ramsey(x, r->theta, kernels);
  if (const auto* d = std::get_if<DispersiveStep>(&step)) {
    return fock_apply_dispersive(x, d->mode, d->phi, kernels);
  }
  return fock_project(x, std::get<DetectStep>(step).level, kernels).state;
}

double fock_fidelity(const FockState& x, const FockState& y, const simd::KernelTable& kernels) {
  const double nx = fock_norm_sq(x, kernels);
  const double ny = fock_norm_sq(y, kernels);
  if (!(nx > 0.0) || !(ny > 0.0)) throw StateError("fock_fidelity: zero-norm state");
  return std::clamp(std::norm(fock_inner_product(x, y, kernels)) / (nx * ny), 0.0, 1.0);
}

CrossCheckReport cross_check(const ProtocolSpec& spec, std::size_t n_max, const simd::KernelTable& kernels) {
  const RunResult run = run_protocol(spec);
  CrossCheckReport report;
  report.n_max = n_max;

  auto oracle = to_fock(run.trace.front().state, n_max, kernels).state;
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    const auto& entry = run.trace[i];
    double probability_deviation = 0.0;
    if (i > 0) {
      const auto& step = spec.steps[i - 1];
      if (const auto* d = std::get_if<DetectStep>(&step)) {
        auto projected = fock_project(oracle, d->level, kernels);
        probability_deviation = std::abs(projected.probability - run.detection->probability);
        oracle = std::move(projected.state);
      } else {
        oracle = fock_apply_step(oracle, step, kernels);
      }
    }
    const auto image = to_fock(entry.state, n_max, kernels);
    const auto branch_p = detection_probabilities(entry.state);
    const auto oracle_p = fock_detection_probabilities(oracle, kernels);
    probability_deviation = std::max({probability_deviation, std::abs(branch_p.g - oracle_p.g),
                                      std::abs(branch_p.e - oracle_p.e)});

    StepAgreement agreement{entry.label, fock_fidelity(image.state, oracle, kernels), image.residual,
                            probability_deviation};
    report.min_fidelity = std::min(report.min_fidelity, agreement.fidelity);
    report.max_residual = std::max(report.max_residual, agreement.residual);
    report.max_probability_deviation =
        std::max(report.max_probability_deviation, agreement.probability_deviation);
    report.steps.push_back(std::move(agreement));
  }
  return report;
}

}  // namespace cqed
