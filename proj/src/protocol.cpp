#include "cqed/protocol.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace cqed {

namespace {

constexpr double kNormalizedSlack = 1e-6;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_normalized(const BranchState& x, const char* who) {
  if (std::abs(norm(x) - 1.0) > kNormalizedSlack) {
    throw StateError(std::string(who) + ": state is not normalized");
  }
}

}  // namespace

std::optional<AtomicLevel> ProtocolSpec::detect_level() const {
  if (steps.empty()) return std::nullopt;
  if (const auto* d = std::get_if<DetectStep>(&steps.back())) return d->level;
  return std::nullopt;
}

void ProtocolSpec::validate() const {
  if (mode_init.empty()) throw ProtocolError("protocol declares no modes");
  if (!mode_names.empty() && mode_names.size() != mode_init.size()) {
    throw ProtocolError("mode name list does not match mode count");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (const auto* d = std::get_if<DispersiveStep>(&steps[i]); d && d->mode >= modes()) {
      throw ProtocolError("step " + std::to_string(i + 1) + ": mode index " +
                          std::to_string(d->mode) + " out of range");
    }
    if (std::holds_alternative<DetectStep>(steps[i]) && i + 1 != steps.size()) {
      throw ProtocolError("step " + std::to_string(i + 1) + ": Detect must be final");
    }
  }
}

ProtocolSpec canonical_spec(AtomicLevel atom, double alpha, std::optional<AtomicLevel> detect) {
  ProtocolSpec spec;
  spec.atom_init = atom;
  spec.mode_init.assign(4, Amplitude{0.0, alpha});
  spec.mode_names = {"A", "B", "C", "D"};
  spec.steps = {RamseyStep{kPi / 4},        DispersiveStep{0, kPi / 2},
                DispersiveStep{1, kPi / 2}, RamseyStep{kPi / 4},
                DispersiveStep{2, kPi / 2}, DispersiveStep{3, kPi / 2},
                RamseyStep{kPi / 4}};
  if (detect) spec.steps.emplace_back(DetectStep{*detect});
  return spec;
}

BranchState apply_ramsey(const BranchState& x, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<Branch> out;
  out.reserve(2 * x.size());
  for (const auto& b : x.branches()) {
    if (b.atom == AtomicLevel::e) {
      out.push_back(Branch{AtomicLevel::e, b.labels, b.coeff * c});
      out.push_back(Branch{AtomicLevel::g, b.labels, b.coeff * s});
    } else {
      out.push_back(Branch{AtomicLevel::g, b.labels, b.coeff * c});
      out.push_back(Branch{AtomicLevel::e, b.labels, -b.coeff * s});
    }
  }
  return merge_branches(BranchState(x.modes(), std::move(out)));
}

BranchState apply_dispersive(const BranchState& x, std::size_t mode, double phi) {
  if (mode >= x.modes()) {
    throw StateError("apply_dispersive: mode " + std::to_string(mode) + " out of range");
  }
  const Amplitude forward = std::polar(1.0, phi);
  const Amplitude backward = std::polar(1.0, -phi);
  std::vector<Branch> out(x.branches().begin(), x.branches().end());
  for (auto& b : out) {
    if (b.atom == AtomicLevel::e) {
      b.labels[mode] *= backward;
      b.coeff *= backward;
    } else {
      b.labels[mode] *= forward;
    }
  }
  return BranchState(x.modes(), std::move(out));
}

LevelProbabilities detection_probabilities(const BranchState& x) {
  require_normalized(x, "detection_probabilities");
  const auto pg = field_part(x, AtomicLevel::g);
  const auto pe = field_part(x, AtomicLevel::e);
  return {std::max(0.0, inner_product(pg, pg).real()), std::max(0.0, inner_product(pe, pe).real())};
}

Projection project(const BranchState& x, AtomicLevel level) {
  const double p = detection_probabilities(x)[level];
  if (!(p > kCoefficientDrop)) {
    throw StateError("project: zero-probability outcome " + std::string(to_string(level)));
  }
  auto field = field_part(x, level);
  return {scaled(field, Amplitude{1.0 / std::sqrt(p), 0.0}), p};
}

BranchState apply_step(const BranchState& x, const ProtocolStep& step) {
  return std::visit(
      overloaded{
          [&](const RamseyStep& r) { return apply_ramsey(x, r.theta); },
          [&](const DispersiveStep& d) { return apply_dispersive(x, d.mode, d.phi); },
          [&](const DetectStep& d) { return with_atom(project(x, d.level).field, d.level); },
      },
      step);
}

std::string step_label(const ProtocolStep& step, const ProtocolSpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const RamseyStep& r) { os << "ramsey(" << r.theta << ")"; },
                 [&](const DispersiveStep& d) {
                   os << "disperse(";
                   if (d.mode < spec.mode_names.size()) {
                     os << spec.mode_names[d.mode];
                   } else {
                     os << "#" << d.mode;
                   }
                   os << ", " << d.phi << ")";
                 },
                 [&](const DetectStep& d) { os << "detect(" << to_string(d.level) << ")"; },
             },
             step);
  return os.str();
}

RunResult run_protocol(const ProtocolSpec& spec) {
  spec.validate();
  BranchState state = init_state(spec.atom_init, spec.mode_init);
  std::vector<TraceEntry> trace;
  trace.push_back({"init", state});
  std::optional<Detection> detection;
  for (const auto& step : spec.steps) {
    if (const auto* d = std::get_if<DetectStep>(&step)) {
      auto projected = project(state, d->level);
      trace.push_back({step_label(step, spec), with_atom(projected.field, d->level)});
      detection = Detection{d->level, std::move(projected.field), projected.probability};
      break;
    }
    state = apply_step(state, step);
    trace.push_back({step_label(step, spec), state});
  }
  return RunResult{std::move(trace), std::move(state), std::move(detection)};
}

std::string_view to_string(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::chi1: return "chi1";
    case ClusterKind::chi2: return "chi2";
    case ClusterKind::chi3: return "chi3";
    case ClusterKind::chi4: return "chi4";
  }
  return "?";
}

std::string cluster_name(ClusterKind kind, ClusterFamily family) {
  std::string name(to_string(kind));
  name += "(" + std::string(to_string(prepared_level(kind))) + "," +
          std::string(to_string(detected_level(kind))) + ")";
  return family == ClusterFamily::linear ? "L:" + name : name;
}

AtomicLevel prepared_level(ClusterKind kind) {
  return (kind == ClusterKind::chi1 || kind == ClusterKind::chi4) ? AtomicLevel::e : AtomicLevel::g;
}

AtomicLevel detected_level(ClusterKind kind) {
  return (kind == ClusterKind::chi1 || kind == ClusterKind::chi3) ? AtomicLevel::e : AtomicLevel::g;
}

ClusterKind cluster_kind(AtomicLevel prepared, AtomicLevel detected) {
  if (prepared == AtomicLevel::e) {
    return detected == AtomicLevel::e ? ClusterKind::chi1 : ClusterKind::chi4;
  }
  return detected == AtomicLevel::g ? ClusterKind::chi2 : ClusterKind::chi3;
}

FieldState ideal_cluster(ClusterKind kind, Amplitude alpha, ClusterFamily family) {
  // Term order: |a a a a>, |a a -a -a>, |-a -a a a>, |-a -a -a -a>.
  static constexpr std::array<std::array<double, 4>, 4> kSigns{{
      {+1, +1, +1, -1},  // chi1
      {-1, +1, +1, +1},  // chi2
      {+1, +1, -1, +1},  // chi3
      {+1, -1, +1, +1},  // chi4
  }};
  static constexpr std::array<std::array<int, 2>, 4> kPattern{{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};
  const auto& signs = kSigns[static_cast<std::size_t>(kind)];
  const double last = family == ClusterFamily::linear ? -1.0 : 1.0;

  std::vector<FieldTerm> terms;
  for (std::size_t t = 0; t < 4; ++t) {
    const Amplitude first = alpha * static_cast<double>(kPattern[t][0]);
    const Amplitude second = alpha * static_cast<double>(kPattern[t][1]);
    terms.push_back(FieldTerm{{first, first, second, second * last}, {signs[t], 0.0}});
  }
  return normalize(FieldState(4, std::move(terms)));
}

}  // namespace cqed
