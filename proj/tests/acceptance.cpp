// Acceptance gate. Prints one PASS/FAIL line per criterion, followed by
// indented measurements. Usage: acceptance [criterion-number ...]
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cqed/cli.hpp"
#include "cqed/experiment.hpp"
#include "cqed/fock.hpp"
#include "cqed/imperfections.hpp"
#include "cqed/protocol.hpp"
#include "cqed/protocol_file.hpp"
#include "test_support.hpp"

namespace {

using namespace cqed;
namespace fs = std::filesystem;
using testing::cplx;

// Tolerances and bands, pinned here.
constexpr double kTranscriptionFloor = 1.0 - 1e-12;
constexpr double kClusterFloor = 1.0 - 1e-10;
constexpr double kProbabilityTolerance = 1e-3;
constexpr double kArithmeticRelTolerance = 0.005;
constexpr double kMarginRelTolerance = 0.01;
constexpr double kMarginLog10Lo = -3.6;
constexpr double kMarginLog10Hi = -3.4;
constexpr double kMeanFidelityLo = 0.93;
constexpr double kMeanFidelityHi = 0.995;
constexpr double kNominalFidelityTolerance = 1e-10;
constexpr double kRatioLo = 3.5;
constexpr double kRatioHi = 4.5;
constexpr double kOracleFloor = 1.0 - 1e-7;
constexpr double kOracleProbability = 1e-8;
constexpr std::size_t kOracleNMax = 24;
constexpr int kRandomProtocols = 12;
constexpr double kNormDrift = 1e-12;
constexpr double kLinearityTolerance = 1e-12;
constexpr double kCompleteness = 1e-10;
constexpr double kOverlapIdentity = 1e-13;

class Report {
 public:
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    lines_.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { lines_.push_back("note  " + what); }
  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool ok_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string loss(double fidelity) { return fmt("1-F=%.3g", 1.0 - fidelity); }

// ---------------------------------------------------------------------------

void equation_transcription(Report& r) {
  for (bool upper : {true, false}) {
    const auto level = upper ? AtomicLevel::e : AtomicLevel::g;
    const auto run = run_protocol(canonical_spec(level, 2.0));
    const std::pair<const char*, std::pair<std::size_t, BranchState>> stages[] = {
        {"R1", {testing::kStageR1, testing::transcribed_after_r1(upper, 2.0)}},
        {"C1", {testing::kStageC1, testing::transcribed_after_c1(upper, 2.0)}},
        {"R2", {testing::kStageR2, testing::transcribed_after_r2(upper, 2.0)}},
        {"C2", {testing::kStageC2, testing::transcribed_after_c2(upper, 2.0)}},
        {"R3", {testing::kStageR3, testing::transcribed_after_r3(upper, 2.0)}},
    };
    for (const auto& [name, stage] : stages) {
      const double f = fidelity(run.trace[stage.first].state, stage.second);
      r.check(f >= kTranscriptionFloor,
              std::string("atom ") + std::string(to_string(level)) + " stage " + name + " " + loss(f));
    }
  }
}

void cluster_outputs(Report& r) {
  for (auto kind : {ClusterKind::chi1, ClusterKind::chi2, ClusterKind::chi3, ClusterKind::chi4}) {
    const auto run = run_protocol(canonical_spec(prepared_level(kind), 2.0, detected_level(kind)));
    const double f = fidelity(run.detection->field, ideal_cluster(kind, 2.0));
    r.check(f >= kClusterFloor, cluster_name(kind, ClusterFamily::standard) + " " + loss(f));
  }
  auto spec = canonical_spec(AtomicLevel::e, 2.0, AtomicLevel::e);
  spec.mode_init[3] = cplx(0, -2);
  const auto field = run_protocol(spec).detection->field;
  double best = 0.0;
  std::string best_name;
  for (auto family : {ClusterFamily::standard, ClusterFamily::linear}) {
    for (auto kind : {ClusterKind::chi1, ClusterKind::chi2, ClusterKind::chi3, ClusterKind::chi4}) {
      const double f = fidelity(field, ideal_cluster(kind, 2.0, family));
      if (f > best) {
        best = f;
        best_name = cluster_name(kind, family);
      }
    }
  }
  r.check(best >= kClusterFloor && best_name.rfind("L:", 0) == 0,
          "[2i,2i,2i,-2i] best match " + best_name + " " + loss(best));
}

void success_probability_check(Report& r) {
  const auto spec = canonical_spec(AtomicLevel::e, 2.0);
  const auto p = detection_probabilities(run_protocol(spec).final_joint);
  r.check(std::abs(p.g - 0.5) <= kProbabilityTolerance, fmt("p_g=%.6f", p.g));
  r.check(std::abs(p.e - 0.5) <= kProbabilityTolerance, fmt("p_e=%.6f", p.e));
  for (auto level : {AtomicLevel::g, AtomicLevel::e}) {
    const double s = success_probability(spec, level, DetectorModel{0.9});
    r.check(std::abs(s - 0.45) <= kProbabilityTolerance,
            std::string("eta=0.9 detect ") + std::string(to_string(level)) + fmt(" success=%.6f", s));
  }
}

void parameter_arithmetic(Report& r) {
  const CavityParams p;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double t = interaction_time(p, kPi / 2);
  r.check(rel(t, 196e-6) <= kArithmeticRelTolerance, fmt("interaction time %.4g s (196 us)", t));
  const double v = required_velocity(p, 2 * t).velocity;
  r.check(rel(v, 27.0) <= kArithmeticRelTolerance, fmt("velocity %.4g m/s (27 m/s)", v));
  const double tau = total_time(p, 4, kPi / 2);
  r.check(rel(tau, 0.784e-3) <= kArithmeticRelTolerance, fmt("total time %.4g s (0.784 ms)", tau));
  const double margin = orthogonality_margin(2.0);
  r.check(rel(margin, std::exp(-8.0)) <= kMarginRelTolerance, fmt("margin %.4g (e^-8)", margin));
  const double lg = std::log10(margin);
  r.check(lg >= kMarginLog10Lo && lg <= kMarginLog10Hi, fmt("log10 margin %.3f", lg));
  const auto d = dispersive_check(p);
  r.check(d.ok, fmt("dispersive r1=%.3g", d.r1));
  const auto b = budget_check(p, tau);
  r.check(b.ok, fmt("budget tau/t_atom=%.3g", b.tau_over_tatom));
}

void velocity_spread(Report& r) {
  const auto spec = canonical_spec(AtomicLevel::e, 2.0);
  const VelocityModel model{27.0, 2.0, VelocityDistribution::uniform, 201};
  const auto curve = mean_fidelity(spec, model, AtomicLevel::e);
  r.check(curve.mean >= kMeanFidelityLo && curve.mean <= kMeanFidelityHi,
          fmt("mean F at dv=2 = %.4f", curve.mean) + fmt(" (band [%.3f,", kMeanFidelityLo) +
              fmt(" %.3f]", kMeanFidelityHi) + fmt(", min %.4f)", curve.min));
  // Split the loss by error source; not part of the verdict.
  const auto grid = velocity_grid(model);
  for (auto [perturbed, label] : {std::pair{PerturbedSteps::ramsey_only, "Ramsey pulses only"},
                                  std::pair{PerturbedSteps::dispersive_only, "dispersive phases only"}}) {
    r.note(std::string("mean F with ") + label + " scaled: " +
           fmt("%.4f", mean_fidelity_over(spec, model.v0, grid, AtomicLevel::e, perturbed).mean));
  }
  const double f0 = fidelity_at_velocity(spec, 27.0, 27.0, AtomicLevel::e);
  r.check(std::abs(f0 - 1.0) <= kNominalFidelityTolerance, "F(v0) " + loss(f0));
  for (double dv : {0.1, 0.25, 0.5}) {
    auto mean_loss = [&](double spread) {
      return 1.0 - mean_fidelity(spec, {27.0, spread, VelocityDistribution::uniform, 201}, AtomicLevel::e).mean;
    };
    const double ratio = mean_loss(2 * dv) / mean_loss(dv);
    r.check(ratio >= kRatioLo && ratio <= kRatioHi, fmt("loss ratio dv=%.2f", dv) + fmt(" -> 2dv: %.3f", ratio));
  }
}

void oracle_equivalence(Report& r) {
  auto record = [&](const std::string& name, const ProtocolSpec& spec) {
    const auto report = cross_check(spec, kOracleNMax);
    const bool ok = report.reliable() && report.min_fidelity >= kOracleFloor &&
                    report.max_probability_deviation <= kOracleProbability;
    r.check(ok, name + " " + loss(report.min_fidelity) + fmt(" |dp|=%.2g", report.max_probability_deviation) +
                    fmt(" residual=%.2g", report.max_residual));
  };
  record("canonical", canonical_spec(AtomicLevel::e, 2.0, AtomicLevel::e));

  auto gen = testing::rng(20240601);
  const std::size_t mode_counts[] = {1, 2, 4};
  for (int trial = 0; trial < kRandomProtocols; ++trial) {
    ProtocolSpec spec;
    spec.atom_init = testing::uniform(gen, 0, 1) < 0.5 ? AtomicLevel::g : AtomicLevel::e;
    const std::size_t modes = mode_counts[trial % 3];
    for (std::size_t k = 0; k < modes; ++k) spec.mode_init.push_back(testing::random_label(gen, 2.0));
    const int steps = 4 + trial % 4;
    for (int s = 0; s < steps; ++s) {
      if (s % 2 == 0) {
        spec.steps.push_back(RamseyStep{testing::uniform(gen, 0, kPi / 2)});
      } else {
        const auto mode = static_cast<std::size_t>(testing::uniform(gen, 0, static_cast<double>(modes))) % modes;
        spec.steps.push_back(DispersiveStep{mode, testing::uniform(gen, 0, kPi)});
      }
    }
    if (trial % 2 == 0) spec.steps.push_back(DetectStep{trial % 4 == 0 ? AtomicLevel::e : AtomicLevel::g});
    record("random #" + std::to_string(trial) + " M=" + std::to_string(modes), spec);
  }
}

int invoke_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void property_suite(Report& r) {
  auto gen = testing::rng(7);

  // Unitarity. The branch engine is checked per step on fresh states, since
  // chaining random Ramsey pulses doubles the branch count each time; the
  // Fock engine is chained over all 100 steps.
  double branch_drift = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = testing::random_state(gen, 4, 3, 2.0);
    const auto y = i % 2 ? apply_ramsey(x, testing::uniform(gen, 0, kPi / 2))
                         : apply_dispersive(x, static_cast<std::size_t>(i / 2) % 4, testing::uniform(gen, 0, kPi));
    branch_drift = std::max(branch_drift, std::abs(norm(y) - 1.0));
  }
  r.check(branch_drift <= kNormDrift, fmt("branch engine norm drift %.2g over 100 steps", branch_drift));
  auto fock = to_fock(testing::random_state(gen, 2, 3, 1.5), 16).state;
  const double start = fock_norm_sq(fock);
  for (int i = 0; i < 100; ++i) {
    fock = i % 2 ? fock_apply_ramsey(fock, testing::uniform(gen, 0, kPi / 2))
                 : fock_apply_dispersive(fock, static_cast<std::size_t>(i / 2) % 2, testing::uniform(gen, 0, kPi));
  }
  const double fock_drift = std::abs(std::sqrt(fock_norm_sq(fock)) - std::sqrt(start));
  r.check(fock_drift <= kNormDrift, fmt("oracle norm drift %.2g over 100 chained steps", fock_drift));

  double linear_err = 0.0;
  for (int i = 0; i < 30; ++i) {
    const auto x1 = testing::random_state(gen, 2, 3, 2.0);
    const auto x2 = testing::random_state(gen, 2, 2, 2.0);
    const cplx c1 = testing::random_coeff(gen), c2 = testing::random_coeff(gen);
    const ProtocolStep step = i % 2 ? ProtocolStep{RamseyStep{testing::uniform(gen, 0, kPi / 2)}}
                                    : ProtocolStep{DispersiveStep{0, testing::uniform(gen, 0, kPi)}};
    const auto lhs = apply_step(concatenate(scaled(x1, c1), scaled(x2, c2)), step);
    const auto rhs = concatenate(scaled(apply_step(x1, step), c1), scaled(apply_step(x2, step), c2));
    const auto probe = testing::random_state(gen, 2, 3, 2.0);
    linear_err = std::max(linear_err, std::abs(inner_product(probe, lhs) - inner_product(probe, rhs)));
  }
  r.check(linear_err <= kLinearityTolerance, fmt("linearity error %.2g", linear_err));

  const auto flipped = apply_ramsey(apply_ramsey(init_state(AtomicLevel::e, {cplx(0, 2)}), kPi / 4), kPi / 4);
  const double pg = detection_probabilities(flipped).g;
  r.check(std::abs(pg - 1.0) <= 1e-12, fmt("two pi/2 pulses: P(g)=%.15f", pg));

  double completeness = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto p = detection_probabilities(testing::random_state(gen, 3, 5, 2.0));
    completeness = std::max(completeness, std::abs(p.g + p.e - 1.0));
  }
  r.check(completeness <= kCompleteness, fmt("p_g+p_e deviation %.2g", completeness));

  double overlap_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx a = testing::random_label(gen, 3.0), b = testing::random_label(gen, 3.0);
    overlap_err = std::max(overlap_err, std::abs(std::norm(coherent_overlap(a, b)) - std::exp(-std::norm(a - b))));
  }
  r.check(overlap_err <= kOverlapIdentity, fmt("overlap identity error %.2g", overlap_err));

  const fs::path data = CQED_TEST_DATA;
  const fs::path tmp = fs::temp_directory_path() / ("cqed_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const std::string canonical = (data / "valid" / "canonical_e.proto").string();
  const int c1 = invoke_cli({"sweep", canonical, "--samples", "41", "--out", (tmp / "a.csv").string()});
  const int c2 = invoke_cli({"sweep", canonical, "--samples", "41", "--out", (tmp / "b.csv").string()});
  const auto a = slurp(tmp / "a.csv");
  r.check(c1 == 0 && c2 == 0 && !a.empty() && a == slurp(tmp / "b.csv"),
          "sweep CSV byte-identical across runs (" + std::to_string(a.size()) + " bytes)");
  fs::remove_all(tmp);

  auto files = [&](const char* sub) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(data / sub)) {
      if (e.path().extension() == ".proto") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  int valid_ok = 0, invalid_ok = 0;
  const auto valid = files("valid");
  const auto invalid = files("invalid");
  for (const auto& f : valid) {
    const auto spec = load_protocol(f.string());
    const bool round_trip = parse_protocol(print_protocol(spec)) == spec;
    if (round_trip && invoke_cli({"run", f.string()}) == 0) ++valid_ok;
  }
  for (const auto& f : invalid) {
    if (invoke_cli({"run", f.string()}) == 2) ++invalid_ok;
  }
  r.check(valid.size() >= 20 && valid_ok == static_cast<int>(valid.size()),
          std::to_string(valid_ok) + "/" + std::to_string(valid.size()) + " valid files round-trip and exit 0");
  r.check(invalid.size() >= 10 && invalid_ok == static_cast<int>(invalid.size()),
          std::to_string(invalid_ok) + "/" + std::to_string(invalid.size()) + " invalid files exit 2");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Report&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "equation_transcription", equation_transcription},
      {2, "cluster_outputs", cluster_outputs},
      {3, "success_probability", success_probability_check},
      {4, "parameter_arithmetic", parameter_arithmetic},
      {5, "velocity_spread", velocity_spread},
      {6, "oracle_equivalence", oracle_equivalence},
      {7, "property_suite", property_suite},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool all_ok = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Report report;
    try {
      c.body(report);
    } catch (const std::exception& e) {
      report.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (report.ok() ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.name << "\n";
    for (const auto& line : report.lines()) std::cout << "        " << line << "\n";
    all_ok = all_ok && report.ok();
  }
  return all_ok ? 0 : 1;
}
