#include "cqed/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cqed/experiment.hpp"
#include "cqed/fock.hpp"
#include "cqed/imperfections.hpp"
#include "cqed/protocol_file.hpp"

namespace cqed::cli {

namespace {

constexpr double kTiny = 1e-12;
constexpr double kOrthogonalityLimit = 1e-3;

double clean(double x) { return std::abs(x) < kTiny ? 0.0 : x; }

std::string pretty(Amplitude z) {
  std::ostringstream os;
  os << std::setprecision(6) << clean(z.real());
  const double im = clean(z.imag());
  os << (std::signbit(im) ? "-" : "+") << std::abs(im) << "i";
  return os.str();
}

std::string full_precision(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string mode_name(const ProtocolSpec& spec, std::size_t k) {
  return k < spec.mode_names.size() ? spec.mode_names[k] : "m" + std::to_string(k);
}

void print_branches(std::ostream& out, const ProtocolSpec& spec, const BranchState& state) {
  out << "    level";
  for (std::size_t k = 0; k < state.modes(); ++k) out << std::setw(16) << mode_name(spec, k);
  out << std::setw(16) << "coeff.re" << std::setw(16) << "coeff.im" << '\n';
  for (const auto& b : state.branches()) {
    out << "    " << std::setw(5) << to_string(b.atom);
    for (const auto& label : b.labels) out << std::setw(16) << pretty(label);
    out << std::setw(16) << std::setprecision(10) << clean(b.coeff.real()) << std::setw(16)
        << clean(b.coeff.imag()) << '\n';
  }
}

/// Common |alpha| of a four-mode protocol whose modes all share one magnitude.
std::optional<double> cluster_alpha(const ProtocolSpec& spec) {
  if (spec.modes() != 4) return std::nullopt;
  const double a = std::abs(spec.mode_init.front());
  for (const auto& label : spec.mode_init) {
    if (std::abs(std::abs(label) - a) > kTiny) return std::nullopt;
  }
  return a;
}

double max_label(const ProtocolSpec& spec) {
  double a = 0.0;
  for (const auto& label : spec.mode_init) a = std::max(a, std::abs(label));
  return a;
}

std::optional<AtomicLevel> level_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return text == "g" ? AtomicLevel::g : AtomicLevel::e;
}

int cmd_run(const std::string& path, double eta, std::ostream& out) {
  const ProtocolSpec spec = load_protocol(path);
  const RunResult result = run_protocol(spec);

  out << "protocol " << path << ": atom " << to_string(spec.atom_init) << ", " << spec.modes()
      << " mode(s), " << spec.steps.size() << " step(s)\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& entry = result.trace[i];
    out << "[" << i << "] " << entry.label << "  branches=" << entry.state.size()
        << "  norm=" << std::setprecision(15) << norm(entry.state) << '\n';
    print_branches(out, spec, entry.state);
  }

  const auto p = detection_probabilities(result.final_joint);
  out << std::setprecision(12) << "detection probabilities: p_g=" << p.g << " p_e=" << p.e << '\n';
  if (!result.detection) {
    out << "no detect step; field left entangled with the atom\n";
    return kSuccess;
  }
  const auto& detection = *result.detection;
  const DetectorModel detector{eta};
  detector.validate();
  out << "detected " << to_string(detection.level) << " with probability " << detection.probability << '\n';
  out << "success probability (eta=" << eta << "): " << eta * detection.probability << '\n';

  if (const auto alpha = cluster_alpha(spec)) {
    out << "fidelity against ideal cluster states (alpha=" << *alpha << "):\n";
    std::string best;
    double best_f = -1.0;
    for (const auto family : {ClusterFamily::standard, ClusterFamily::linear}) {
      for (const auto kind : {ClusterKind::chi1, ClusterKind::chi2, ClusterKind::chi3, ClusterKind::chi4}) {
        const double f = fidelity(ideal_cluster(kind, *alpha, family), detection.field);
        const auto name = cluster_name(kind, family);
        out << "  " << std::left << std::setw(16) << name << std::right << std::setprecision(12) << f << '\n';
        if (f > best_f) {
          best_f = f;
          best = name;
        }
      }
    }
    out << "best match: " << best << " (fidelity " << std::setprecision(15) << best_f << ")\n";
  }
  return kSuccess;
}

struct SweepOptions {
  std::string path;
  double v0 = 27.0;
  double dv = 2.0;
  std::string dist = "uniform";
  std::size_t samples = 201;
  bool alpha_check = false;
  std::string out_path;
  std::string detect;
  std::string perturb = "all";
};

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  const ProtocolSpec spec = load_protocol(opt.path);
  spec.validate();
  const auto detect = level_option(opt.detect) ? level_option(opt.detect) : spec.detect_level();
  if (!detect) {
    err << "error: sweep needs a detected level (detect step in the file or --detect)\n";
    return kParseError;
  }
  if (opt.samples < 3) {
    err << "error: sweeps need at least 3 samples\n";
    return kParseError;
  }
  VelocityModel model{opt.v0, opt.dv,
                      opt.dist == "uniform" ? VelocityDistribution::uniform : VelocityDistribution::gaussian,
                      opt.samples};
  if (opt.perturb == "ramsey") model.perturbed = PerturbedSteps::ramsey_only;
  if (opt.perturb == "disperse") model.perturbed = PerturbedSteps::dispersive_only;
  model.validate();

  if (opt.alpha_check) {
    const double margin = orthogonality_margin(max_label(spec));
    out << "orthogonality margin |<a|-a>| = " << std::setprecision(6) << margin
        << (margin <= kOrthogonalityLimit ? " (ok)" : " (WARNING: branches not orthogonal)") << '\n';
  }

  const FidelityCurve curve = mean_fidelity(spec, model, *detect);

  std::ofstream csv(opt.out_path, std::ios::binary | std::ios::trunc);
  if (!csv) {
    err << "error: cannot write '" << opt.out_path << "'\n";
    return kRuntimeError;
  }
  csv << "v_mps,theta_rad,phi_rad,p_g,p_e,fidelity\n";
  for (const auto& s : curve.samples) {
    csv << full_precision(s.v) << ',' << full_precision(s.theta) << ',' << full_precision(s.phi) << ','
        << full_precision(s.p_g) << ',' << full_precision(s.p_e) << ',' << full_precision(s.fidelity) << '\n';
  }
  csv.close();
  if (!csv) {
    err << "error: failed writing '" << opt.out_path << "'\n";
    return kRuntimeError;
  }

  out << "sweep " << opt.dist << " perturb=" << opt.perturb << " v0=" << opt.v0 << " dv=" << opt.dv << " samples=" << opt.samples
      << " detect=" << to_string(*detect) << ": mean_fidelity=" << full_precision(curve.mean)
      << " min_fidelity=" << full_precision(curve.min) << '\n';
  return kSuccess;
}

struct ParamsOptions {
  double g_khz = 51.0;
  double delta_over_g = 40.0;
  double waist_mm = 6.0;
  double nbar = 4.0;
  double tdamp_ms = 130.0;
  double tatom_ms = 30.0;
  std::string phi = "0.5pi";
  std::size_t kicks = 4;
  double dispersive_limit = 0.1;
  double budget_limit = 0.05;
};

int cmd_params(const ParamsOptions& opt, std::ostream& out, std::ostream& err) {
  for (const double v : {opt.g_khz, opt.delta_over_g, opt.waist_mm, opt.tdamp_ms, opt.tatom_ms}) {
    if (!(v > 0.0)) {
      err << "error: parameter values must be positive\n";
      return kParseError;
    }
  }
  if (!(opt.nbar >= 0.0)) {
    err << "error: --nbar must be non-negative\n";
    return kParseError;
  }
  if (opt.kicks < 1) {
    err << "error: --kicks must be at least 1\n";
    return kParseError;
  }
  double phi = 0.0;
  try {
    phi = parse_angle(opt.phi);
  } catch (const std::exception& e) {
    err << "error: --phi: " << e.what() << '\n';
    return kParseError;
  }

  CavityParams p;
  p.g = kTwoPi * opt.g_khz * 1e3;
  p.delta = opt.delta_over_g * p.g;
  p.waist = opt.waist_mm * 1e-3;
  p.t_damp = opt.tdamp_ms * 1e-3;
  p.t_atom = opt.tatom_ms * 1e-3;
  p.n_bar = opt.nbar;
  p.validate();
  const CheckThresholds limits{opt.dispersive_limit, opt.budget_limit};

  const double t = interaction_time(p, phi);
  const auto velocity = required_velocity(p, 2.0 * t);
  const double tau = total_time(p, opt.kicks, phi);
  const auto dispersive = dispersive_check(p, limits);
  const auto budget = budget_check(p, tau, limits);
  const double margin = orthogonality_margin(std::sqrt(p.n_bar));

  out << std::setprecision(6);
  out << "g = 2pi x " << opt.g_khz << " kHz, delta = " << opt.delta_over_g << " g, waist = " << opt.waist_mm
      << " mm, phi = " << phi << " rad\n";
  out << "interaction time per mode: " << t * 1e6 << " us\n";
  out << "required velocity: " << velocity.velocity << " m/s ("
      << (velocity.lab_feasible ? "within" : "outside") << " lab range 20-500 m/s)\n";
  out << "total time (" << opt.kicks << " kicks): " << tau * 1e3 << " ms\n";
  out << "dispersive check (n_bar per mode = " << p.n_bar << "): g*sqrt(n)/delta = " << dispersive.r1
      << ", g*n/delta = " << dispersive.r2 << " -> " << (dispersive.ok ? "ok" : "FAIL") << '\n';
  out << "budget check: tau/t_damp = " << budget.tau_over_tdamp << ", tau/t_atom = " << budget.tau_over_tatom
      << " -> " << (budget.ok ? "ok" : "FAIL") << '\n';
  out << "orthogonality margin |<a|-a>| (a = sqrt(n_bar)) = " << margin << " (log10 = " << std::log10(margin)
      << ")\n";
  return kSuccess;
}

int cmd_validate(const std::string& path, std::size_t n_max, std::ostream& out) {
  const ProtocolSpec spec = load_protocol(path);
  const auto report = cross_check(spec, n_max);
  out << "oracle cross-check, n_max=" << n_max << ", kernels=" << simd::to_string(simd::active_kernels().isa)
      << " (recommended n_max >= " << recommended_n_max(max_label(spec)) << ")\n";
  out << std::left << std::setw(28) << "step" << std::right << std::setw(24) << "1-fidelity" << std::setw(24)
      << "residual" << std::setw(24) << "|dp|" << '\n';
  for (const auto& s : report.steps) {
    out << std::left << std::setw(28) << s.label << std::right << std::setw(24) << std::setprecision(6)
        << 1.0 - s.fidelity << std::setw(24) << s.residual << std::setw(24) << s.probability_deviation << '\n';
  }
  if (!report.reliable()) {
    out << "truncation insufficient: residual " << report.max_residual << " >= " << kReliableResidual << '\n';
    return kValidationFailure;
  }
  if (!report.agrees()) {
    out << "engine disagreement: min fidelity " << std::setprecision(15) << report.min_fidelity
        << ", max probability deviation " << report.max_probability_deviation << '\n';
    return kValidationFailure;
  }
  out << "ok: engines agree\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bimodal-cavity cluster-state protocol simulator", "cqed"};
  app.require_subcommand(1);

  std::string file;
  double eta = 1.0;
  auto* run_cmd = app.add_subcommand("run", "Run a protocol file and report the heralded state");
  run_cmd->add_option("file", file, "Protocol file")->required();
  run_cmd->add_option("--eta", eta, "Detector efficiency")->check(CLI::Range(0.0, 1.0));

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Fidelity versus atomic velocity, written as CSV");
  sweep_cmd->add_option("file", sweep.path, "Protocol file")->required();
  sweep_cmd->add_option("--v0", sweep.v0, "Nominal velocity [m/s]");
  sweep_cmd->add_option("--dv", sweep.dv, "Velocity spread [m/s]");
  sweep_cmd->add_option("--dist", sweep.dist, "uniform | gauss")->check(CLI::IsMember({"uniform", "gauss"}));
  sweep_cmd->add_option("--samples", sweep.samples, "Grid points");
  sweep_cmd->add_flag("--alpha-check", sweep.alpha_check, "Report the coherent-state orthogonality margin");
  sweep_cmd->add_option("--out", sweep.out_path, "CSV output path")->required();
  sweep_cmd->add_option("--detect", sweep.detect, "Detected level (defaults to the file's detect step)")
      ->check(CLI::IsMember({"g", "e"}));
  sweep_cmd->add_option("--perturb", sweep.perturb, "Steps scaled by v0/v: all | ramsey | disperse")
      ->check(CLI::IsMember({"all", "ramsey", "disperse"}));

  ParamsOptions params;
  auto* params_cmd = app.add_subcommand("params", "Experimental timing and regime checks");
  params_cmd->add_option("--g-khz", params.g_khz, "Vacuum Rabi frequency g/2pi [kHz]");
  params_cmd->add_option("--delta-over-g", params.delta_over_g, "Detuning in units of g");
  params_cmd->add_option("--waist-mm", params.waist_mm, "Mode waist [mm]");
  params_cmd->add_option("--nbar", params.nbar, "Mean photon number per mode");
  params_cmd->add_option("--tdamp-ms", params.tdamp_ms, "Photon damping time [ms]");
  params_cmd->add_option("--tatom-ms", params.tatom_ms, "Atomic radiative time [ms]");
  params_cmd->add_option("--phi", params.phi, "Dispersive phase per mode");
  params_cmd->add_option("--kicks", params.kicks, "Number of dispersive interactions");
  params_cmd->add_option("--dispersive-limit", params.dispersive_limit, "Threshold for g sqrt(n)/delta");
  params_cmd->add_option("--budget-limit", params.budget_limit, "Threshold for tau / lifetime");

  std::size_t n_max = kDefaultNMax;
  auto* validate_cmd = app.add_subcommand("validate", "Cross-check the branch engine against the Fock oracle");
  validate_cmd->add_option("file", file, "Protocol file")->required();
  validate_cmd->add_option("--nmax", n_max, "Photon-number cutoff per mode")->check(CLI::PositiveNumber);

  std::vector<std::string> storage{"cqed"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParseError;
  }

  try {
    if (*run_cmd) return cmd_run(file, eta, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*params_cmd) return cmd_params(params, out, err);
    if (*validate_cmd) return cmd_validate(file, n_max, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kParseError;
}

}  // namespace cqed::cli
