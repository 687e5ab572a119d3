// Command-line front end: analyze / synthesize / compose / crosscheck.
//
// Exit codes, shared convention: 0 and 1 encode the mathematical outcome
// (see each subcommand's help), 2 encodes a split or failed verification,
// and 3 any usage, parse, or numerical error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "outctrl/controllability.hpp"
#include "outctrl/lti_model.hpp"
#include "outctrl/numerics.hpp"
#include "outctrl/synthesis.hpp"

namespace {

using nlohmann::json;
using namespace outctrl;

constexpr int kExitError = 3;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------------------
// JSON rendering

json complex_to_json(const Complex& z) {
  if (z.imag() == 0.0) return json(z.real());
  return json::array({z.real(), z.imag()});
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(complex_to_json(v(i)));
  }
  return arr;
}

json real_vector_to_json(const RealVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["controllable"] = v.controllable;
  j["criterion"] = to_string(v.criterion);
  j["required_rank"] = v.required_rank;
  j["found_rank"] = v.found_rank;
  j["evidence"] = real_vector_to_json(v.singular_values);
  j["threshold"] = v.threshold;
  if (v.witness.has_value()) {
    j["witness"] = json::array({v.witness->real(), v.witness->imag()});
  }
  return j;
}

json system_summary_json(const LtiSystem& sys) {
  json j;
  if (!sys.name.empty()) j["name"] = sys.name;
  j["n"] = sys.state_dim();
  j["m"] = sys.input_dim();
  j["p"] = sys.output_dim();
  return j;
}

json tolerance_json(const ToleranceConfig& tol) {
  return json{{"rank_rtol", tol.rank_rtol},
              {"eig_cluster_atol", tol.eig_cluster_atol},
              {"psd_atol", tol.psd_atol}};
}

void emit(const json& report, const std::string& format,
          const std::string& out_path, const std::string& human_text) {
  if (format == "json") {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << human_text;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write '" + out_path + "'");
    out << report.dump(2) << "\n";
  }
}

std::string describe_verdict(const Verdict& v) {
  std::ostringstream os;
  os << (v.controllable ? "controllable    " : "NOT controllable")
     << "  rank " << v.found_rank << "/" << v.required_rank << "  cutoff "
     << sci(v.threshold);
  if (v.witness.has_value()) {
    os << "  witness z = " << v.witness->real();
    if (v.witness->imag() != 0.0) {
      os << (v.witness->imag() < 0 ? " - " : " + ")
         << std::abs(v.witness->imag()) << "i";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Inline-JSON or file-reference vector arguments

Vector parse_vector_argument(const std::string& text, const char* what) {
  std::string trimmed = text;
  const auto first = trimmed.find_first_not_of(" \t\n");
  if (first == std::string::npos) {
    throw ParseError(std::string(what) + ": empty argument");
  }
  trimmed = trimmed.substr(first);

  json j;
  if (trimmed.front() == '[') {
    try {
      j = json::parse(trimmed);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": " + e.what());
    }
  } else {  // treat as a path to a JSON array file
    std::ifstream in(trimmed);
    if (!in) {
      throw ParseError(std::string(what) + ": cannot open '" + trimmed + "'");
    }
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": '" + trimmed + "': " + e.what());
    }
  }
  if (!j.is_array() || j.empty()) {
    throw ParseError(std::string(what) + " must be a non-empty JSON array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    const json& entry = j[i];
    if (entry.is_number()) {
      v(static_cast<Eigen::Index>(i)) = Complex(entry.get<double>(), 0.0);
    } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() &&
               entry[1].is_number()) {
      v(static_cast<Eigen::Index>(i)) =
          Complex(entry[0].get<double>(), entry[1].get<double>());
    } else {
      throw ParseError(std::string(what) + ": entry " + std::to_string(i) +
                       " must be a number or an [re, im] pair");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// analyze

int run_analyze(const std::string& path, double horizon,
                const ToleranceConfig& tol, const std::string& format,
                const std::string& out_path) {
  const LtiSystem sys = load_system(path);
  const CrossCheckReport report = cross_check(sys, horizon, tol);

  std::string decision;
  int exit_code;
  if (report.agree) {
    decision = report.kalman.controllable ? "controllable" : "not_controllable";
    exit_code = report.kalman.controllable ? 0 : 1;
  } else {
    decision = "disagreement";
    exit_code = 2;
  }

  json j;
  j["file"] = path;
  j["system"] = system_summary_json(sys);
  j["horizon"] = report.gramian_horizon;
  j["tolerances"] = tolerance_json(report.tolerance);
  j["verdicts"] = {{"kalman", verdict_to_json(report.kalman)},
                   {"hautus_output", verdict_to_json(report.hautus)},
                   {"gramian", verdict_to_json(report.gramian)}};
  j["agree"] = report.agree;
  j["near_threshold"] = report.near_threshold;
  j["decision"] = decision;
  j["exit_code"] = exit_code;

  std::ostringstream os;
  os << "system" << (sys.name.empty() ? "" : " '" + sys.name + "'") << ": n="
     << sys.state_dim() << ", m=" << sys.input_dim() << ", p="
     << sys.output_dim() << "  (" << path << ")\n"
     << "  kalman  : " << describe_verdict(report.kalman) << "\n"
     << "  hautus  : " << describe_verdict(report.hautus) << "\n"
     << "  gramian : " << describe_verdict(report.gramian) << "  (t="
     << report.gramian_horizon << ")\n";
  if (report.agree) {
    os << "decision: "
       << (report.kalman.controllable ? "output controllable"
                                      : "not output controllable")
       << " (all criteria agree)\n";
  } else {
    os << "decision: criteria DISAGREE"
       << (report.near_threshold ? " (evidence within 10x of a cutoff)" : "")
       << "\n";
  }
  emit(j, format, out_path, os.str());
  return exit_code;
}

// ---------------------------------------------------------------------------
// synthesize

int run_synthesize(const std::string& path, const std::string& x0_arg,
                   const std::string& target_arg, double horizon, int grid,
                   double rtol, const ToleranceConfig& tol,
                   const std::string& format, const std::string& out_path) {
  const LtiSystem sys = load_system(path);
  SteeringProblem problem;
  problem.sys = sys;
  problem.horizon = horizon;
  problem.y_target = parse_vector_argument(target_arg, "--target");
  problem.x0 = x0_arg.empty()
                   ? Vector(Vector::Zero(sys.state_dim()))
                   : parse_vector_argument(x0_arg, "--x0");

  json j;
  j["file"] = path;
  j["system"] = system_summary_json(sys);
  j["horizon"] = horizon;
  j["grid"] = grid;
  j["rtol"] = rtol;

  try {
    const SteeringResult result = min_norm_control(problem, grid, tol);
    const bool verified = verify_steering(problem, result, rtol);
    save_control(result.control, out_path);

    j["predicted_output"] = vector_to_json(result.predicted_output);
    j["residual"] = result.residual;
    j["energy"] = result.energy;
    j["verified"] = verified;
    j["control_file"] = out_path;
    j["exit_code"] = verified ? 0 : 2;

    std::ostringstream os;
    os << "synthesized minimum-energy control: " << grid << " nodes on [0, "
       << horizon << "]\n"
       << "  residual : " << sci(result.residual) << "\n"
       << "  energy   : " << sci(result.energy) << "\n"
       << "  verified (rtol " << sci(rtol) << "): " << yes_no(verified) << "\n"
       << "control written to " << out_path << "\n";
    emit(j, format, "", os.str());
    return verified ? 0 : 2;
  } catch (const NotOutputControllableError& e) {
    j["refused"] = true;
    j["reason"] = e.what();
    j["verdict"] = verdict_to_json(e.verdict());
    j["exit_code"] = 1;
    std::ostringstream os;
    os << "refused: system is not output controllable\n  "
       << describe_verdict(e.verdict()) << "\n";
    emit(j, format, "", os.str());
    return 1;
  } catch (const TargetUnreachableError& e) {
    j["refused"] = true;
    j["reason"] = e.what();
    j["residual"] = e.residual();
    j["exit_code"] = 2;
    std::ostringstream os;
    os << "target unreachable: " << e.what() << "\n";
    emit(j, format, "", os.str());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// compose

int run_compose(const std::vector<std::string>& paths,
                const ToleranceConfig& tol, const std::string& format,
                const std::string& out_path) {
  SystemCollection members;
  members.reserve(paths.size());
  for (const std::string& p : paths) members.push_back(load_system(p));

  const ParallelCheck check = parallel_sufficiency_check(members, tol);
  save_system(check.connected, out_path);

  json j;
  j["files"] = paths;
  j["connected"] = system_summary_json(check.connected);
  json member_reports = json::array();
  for (size_t i = 0; i < members.size(); ++i) {
    json mj = system_summary_json(members[i]);
    mj["verdict"] = verdict_to_json(check.member_verdicts[i]);
    member_reports.push_back(std::move(mj));
  }
  j["members"] = std::move(member_reports);
  j["disjoint_spectra"] = check.disjoint_spectra;
  if (std::isfinite(check.min_spectral_gap)) {
    j["min_spectral_gap"] = check.min_spectral_gap;
  }
  j["sufficiency_applicable"] = check.applicable;
  j["connected_verdict"] = verdict_to_json(check.connected_verdict);
  j["composed_file"] = out_path;
  const int exit_code = check.connected_verdict.controllable ? 0 : 1;
  j["exit_code"] = exit_code;

  std::ostringstream os;
  os << "parallel connection of " << members.size() << " member(s): n="
     << check.connected.state_dim() << ", m=" << check.connected.input_dim()
     << ", p=" << check.connected.output_dim() << "\n";
  for (size_t i = 0; i < members.size(); ++i) {
    os << "  member " << i
       << (members[i].name.empty() ? "" : " '" + members[i].name + "'") << ": "
       << describe_verdict(check.member_verdicts[i]) << "\n";
  }
  os << "  spectra pairwise disjoint: " << yes_no(check.disjoint_spectra);
  if (std::isfinite(check.min_spectral_gap)) {
    os << " (min gap " << sci(check.min_spectral_gap) << ")";
  }
  os << "\n  sufficiency applicable: " << yes_no(check.applicable) << "\n"
     << "  connected system: " << describe_verdict(check.connected_verdict)
     << "\ncomposed system written to " << out_path << "\n";
  emit(j, format, "", os.str());
  return exit_code;
}

// ---------------------------------------------------------------------------
// crosscheck

struct DimRange {
  int n_max = 6;
  int m_max = 4;
  int p_max = 4;
};

DimRange parse_dims(const std::string& text) {
  DimRange dims;
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> dims.n_max >> c1 >> dims.m_max >> c2 >> dims.p_max) ||
      c1 != ',' || c2 != ',' || dims.n_max < 1 || dims.m_max < 1 ||
      dims.p_max < 1) {
    throw DomainError("--dims expects \"n_max,m_max,p_max\" with entries >= 1");
  }
  return dims;
}

std::vector<SystemKind> parse_kinds(const std::string& text) {
  std::vector<SystemKind> kinds;
  std::istringstream is(text);
  std::string token;
  while (std::getline(is, token, ',')) {
    if (!token.empty()) kinds.push_back(system_kind_from_string(token));
  }
  if (kinds.empty()) {
    throw DomainError("--kinds expects a comma-separated list of kinds");
  }
  return kinds;
}

int run_crosscheck(std::uint64_t seed, int samples, const DimRange& dims,
                   const std::vector<SystemKind>& kinds, double horizon,
                   const ToleranceConfig& tol, const std::string& format,
                   const std::string& out_path) {
  int agree = 0;
  int controllable = 0;
  int not_controllable = 0;
  int escaped = 0;
  json failures = json::array();

  for (int i = 0; i < samples; ++i) {
    const std::uint64_t sample_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    int n = 1 + static_cast<int>(mix_seed(sample_seed, 1) %
                                 static_cast<std::uint64_t>(dims.n_max));
    int m = 1 + static_cast<int>(mix_seed(sample_seed, 2) %
                                 static_cast<std::uint64_t>(dims.m_max));
    int p = 1 + static_cast<int>(mix_seed(sample_seed, 3) %
                                 static_cast<std::uint64_t>(dims.p_max));
    const SystemKind kind = kinds[static_cast<size_t>(i) % kinds.size()];
    if (kind == SystemKind::kForcedOutputControllable) {
      if (m < p) std::swap(m, p);
      p = std::min(p, n);
    }

    const LtiSystem sys =
        random_system(n, m, p, mix_seed(sample_seed, 4), kind);
    const CrossCheckReport report = cross_check(sys, horizon, tol);

    if (report.agree) {
      ++agree;
      if (report.kalman.controllable) {
        ++controllable;
      } else {
        ++not_controllable;
      }
    } else if (report.near_threshold) {
      ++escaped;
    } else {
      json f;
      f["index"] = i;
      f["kind"] = to_string(kind);
      f["system"] = to_json(sys);
      f["verdicts"] = {{"kalman", verdict_to_json(report.kalman)},
                       {"hautus_output", verdict_to_json(report.hautus)},
                       {"gramian", verdict_to_json(report.gramian)}};
      failures.push_back(std::move(f));
    }
  }
  const int unescaped = static_cast<int>(failures.size());

  json j;
  j["seed"] = seed;
  j["samples"] = samples;
  j["dims_max"] = {dims.n_max, dims.m_max, dims.p_max};
  json kind_names = json::array();
  for (SystemKind k : kinds) kind_names.push_back(to_string(k));
  j["kinds"] = std::move(kind_names);
  j["horizon"] = horizon;
  j["tolerances"] = tolerance_json(tol);
  j["agreements"] = agree;
  j["decisions"] = {{"controllable", controllable},
                    {"not_controllable", not_controllable}};
  j["escaped_disagreements"] = escaped;
  j["unescaped_disagreements"] = unescaped;
  j["failures"] = std::move(failures);
  const int exit_code = unescaped == 0 ? 0 : 1;
  j["exit_code"] = exit_code;

  std::ostringstream os;
  os << "cross-check: " << samples << " samples, seed " << seed
     << ", dims <= (" << dims.n_max << ", " << dims.m_max << ", " << dims.p_max
     << "), t=" << horizon << "\n"
     << "  controllable      : " << controllable << "\n"
     << "  not controllable  : " << not_controllable << "\n"
     << "  disagreements     : " << (escaped + unescaped) << " (escaped "
     << escaped << ", unescaped " << unescaped << ")\n";
  if (unescaped == 0) {
    os << "criteria agree on every sample (near-threshold escapes excluded)\n";
  } else {
    os << "UNESCAPED DISAGREEMENTS FOUND; offending systems dumped in the "
          "JSON report\n";
  }
  emit(j, format, out_path, os.str());
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "output controllability analysis and minimum-energy control synthesis "
      "for LTI systems"};
  app.require_subcommand(1);

  ToleranceConfig tol;
  std::string format = "human";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol-rank", tol.rank_rtol,
                    "relative singular-value cutoff for rank decisions");
    cmd->add_option("--tol-psd", tol.psd_atol,
                    "definiteness floor for Gramian eigenvalues");
    cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"human", "json"}));
  };

  // analyze
  std::string analyze_path;
  double analyze_t = 1.0;
  std::string analyze_out;
  CLI::App* analyze = app.add_subcommand(
      "analyze",
      "run all three output controllability criteria on a system file "
      "(exit 0 controllable, 1 not, 2 criteria disagree, 3 error)");
  analyze->add_option("system", analyze_path, "system JSON file")->required();
  analyze->add_option("-t,--time", analyze_t, "Gramian horizon t > 0");
  analyze->add_option("--out", analyze_out, "also write the JSON report here");
  add_common(analyze);

  // synthesize
  std::string synth_path, synth_x0, synth_target;
  double synth_T = 1.0;
  int synth_grid = 257;
  double synth_rtol = 1e-6;
  std::string synth_out = "control.json";
  CLI::App* synthesize = app.add_subcommand(
      "synthesize",
      "compute the minimum-energy control steering the output to a target "
      "(exit 0 verified, 1 refused, 2 unreachable/verification failed, "
      "3 error)");
  synthesize->add_option("system", synth_path, "system JSON file")->required();
  synthesize
      ->add_option("--target", synth_target,
                   "target output: inline JSON array or a file holding one")
      ->required();
  synthesize->add_option(
      "--x0", synth_x0,
      "initial state: inline JSON array or a file (default: origin)");
  synthesize->add_option("-T,--horizon", synth_T, "steering horizon T > 0");
  synthesize->add_option("--grid", synth_grid,
                         "control grid nodes (4k+1, k >= 1)");
  synthesize->add_option("--rtol", synth_rtol,
                         "verification tolerance on |y(T) - target|");
  synthesize->add_option("--out", synth_out, "control JSON output path");
  add_common(synthesize);

  // compose
  std::vector<std::string> compose_paths;
  std::string compose_out = "composed.json";
  CLI::App* compose = app.add_subcommand(
      "compose",
      "connect systems in parallel and check the disjoint-spectra "
      "sufficiency condition (exit 0 connected system controllable, 1 not, "
      "3 error)");
  compose->add_option("systems", compose_paths, "system JSON files")
      ->required()
      ->expected(-1);
  compose->add_option("--out", compose_out, "composed system output path");
  add_common(compose);

  // crosscheck
  std::uint64_t cc_seed = 0;
  int cc_samples = 100;
  std::string cc_dims = "6,4,4";
  std::string cc_kinds = "generic,rank_deficient_C,jordan";
  double cc_t = 1.0;
  std::string cc_out;
  CLI::App* crosscheck = app.add_subcommand(
      "crosscheck",
      "run all criteria on seeded random systems and report disagreements "
      "(exit 0 none unescaped, 1 otherwise, 3 error)");
  crosscheck->add_option("--seed", cc_seed, "ensemble seed")->required();
  crosscheck->add_option("--samples", cc_samples, "number of systems")
      ->check(CLI::PositiveNumber);
  crosscheck->add_option("--dims", cc_dims, "maximum dimensions n,m,p");
  crosscheck->add_option("--kinds", cc_kinds,
                         "comma-separated generator kinds");
  crosscheck->add_option("-t,--time", cc_t, "Gramian horizon t > 0");
  crosscheck->add_option("--out", cc_out, "also write the JSON report here");
  add_common(crosscheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    tol.validate();
    if (*analyze) {
      return run_analyze(analyze_path, analyze_t, tol, format, analyze_out);
    }
    if (*synthesize) {
      return run_synthesize(synth_path, synth_x0, synth_target, synth_T,
                            synth_grid, synth_rtol, tol, format, synth_out);
    }
    if (*compose) {
      return run_compose(compose_paths, tol, format, compose_out);
    }
    if (*crosscheck) {
      return run_crosscheck(cc_seed, cc_samples, parse_dims(cc_dims),
                            parse_kinds(cc_kinds), cc_t, tol, format, cc_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
