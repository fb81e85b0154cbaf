// Copyright 2026 The gaussprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "gaussprep/gaussprep.hpp"
#include "gaussprep/reporting.hpp"
#include "gaussprep/serialization.hpp"

namespace {

using namespace gaussprep;
using io::json;

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("GAUSSPREP_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string value(env);
  if (value == "quiet") return LogLevel::quiet;
  if (value == "debug") return LogLevel::debug;
  return LogLevel::info;
}

struct JobConfig {
  std::string input;
  std::optional<json> params;
  std::optional<json> gains;
  double alpha = 0.3;
  double t_final = 0.0;  // 0 = derive from the spectral abscissa
  double dt = 0.0;       // 0 = derive from the spectral abscissa
  int stride = 0;        // 0 = keep about 1000 records
  double tol = defaults::membership_tol;
  double convergence_tol = 1e-6;
  std::uint64_t seed = 0;
  double random_mean_scale = 0.0;
  bool csv_covariances = false;
  std::string out_report;
  std::string out_csv;
  std::string out_dot;
};

JobConfig load_config(const std::string& path) {
  JobConfig config;
  if (path.empty()) return config;
  const json doc = io::load_json(path);
  if (doc.contains("input")) config.input = doc["input"].get<std::string>();
  if (doc.contains("params")) config.params = doc["params"];
  if (doc.contains("gains")) config.gains = doc["gains"];
  if (doc.contains("alpha")) config.alpha = doc["alpha"].get<double>();
  if (doc.contains("t_final")) config.t_final = doc["t_final"].get<double>();
  if (doc.contains("dt")) config.dt = doc["dt"].get<double>();
  if (doc.contains("stride")) config.stride = doc["stride"].get<int>();
  if (doc.contains("tol")) config.tol = doc["tol"].get<double>();
  if (doc.contains("convergence_tol"))
    config.convergence_tol = doc["convergence_tol"].get<double>();
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("random_mean_scale"))
    config.random_mean_scale = doc["random_mean_scale"].get<double>();
  if (doc.contains("csv_covariances")) config.csv_covariances = doc["csv_covariances"].get<bool>();
  if (doc.contains("out_report")) config.out_report = doc["out_report"].get<std::string>();
  if (doc.contains("out_csv")) config.out_csv = doc["out_csv"].get<std::string>();
  if (doc.contains("out_dot")) config.out_dot = doc["out_dot"].get<std::string>();
  require(config.tol > 0.0 && config.convergence_tol > 0.0, errc::bad_config,
          "tolerances must be positive");
  return config;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void emit(const io::Report& report, const JobConfig& config) {
  const bool debug = log_level() == LogLevel::debug;
  if (!config.out_report.empty()) {
    io::save_json(io::to_json(report, debug), config.out_report);
  }
  if (log_level() != LogLevel::quiet) {
    for (const auto& [name, verdict] : report.verdicts) {
      std::cout << name << ": " << (verdict.pass ? "pass" : "FAIL");
      if (!verdict.detail.empty()) std::cout << " (" << verdict.detail << ")";
      std::cout << '\n';
    }
  }
  if (debug) {
    for (const auto& [name, ms] : report.timings_ms)
      std::cerr << "[timing] " << name << ": " << ms << " ms\n";
  }
}

GraphMatrix load_graph_input(const JobConfig& config) {
  require(!config.input.empty(), errc::bad_config, "an input document is required (--input)");
  const json doc = io::load_json(config.input);
  return io::graph_from_json(doc);
}

Gains gains_for(const JobConfig& config, int n_modes) {
  if (config.gains) return io::gains_from_json(*config.gains);
  return default_gains(n_modes);
}

int cmd_family_build(const JobConfig& config) {
  require(config.params.has_value(), errc::bad_config,
          "family-build needs a 'params' object in the config document");
  const FamilyParams params = io::family_params_from_json(*config.params);
  const GraphMatrix g = build_graph(params);

  io::Report report;
  report.command = "family-build";
  report.verdicts["built"] = {true, defaults::validation_tol,
                              "n_modes=" + std::to_string(g.n_modes())};
  emit(report, config);
  if (!config.out_report.empty()) {
    // The written document doubles as a loadable graph file.
    json doc = io::to_json(g);
    doc["params"] = io::to_json(params);
    io::save_json(doc, config.out_report);
  } else if (log_level() != LogLevel::quiet) {
    std::cout << io::to_json(g).dump(2) << '\n';
  }
  return 0;
}

int cmd_check(const JobConfig& config) {
  const GraphMatrix g = load_graph_input(config);
  Stopwatch watch;
  const MembershipResult result = membership(g, config.tol);

  io::Report report;
  report.command = "check";
  report.timings_ms["membership"] = watch.ms();
  io::Verdict verdict;
  verdict.tol = config.tol;
  verdict.pass = result.accepted();
  if (result.accepted()) {
    verdict.detail = "ell=" + std::to_string(result.certificate->ell());
    report.certificate = io::to_json(*result.certificate);
  } else {
    verdict.detail = std::string(to_string(result.reason)) +
                     (result.detail.empty() ? "" : ": " + result.detail);
  }
  report.verdicts["membership"] = verdict;
  emit(report, config);
  return report.all_passed() ? 0 : 1;
}

void fill_system_verdicts(io::Report& report, const GraphMatrix& g, const SystemRealization& real,
                          const DriftDiffusion& dd, double tol) {
  report.verdicts["passivity"] = {is_passive(real.G, std::max(tol, 1e-9)), std::max(tol, 1e-9), ""};
  const auto [local, mode] = is_local_single(real.C, std::max(tol, 1e-9));
  report.verdicts["locality"] = {local && mode == real.ell, std::max(tol, 1e-9),
                                 "ell=" + std::to_string(mode)};
  const ControllabilityReport ctrl = controllability(g, real.R, real.Gamma, real.P);
  report.verdicts["controllability"] = {
      ctrl.controllable, defaults::rank_tol,
      "rank=" + std::to_string(ctrl.rank) + "/" + std::to_string(real.n_modes)};
  report.verdicts["stability"] = {is_strictly_stable(dd), defaults::stability_margin,
                                  "spectral_abscissa=" + std::to_string(dd.spectral_abscissa)};
}

int cmd_synthesize(const JobConfig& config) {
  const GraphMatrix g = load_graph_input(config);
  io::Report report;
  report.command = "synthesize";

  Stopwatch watch;
  const MembershipResult result = membership(g, config.tol);
  report.timings_ms["membership"] = watch.ms();
  if (!result.accepted()) {
    report.verdicts["membership"] = {false, config.tol, std::string(to_string(result.reason))};
    emit(report, config);
    return 1;
  }
  report.verdicts["membership"] = {true, config.tol,
                                   "ell=" + std::to_string(result.certificate->ell())};
  report.certificate = io::to_json(*result.certificate);

  Stopwatch synth_watch;
  const SystemRealization real =
      synthesize(g, *result.certificate, gains_for(config, g.n_modes()));
  report.timings_ms["synthesize"] = synth_watch.ms();
  report.realization = io::to_json(real);

  const DriftDiffusion dd = assemble_dynamics(real.G, real.C);
  fill_system_verdicts(report, g, real, dd, config.tol);

  if (!config.out_dot.empty()) {
    std::ofstream out(config.out_dot);
    require(out.good(), errc::io_failure, "cannot open '" + config.out_dot + "'");
    out << io::topology_dot(real);
  }
  emit(report, config);
  return report.all_passed() ? 0 : 1;
}

int cmd_simulate(const JobConfig& config) {
  require(!config.input.empty(), errc::bad_config, "an input document is required (--input)");
  const json doc = io::load_json(config.input);
  io::Report report;
  report.command = "simulate";

  SystemRealization real;
  std::optional<CovarianceMatrix> target;
  const auto kind = doc.contains("kind") ? doc["kind"].get<std::string>() : std::string("graph");
  if (kind == "realization") {
    real = io::realization_from_json(doc);
  } else {
    const GraphMatrix g = io::graph_from_json(doc);
    real = synthesize(g, gains_for(config, g.n_modes()), config.tol);
    target = cov_from_graph(g);
  }

  const DriftDiffusion dd = assemble_dynamics(real.G, real.C);
  report.verdicts["stability"] = {is_strictly_stable(dd), defaults::stability_margin,
                                  "spectral_abscissa=" + std::to_string(dd.spectral_abscissa)};
  if (!is_strictly_stable(dd)) {
    emit(report, config);
    return 1;
  }

  Stopwatch lyap_watch;
  const CovarianceMatrix steady = steady_state(dd);
  report.timings_ms["steady_state"] = lyap_watch.ms();
  if (!target) target = steady;
  report.steady_state_purity = purity(steady);

  const double rate = std::abs(dd.spectral_abscissa);
  const double t_final = config.t_final > 0.0 ? config.t_final : 20.0 / rate;
  const double dt = config.dt > 0.0 ? config.dt : default_dt(dd);
  const auto steps = static_cast<long>(std::ceil(t_final / dt));
  const int stride =
      config.stride > 0 ? config.stride : static_cast<int>(std::max<long>(1, steps / 1000));

  const int dim = 2 * real.n_modes;
  const CovarianceMatrix v0{0.5 * Eigen::MatrixXd::Identity(dim, dim)};
  Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(dim);
  if (config.random_mean_scale != 0.0) {
    NormalSampler rng(config.seed);
    for (int i = 0; i < dim; ++i) mean0(i) = config.random_mean_scale * rng();
  }

  Stopwatch rk_watch;
  const TrajectoryRecord traj = integrate(dd, v0, mean0, t_final, dt, target, stride);
  report.timings_ms["integrate"] = rk_watch.ms();

  const ConvergenceSummary summary = convergence_report(traj, dd.spectral_abscissa);
  report.final_distance = summary.final_distance;
  report.verdicts["converged"] = {summary.final_distance <= config.convergence_tol,
                                  config.convergence_tol,
                                  "final_distance=" + std::to_string(summary.final_distance)};
  json extra = io::to_json(summary);
  extra["mean_norm_final"] = traj.means.back().norm();
  report.entanglement = std::nullopt;
  report.realization = io::to_json(real);
  report.certificate = std::nullopt;

  if (!config.out_csv.empty()) {
    io::write_trajectory_csv(traj, config.out_csv, config.csv_covariances);
  }
  if (!config.out_report.empty()) {
    json out = io::to_json(report, log_level() == LogLevel::debug);
    out["convergence"] = extra;
    io::save_json(out, config.out_report);
  }
  if (log_level() != LogLevel::quiet) {
    for (const auto& [name, verdict] : report.verdicts)
      std::cout << name << ": " << (verdict.pass ? "pass" : "FAIL") << " (" << verdict.detail
                << ")\n";
  }
  return report.all_passed() ? 0 : 1;
}

int cmd_analyze(const JobConfig& config) {
  require(!config.input.empty(), errc::bad_config, "an input document is required (--input)");
  const json doc = io::load_json(config.input);
  const io::MatrixDocument input = io::matrix_document_from_json(doc);
  const CovarianceMatrix cov = std::holds_alternative<GraphMatrix>(input)
                                   ? cov_from_graph(std::get<GraphMatrix>(input))
                                   : std::get<CovarianceMatrix>(input);

  io::Report report;
  report.command = "analyze";
  const std::vector<double> nus = symplectic_eigenvalues(cov.V);
  const bool physical = nus.front() >= 0.5 * (1.0 - 1e3 * config.tol);
  report.verdicts["physical"] = {physical, config.tol,
                                 "min_symplectic_eigenvalue=" + std::to_string(nus.front())};
  report.steady_state_purity = purity(cov);

  Stopwatch watch;
  const EntanglementMap map = entanglement_map(cov, config.tol);
  report.timings_ms["entanglement_map"] = watch.ms();
  report.entanglement = io::to_json(map);

  emit(report, config);
  return report.all_passed() ? 0 : 1;
}

int cmd_demo(const JobConfig& config) {
  const double alpha = config.alpha;
  io::Report report;
  report.command = "demo";
  Stopwatch total;

  const GraphMatrix expected = presets::five_mode_chain_graph(alpha);
  const FamilyParams params = presets::five_mode_chain_params(alpha);
  const GraphMatrix g = build_graph(params);
  report.verdicts["graph_matches_closed_form"] = {
      max_abs(Eigen::MatrixXd(g.X - expected.X)) <= 1e-12 &&
          max_abs(Eigen::MatrixXd(g.Y - expected.Y)) <= 1e-12,
      1e-12, ""};

  const MembershipResult result = membership(g, config.tol);
  const bool member_ok = result.accepted() && result.certificate->ell() == 3 &&
                         std::abs(result.certificate->zbar - params.zbar) <= 1e-9;
  report.verdicts["membership"] = {member_ok, config.tol,
                                   result.accepted()
                                       ? "ell=" + std::to_string(result.certificate->ell())
                                       : std::string(to_string(result.reason))};
  if (result.accepted()) report.certificate = io::to_json(*result.certificate);

  const MembershipCertificate cert = certificate_from_params(params);
  const SystemRealization real = synthesize(g, cert, presets::five_mode_chain_gains(alpha));
  report.realization = io::to_json(real);

  report.verdicts["interaction_matrix"] = {
      max_abs(Eigen::MatrixXd(real.R - presets::five_mode_chain_interaction())) <= 1e-12 &&
          max_abs(real.Gamma) <= 1e-12,
      1e-12, "tridiagonal integer couplings"};

  Eigen::MatrixXd block_diag = Eigen::MatrixXd::Zero(10, 10);
  block_diag.topLeftCorner(5, 5) = real.R;
  block_diag.bottomRightCorner(5, 5) = real.R;
  report.verdicts["hamiltonian_passive"] = {
      is_passive(real.G) && max_abs(Eigen::MatrixXd(real.G - block_diag)) <= 1e-9, 1e-9, ""};

  // The coupling must act on mode 3 as cosh(alpha) a + sinh(alpha) a*.
  const Complex cq = real.C(0, 2);
  const Complex cp = real.C(0, 7);
  const Complex coeff_a = (cq - Complex(0, 1) * cp) / std::sqrt(2.0);
  const Complex coeff_adag = (cq + Complex(0, 1) * cp) / std::sqrt(2.0);
  double off_support = 0.0;
  for (int j = 0; j < 10; ++j) {
    if (j == 2 || j == 7) continue;
    off_support = std::max(off_support, std::abs(real.C(0, j)));
  }
  report.verdicts["coupling_operator"] = {
      std::abs(coeff_a - std::cosh(alpha)) <= 1e-12 &&
          std::abs(coeff_adag - std::sinh(alpha)) <= 1e-12 && off_support <= 1e-12,
      1e-12, "cosh/sinh ladder coefficients on mode 3"};

  const ControllabilityReport ctrl = controllability(g, real.R, real.Gamma, real.P);
  report.verdicts["controllability"] = {ctrl.controllable && ctrl.rank == 5, defaults::rank_tol,
                                        "rank=" + std::to_string(ctrl.rank) + "/5"};

  const DriftDiffusion dd = assemble_dynamics(real.G, real.C);
  report.verdicts["stability"] = {is_strictly_stable(dd), defaults::stability_margin,
                                  "spectral_abscissa=" + std::to_string(dd.spectral_abscissa)};

  const CovarianceMatrix target = cov_from_graph(g);
  const CovarianceMatrix steady = steady_state(dd);
  const double steady_error = frobenius_distance(steady, target);
  report.steady_state_purity = purity(steady);
  report.verdicts["steady_state"] = {steady_error <= 1e-8 &&
                                         std::abs(*report.steady_state_purity - 1.0) <= 1e-9,
                                     1e-8, "distance=" + std::to_string(steady_error)};

  const EntanglementMap map = entanglement_map(steady);
  report.entanglement = io::to_json(map);
  const double expected_e = 2.0 * std::abs(alpha);
  double off_pair_max = 0.0;
  for (int j = 0; j < 5; ++j) {
    for (int k = j + 1; k < 5; ++k) {
      if ((j == 0 && k == 4) || (j == 1 && k == 3)) continue;
      off_pair_max = std::max(off_pair_max, map.pair_values(j, k));
    }
  }
  report.verdicts["entanglement_pairs"] = {
      std::abs(map.pair_values(0, 4) - expected_e) <= 1e-9 &&
          std::abs(map.pair_values(1, 3) - expected_e) <= 1e-9 && off_pair_max < 1e-9,
      1e-9, "E(1,5)=E(2,4)=2|alpha|"};

  const double rate = std::abs(dd.spectral_abscissa);
  const double t_final = config.t_final > 0.0 ? config.t_final : 20.0 / rate;
  const double dt = config.dt > 0.0 ? config.dt : default_dt(dd);
  NormalSampler rng(config.seed == 0 ? 42 : config.seed);
  Eigen::VectorXd mean0(10);
  for (int i = 0; i < 10; ++i) mean0(i) = rng();
  const auto steps = static_cast<long>(std::ceil(t_final / dt));
  const int stride =
      config.stride > 0 ? config.stride : static_cast<int>(std::max<long>(1, steps / 1000));
  const TrajectoryRecord traj =
      integrate(dd, CovarianceMatrix{0.5 * Eigen::MatrixXd::Identity(10, 10)}, mean0, t_final, dt,
                target, stride);
  const ConvergenceSummary summary = convergence_report(traj, dd.spectral_abscissa);
  report.final_distance = summary.final_distance;
  report.verdicts["dynamics_convergence"] = {
      summary.final_distance <= 1e-6 && traj.means.back().norm() <= 1e-6, 1e-6,
      "final_distance=" + std::to_string(summary.final_distance)};

  report.timings_ms["total"] = total.ms();
  if (!config.out_csv.empty()) {
    io::write_trajectory_csv(traj, config.out_csv, config.csv_covariances);
  }
  if (!config.out_dot.empty()) {
    std::ofstream out(config.out_dot);
    require(out.good(), errc::io_failure, "cannot open '" + config.out_dot + "'");
    out << io::topology_dot(real);
  }
  emit(report, config);
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gaussprep: decide, synthesize and verify pure Gaussian state preparation\n"
      "in passive linear systems with one local reservoir"};
  app.require_subcommand(1);

  std::string config_path;
  JobConfig overrides;
  bool has_input = false, has_alpha = false, has_t_final = false, has_dt = false;
  bool has_stride = false, has_tol = false, has_seed = false, has_report = false;
  bool has_csv = false, has_dot = false, has_mean_scale = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "job configuration document (JSON)");
    cmd->add_option("--input", overrides.input, "input matrix document")
        ->each([&](const std::string&) { has_input = true; });
    cmd->add_option("--tol", overrides.tol, "decision tolerance")
        ->each([&](const std::string&) { has_tol = true; });
    cmd->add_option("--seed", overrides.seed, "random seed")
        ->each([&](const std::string&) { has_seed = true; });
    cmd->add_option("--t-final", overrides.t_final, "integration horizon")
        ->each([&](const std::string&) { has_t_final = true; });
    cmd->add_option("--dt", overrides.dt, "integration step")
        ->each([&](const std::string&) { has_dt = true; });
    cmd->add_option("--stride", overrides.stride, "record every n-th step")
        ->each([&](const std::string&) { has_stride = true; });
    cmd->add_option("--out-report", overrides.out_report, "write the JSON report here")
        ->each([&](const std::string&) { has_report = true; });
    cmd->add_option("--out-csv", overrides.out_csv, "write the trajectory CSV here")
        ->each([&](const std::string&) { has_csv = true; });
    cmd->add_option("--out-dot", overrides.out_dot, "write the topology graph here")
        ->each([&](const std::string&) { has_dot = true; });
    cmd->add_option("--random-mean-scale", overrides.random_mean_scale,
                    "draw the initial mean from a scaled Gaussian")
        ->each([&](const std::string&) { has_mean_scale = true; });
    cmd->add_flag("--csv-covariances", overrides.csv_covariances,
                  "include flattened covariance entries in the CSV");
  };

  CLI::App* family_build = app.add_subcommand("family-build", "build a family member state");
  CLI::App* check = app.add_subcommand("check", "decide whether a state is preparable");
  CLI::App* synthesize_cmd = app.add_subcommand("synthesize", "design a preparing system");
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the moment dynamics");
  CLI::App* analyze = app.add_subcommand("analyze", "entanglement and purity diagnostics");
  CLI::App* demo = app.add_subcommand("demo", "run the five-mode chain end to end");
  for (CLI::App* cmd : {family_build, check, synthesize_cmd, simulate, analyze, demo})
    add_common(cmd);
  demo->add_option("--alpha", overrides.alpha, "squeezing parameter of the chain state")
      ->each([&](const std::string&) { has_alpha = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    JobConfig config = load_config(config_path);
    if (has_input) config.input = overrides.input;
    if (has_alpha) config.alpha = overrides.alpha;
    if (has_t_final) config.t_final = overrides.t_final;
    if (has_dt) config.dt = overrides.dt;
    if (has_stride) config.stride = overrides.stride;
    if (has_tol) config.tol = overrides.tol;
    if (has_seed) config.seed = overrides.seed;
    if (has_report) config.out_report = overrides.out_report;
    if (has_csv) config.out_csv = overrides.out_csv;
    if (has_dot) config.out_dot = overrides.out_dot;
    if (has_mean_scale) config.random_mean_scale = overrides.random_mean_scale;
    if (overrides.csv_covariances) config.csv_covariances = true;

    if (app.got_subcommand(family_build)) return cmd_family_build(config);
    if (app.got_subcommand(check)) return cmd_check(config);
    if (app.got_subcommand(synthesize_cmd)) return cmd_synthesize(config);
    if (app.got_subcommand(simulate)) return cmd_simulate(config);
    if (app.got_subcommand(analyze)) return cmd_analyze(config);
    if (app.got_subcommand(demo)) return cmd_demo(config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == errc::bad_config || e.code() == errc::io_failure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
