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

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "gaussprep/analysis.hpp"
#include "gaussprep/dynamics.hpp"
#include "gaussprep/serialization.hpp"
#include "gaussprep/synthesis.hpp"

namespace gaussprep::io {

/// A named pass/fail check with the tolerance it was evaluated at.
struct Verdict {
  bool pass = false;
  double tol = 0.0;
  std::string detail;
};

inline json to_json(const Verdict& verdict) {
  json out{{"pass", verdict.pass}, {"tol", verdict.tol}};
  if (!verdict.detail.empty()) out["detail"] = verdict.detail;
  return out;
}

/// Machine-readable result of a CLI workflow. Timings are kept out of the
/// serialized report by default so identical runs produce identical bytes.
struct Report {
  std::string command;
  std::map<std::string, Verdict> verdicts;
  std::optional<json> certificate;
  std::optional<json> realization;
  std::optional<double> steady_state_purity;
  std::optional<double> final_distance;
  std::optional<json> entanglement;
  std::map<std::string, double> timings_ms;

  bool all_passed() const {
    for (const auto& [name, verdict] : verdicts)
      if (!verdict.pass) return false;
    return true;
  }
};

inline json to_json(const Report& report, bool include_timings = false) {
  json verdicts = json::object();
  for (const auto& [name, verdict] : report.verdicts) verdicts[name] = to_json(verdict);
  json out{{"command", report.command}, {"verdicts", verdicts}, {"pass", report.all_passed()}};
  if (report.certificate) out["certificate"] = *report.certificate;
  if (report.realization) out["realization"] = *report.realization;
  if (report.steady_state_purity) out["steady_state_purity"] = *report.steady_state_purity;
  if (report.final_distance) out["final_distance"] = *report.final_distance;
  if (report.entanglement) out["entanglement"] = *report.entanglement;
  if (include_timings) {
    json timings = json::object();
    for (const auto& [name, ms] : report.timings_ms) timings[name] = ms;
    out["timings_ms"] = timings;
  }
  return out;
}

inline json to_json(const EntanglementMap& map, double threshold = defaults::entanglement_threshold) {
  json pairs = json::array();
  int entangled_pairs = 0;
  const int n = map.n_modes();
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double value = map.pair_values(j, k);
      pairs.push_back(json{{"modes", {j + 1, k + 1}}, {"value", value}});
      if (value > threshold) ++entangled_pairs;
    }
  }
  return json{{"n_modes", n},
              {"pairs", pairs},
              {"entangled_pairs", entangled_pairs},
              {"threshold", threshold}};
}

inline json to_json(const ConvergenceSummary& summary) {
  json out{{"final_distance", summary.final_distance},
           {"fitted_rate", summary.fitted_rate},
           {"predicted_envelope", summary.predicted_envelope}};
  out["time_to_1e3"] = summary.time_to_1e3 ? json(*summary.time_to_1e3) : json(nullptr);
  out["time_to_1e6"] = summary.time_to_1e6 ? json(*summary.time_to_1e6) : json(nullptr);
  return out;
}

inline json to_json(const ControllabilityReport& ctrl) {
  return json{{"rank", ctrl.rank},
              {"pbh_min_sv", ctrl.pbh_min_sv},
              {"controllable", ctrl.controllable}};
}

// --- CSV --------------------------------------------------------------------

namespace detail {
inline std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}
}  // namespace detail

/// Writes the trajectory as CSV with columns t, distance, purity and
/// optionally the flattened covariance entries. '.' decimal point, no locale
/// dependence.
inline void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out,
                                 bool include_covariances = false) {
  out << "t,distance,purity";
  if (include_covariances && !traj.covariances.empty()) {
    const Eigen::Index dim = traj.covariances.front().rows();
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) out << ",V_" << i << "_" << j;
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << detail::format_double(traj.times[k]);
    out << ',' << (traj.has_target ? detail::format_double(traj.distances[k]) : "nan");
    double p = std::numeric_limits<double>::quiet_NaN();
    try {
      p = purity(CovarianceMatrix{traj.covariances[k]});
    } catch (const Error&) {
      // leave as nan; a transient covariance may sit on the physical boundary
    }
    out << ',' << detail::format_double(p);
    if (include_covariances) {
      const auto& v = traj.covariances[k];
      for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) out << ',' << detail::format_double(v(i, j));
    }
    out << '\n';
  }
}

inline void write_trajectory_csv(const TrajectoryRecord& traj, const std::string& path,
                                 bool include_covariances = false) {
  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open '" + path + "' for writing");
  write_trajectory_csv(traj, out, include_covariances);
}

// --- DOT topology ------------------------------------------------------------

/// Graphviz description of the interaction topology: one node per mode, an
/// edge wherever the interaction matrix has a nonzero off-diagonal entry, and
/// a reservoir node attached to the coupled mode.
inline std::string topology_dot(const SystemRealization& real,
                                double tol = defaults::validation_tol) {
  const int n = real.n_modes;
  const double scale = std::max(max_abs(real.R), 1.0);
  std::ostringstream out;
  out << "graph system {\n";
  out << "  node [shape=circle];\n";
  for (int j = 1; j <= n; ++j) out << "  m" << j << " [label=\"" << j << "\"];\n";
  out << "  reservoir [shape=doublecircle, label=\"res\"];\n";
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (std::abs(real.R(j, k)) > tol * scale) {
        out << "  m" << j + 1 << " -- m" << k + 1 << ";\n";
      }
    }
  }
  out << "  reservoir -- m" << real.ell << " [style=dashed];\n";
  out << "}\n";
  return out.str();
}

}  // namespace gaussprep::io
