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
//
// JSON document formats. Matrices are stored as row-major flat arrays with
// explicit dimensions; complex numbers as [re, im] pairs.

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gaussprep/dynamics.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"
#include "gaussprep/state_family.hpp"
#include "gaussprep/synthesis.hpp"

namespace gaussprep::io {

using json = nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows.push_back(m(i, j));
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& data, Eigen::Index rows, Eigen::Index cols,
                                        const std::string& field) {
  require(data.is_array() && static_cast<Eigen::Index>(data.size()) == rows * cols,
          errc::bad_config, "field '" + field + "' must be a flat row-major array of size " +
                                std::to_string(rows * cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = data[static_cast<std::size_t>(i * cols + j)].get<double>();
  return m;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& data, const std::string& field) {
  require(data.is_array() && data.size() == 2, errc::bad_config,
          "field '" + field + "' must be a [re, im] pair");
  return {data[0].get<double>(), data[1].get<double>()};
}

inline json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows.push_back(complex_to_json(m(i, j)));
  return rows;
}

inline Eigen::MatrixXcd complex_matrix_from_json(const json& data, Eigen::Index rows,
                                                 Eigen::Index cols, const std::string& field) {
  require(data.is_array() && static_cast<Eigen::Index>(data.size()) == rows * cols,
          errc::bad_config, "field '" + field + "' must contain " + std::to_string(rows * cols) +
                                " [re, im] pairs");
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = complex_from_json(data[static_cast<std::size_t>(i * cols + j)], field);
  return m;
}

// --- graph / covariance documents -----------------------------------------

inline json to_json(const GraphMatrix& g) {
  return json{{"kind", "graph"},
              {"n_modes", g.n_modes()},
              {"X", matrix_to_json(g.X)},
              {"Y", matrix_to_json(g.Y)}};
}

inline json to_json(const CovarianceMatrix& cov) {
  return json{{"kind", "covariance"},
              {"n_modes", cov.n_modes()},
              {"V", matrix_to_json(cov.V)}};
}

inline GraphMatrix graph_from_json(const json& doc) {
  require(doc.contains("n_modes") && doc.contains("X") && doc.contains("Y"), errc::bad_config,
          "graph document needs fields n_modes, X, Y");
  const auto n = doc["n_modes"].get<Eigen::Index>();
  require(n >= 1, errc::bad_config, "n_modes must be >= 1");
  return validate_graph(matrix_from_json(doc["X"], n, n, "X"),
                        matrix_from_json(doc["Y"], n, n, "Y"));
}

inline CovarianceMatrix covariance_from_json(const json& doc) {
  require(doc.contains("n_modes") && doc.contains("V"), errc::bad_config,
          "covariance document needs fields n_modes, V");
  const auto n = doc["n_modes"].get<Eigen::Index>();
  require(n >= 1, errc::bad_config, "n_modes must be >= 1");
  const Eigen::MatrixXd v = matrix_from_json(doc["V"], 2 * n, 2 * n, "V");
  const double skew = asymmetry(v);
  require(skew <= defaults::validation_tol * std::max(max_abs(v), 1.0), errc::asymmetric_input,
          "covariance matrix in document is not symmetric");
  return {symmetrize(v)};
}

using MatrixDocument = std::variant<GraphMatrix, CovarianceMatrix>;

inline MatrixDocument matrix_document_from_json(const json& doc) {
  require(doc.contains("kind"), errc::bad_config, "matrix document needs a 'kind' field");
  const auto kind = doc["kind"].get<std::string>();
  if (kind == "graph") return graph_from_json(doc);
  if (kind == "covariance") return covariance_from_json(doc);
  fail(errc::bad_config, "unknown matrix document kind '" + kind + "'");
}

// --- family parameters ------------------------------------------------------

/// Keys: n_modes, zbar ([re, im]), perm (1-based mode targets), q_orth
/// (explicit row-major array) or q_seed (random orthogonal factor), and
/// block_signs. perm and block_signs may be omitted (identity / all +1).
inline FamilyParams family_params_from_json(const json& doc) {
  require(doc.contains("n_modes") && doc.contains("zbar"), errc::bad_config,
          "family parameters need fields n_modes and zbar");
  FamilyParams params;
  params.n_modes = doc["n_modes"].get<int>();
  require(params.n_modes >= 1, errc::bad_config, "n_modes must be >= 1");
  params.zbar = complex_from_json(doc["zbar"], "zbar");

  if (doc.contains("perm")) {
    for (const auto& entry : doc["perm"]) params.perm.push_back(entry.get<int>() - 1);
  } else {
    params.perm.resize(static_cast<std::size_t>(params.n_modes));
    std::iota(params.perm.begin(), params.perm.end(), 0);
  }

  const int m = params.n_modes - 1;
  if (doc.contains("q_orth")) {
    params.q_orth = matrix_from_json(doc["q_orth"], m, m, "q_orth");
  } else if (doc.contains("q_seed")) {
    NormalSampler rng(doc["q_seed"].get<std::uint64_t>());
    params.q_orth = random_orthogonal(m, rng);
  } else {
    params.q_orth = Eigen::MatrixXd::Identity(m, m);
  }

  if (doc.contains("block_signs")) {
    for (const auto& entry : doc["block_signs"]) params.block_signs.push_back(entry.get<int>());
  } else {
    params.block_signs.assign(static_cast<std::size_t>(n_paired_blocks(params.n_modes)), 1);
  }
  validate_family_params(params);
  return params;
}

inline json to_json(const FamilyParams& params) {
  json perm = json::array();
  for (int p : params.perm) perm.push_back(p + 1);
  return json{{"n_modes", params.n_modes},
              {"zbar", complex_to_json(params.zbar)},
              {"perm", perm},
              {"q_orth", matrix_to_json(params.q_orth)},
              {"block_signs", params.block_signs}};
}

// --- gains, certificate, realization ---------------------------------------

inline Gains gains_from_json(const json& doc) {
  Gains gains;
  if (doc.contains("taus")) gains.taus = doc["taus"].get<std::vector<double>>();
  if (doc.contains("rs")) gains.rs = doc["rs"].get<std::vector<double>>();
  if (doc.contains("tau_p")) gains.tau_p = complex_from_json(doc["tau_p"], "tau_p");
  return gains;
}

inline json to_json(const Gains& gains) {
  return json{{"taus", gains.taus}, {"rs", gains.rs}, {"tau_p", complex_to_json(gains.tau_p)}};
}

inline json to_json(const MembershipCertificate& cert) {
  json perm = json::array();
  for (int p : cert.perm) perm.push_back(p + 1);
  json spectrum = json::array();
  for (Complex s : cert.spectrum) spectrum.push_back(complex_to_json(s));
  return json{{"ell", cert.ell()},
              {"zbar", complex_to_json(cert.zbar)},
              {"perm", perm},
              {"q_orth", matrix_to_json(cert.q_orth)},
              {"block_signs", cert.block_signs},
              {"spectrum", spectrum},
              {"parity", cert.parity == Parity::odd ? "odd" : "even"},
              {"unique_mode", cert.unique_mode}};
}

inline json to_json(const SystemRealization& real) {
  return json{{"kind", "realization"},
              {"n_modes", real.n_modes},
              {"ell", real.ell},
              {"R", matrix_to_json(real.R)},
              {"Gamma", matrix_to_json(real.Gamma)},
              {"P", complex_matrix_to_json(real.P)},
              {"G", matrix_to_json(real.G)},
              {"C", complex_matrix_to_json(real.C)},
              {"gains", to_json(real.gains)}};
}

inline SystemRealization realization_from_json(const json& doc) {
  require(doc.contains("n_modes") && doc.contains("R") && doc.contains("Gamma") &&
              doc.contains("P") && doc.contains("G") && doc.contains("C") && doc.contains("ell"),
          errc::bad_config, "realization document needs n_modes, ell, R, Gamma, P, G, C");
  SystemRealization real;
  real.n_modes = doc["n_modes"].get<int>();
  const Eigen::Index n = real.n_modes;
  real.ell = doc["ell"].get<int>();
  real.R = matrix_from_json(doc["R"], n, n, "R");
  real.Gamma = matrix_from_json(doc["Gamma"], n, n, "Gamma");
  real.P = complex_matrix_from_json(doc["P"], n, 1, "P");
  real.G = matrix_from_json(doc["G"], 2 * n, 2 * n, "G");
  real.C = complex_matrix_from_json(doc["C"], 1, 2 * n, "C");
  if (doc.contains("gains")) real.gains = gains_from_json(doc["gains"]);
  return real;
}

// --- file helpers -----------------------------------------------------------

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_failure, "cannot open '" + path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail(errc::bad_config, "parse error in '" + path + "': " + e.what());
  }
  return doc;
}

inline void save_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace gaussprep::io
