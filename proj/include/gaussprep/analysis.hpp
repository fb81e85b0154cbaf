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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gaussprep/errors.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"

namespace gaussprep {

namespace defaults {
/// Pairs with log-negativity above this count as entangled in reports.
inline constexpr double entanglement_threshold = 1e-9;
}  // namespace defaults

/// Marginal covariance of the selected modes (1-based indices), preserving
/// the (q.., p..) ordering.
inline CovarianceMatrix reduce_modes(const CovarianceMatrix& cov, const std::vector<int>& modes) {
  const int n = cov.n_modes();
  require(!modes.empty(), errc::bad_indices, "mode list must not be empty");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int m : modes) {
    require(m >= 1 && m <= n, errc::bad_indices, "mode index out of range");
    require(!seen[static_cast<std::size_t>(m - 1)], errc::bad_indices, "mode indices must be distinct");
    seen[static_cast<std::size_t>(m - 1)] = true;
  }
  const auto k = static_cast<int>(modes.size());
  Eigen::VectorXi idx(2 * k);
  for (int i = 0; i < k; ++i) {
    idx(i) = modes[static_cast<std::size_t>(i)] - 1;
    idx(k + i) = n + modes[static_cast<std::size_t>(i)] - 1;
  }
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (int a = 0; a < 2 * k; ++a)
    for (int b = 0; b < 2 * k; ++b) out(a, b) = cov.V(idx(a), idx(b));
  return {symmetrize(out)};
}

/// All symplectic eigenvalues of a covariance matrix: the moduli of the
/// eigenvalues of i Sigma V, sorted ascending (each value appears twice).
inline std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v) {
  require(v.rows() == v.cols() && v.rows() % 2 == 0, errc::shape_mismatch,
          "covariance matrix must be 2N x 2N");
  const int n = static_cast<int>(v.rows()) / 2;
  const Eigen::MatrixXcd m =
      Complex(0, 1) * (SymplecticForm::of(n).Sigma * v).cast<Complex>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  std::vector<double> nus(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < 2 * n; ++k) nus[static_cast<std::size_t>(k)] = std::abs(es.eigenvalues()(k));
  std::sort(nus.begin(), nus.end());
  return nus;
}

/// Logarithmic negativity of a two-mode covariance matrix: partial transpose
/// on the second mode, then E = max(0, -ln(2 nu_min)) from the smallest
/// symplectic eigenvalue of the transposed matrix. Natural logarithm.
inline double log_negativity(const CovarianceMatrix& cov, double tol = defaults::validation_tol) {
  require(cov.n_modes() == 2, errc::shape_mismatch,
          "log-negativity is computed on two-mode covariance matrices");
  const double nu_min = symplectic_eigenvalues(cov.V).front();
  if (nu_min < 0.5 * (1.0 - tol)) {
    std::ostringstream msg;
    msg << "smallest symplectic eigenvalue " << nu_min << " is below the physical bound 1/2";
    fail(errc::unphysical, msg.str());
  }
  Eigen::Matrix4d flip = Eigen::Matrix4d::Identity();
  flip(3, 3) = -1.0;  // negate p of the second mode
  const Eigen::MatrixXd transposed = flip * cov.V * flip;
  const double nu_pt = symplectic_eigenvalues(transposed).front();
  return std::max(0.0, -std::log(2.0 * nu_pt));
}

/// Pairwise log-negativity table: symmetric, zero diagonal, entries >= 0.
struct EntanglementMap {
  Eigen::MatrixXd pair_values;

  int n_modes() const { return static_cast<int>(pair_values.rows()); }
};

inline EntanglementMap entanglement_map(const CovarianceMatrix& cov,
                                        double tol = defaults::validation_tol) {
  const int n = cov.n_modes();
  EntanglementMap map{Eigen::MatrixXd::Zero(n, n)};
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const double value = log_negativity(reduce_modes(cov, {j, k}), tol);
      map.pair_values(j - 1, k - 1) = value;
      map.pair_values(k - 1, j - 1) = value;
    }
  }
  return map;
}

inline double frobenius_distance(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  require(a.V.rows() == b.V.rows() && a.V.cols() == b.V.cols(), errc::shape_mismatch,
          "covariance matrices must have equal size");
  return (a.V - b.V).norm();
}

}  // namespace gaussprep
