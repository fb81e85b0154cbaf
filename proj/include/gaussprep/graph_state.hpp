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
#include <cmath>
#include <sstream>

#include "gaussprep/errors.hpp"
#include "gaussprep/linalg.hpp"

namespace gaussprep {

namespace defaults {
/// Generic validation tolerance (symmetry residuals, purity checks).
inline constexpr double validation_tol = 1e-9;
/// Positive-definiteness threshold factor, applied as factor * ||Y||.
inline constexpr double pd_tol_factor = 1e-10;
}  // namespace defaults

/// Canonical descriptor of a pure Gaussian state: the complex symmetric matrix
/// Z = X + iY with X, Y real symmetric and Y positive definite. Construct via
/// validate_graph so the invariants are established; fields are stored exactly
/// symmetric.
struct GraphMatrix {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;

  int n_modes() const { return static_cast<int>(X.rows()); }

  Eigen::MatrixXcd z() const { return X.cast<Complex>() + Complex(0, 1) * Y.cast<Complex>(); }
};

/// Real symmetric 2N x 2N matrix of second moments, quadratures ordered
/// (q_1..q_N, p_1..p_N). All producers in this library symmetrize before
/// storing.
struct CovarianceMatrix {
  Eigen::MatrixXd V;

  int n_modes() const { return static_cast<int>(V.rows()) / 2; }
};

/// The canonical antisymmetric form encoding the commutation relations,
/// [[0, I], [-I, 0]] in (q.., p..) ordering.
struct SymplecticForm {
  int n_modes;
  Eigen::MatrixXd Sigma;

  static SymplecticForm of(int n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    s.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    s.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return {n, std::move(s)};
  }
};

/// Checks symmetry of both parts (within tol), positive definiteness of the
/// imaginary part, and returns the symmetrized descriptor.
inline GraphMatrix validate_graph(const Eigen::MatrixXd& x_raw, const Eigen::MatrixXd& y_raw,
                                  double tol = defaults::validation_tol) {
  require(x_raw.rows() == x_raw.cols() && y_raw.rows() == y_raw.cols() &&
              x_raw.rows() == y_raw.rows() && x_raw.rows() > 0,
          errc::shape_mismatch, "graph matrix parts must be square and of equal size");
  const double scale = std::max({max_abs(x_raw), max_abs(y_raw), 1.0});
  if (asymmetry(x_raw) > tol * scale || asymmetry(y_raw) > tol * scale) {
    std::ostringstream msg;
    msg << "max |M - M^T| = " << std::max(asymmetry(x_raw), asymmetry(y_raw))
        << " exceeds tolerance " << tol * scale;
    fail(errc::asymmetric_input, msg.str());
  }
  GraphMatrix g{symmetrize(x_raw), symmetrize(y_raw)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.Y, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  const double pd_tol = defaults::pd_tol_factor * std::max(max_abs(g.Y), 1.0);
  if (min_eig <= pd_tol) {
    std::ostringstream msg;
    msg << "imaginary part has min eigenvalue " << min_eig << " <= " << pd_tol;
    fail(errc::not_positive_definite, msg.str());
  }
  return g;
}

inline GraphMatrix vacuum_graph(int n) {
  return {Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Identity(n, n)};
}

/// V = 1/2 [[Y^-1, Y^-1 X], [X Y^-1, X Y^-1 X + Y]]. The result is exactly
/// symmetric and has determinant 2^(-2N).
inline CovarianceMatrix cov_from_graph(const GraphMatrix& g) {
  const int n = g.n_modes();
  const Eigen::MatrixXd yi = g.Y.llt().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd yi_sym = symmetrize(yi);
  Eigen::MatrixXd v(2 * n, 2 * n);
  v.topLeftCorner(n, n) = yi_sym;
  v.topRightCorner(n, n) = yi_sym * g.X;
  v.bottomLeftCorner(n, n) = v.topRightCorner(n, n).transpose();
  v.bottomRightCorner(n, n) = symmetrize(g.X * yi_sym * g.X) + g.Y;
  return {0.5 * symmetrize(v)};
}

/// Log-determinant through Cholesky; fails if V is not positive definite.
inline double log_det_spd(const Eigen::MatrixXd& v) {
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  require(llt.info() == Eigen::Success, errc::non_positive_determinant,
          "matrix is not positive definite, log-determinant undefined");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

/// p = 1/sqrt(2^(2N) det V), evaluated in log space to avoid underflow.
inline double purity(const CovarianceMatrix& cov) {
  require(cov.V.rows() == cov.V.cols() && cov.V.rows() % 2 == 0, errc::shape_mismatch,
          "covariance matrix must be square with even dimension");
  const int two_n = static_cast<int>(cov.V.rows());
  const double log_det = log_det_spd(cov.V);
  return std::exp(-0.5 * (two_n * std::log(2.0) + log_det));
}

inline bool is_pure(const CovarianceMatrix& cov, double tol = defaults::validation_tol) {
  return std::abs(purity(cov) - 1.0) <= tol;
}

/// Inverts the covariance decomposition: Y = (2 V_qq)^-1, X = Y (2 V_qp),
/// then verifies that the input really was the covariance of a pure state.
inline GraphMatrix graph_from_cov(const CovarianceMatrix& cov,
                                  double tol = defaults::validation_tol) {
  require(cov.V.rows() == cov.V.cols() && cov.V.rows() % 2 == 0 && cov.V.rows() > 0,
          errc::shape_mismatch, "covariance matrix must be square with even dimension");
  const int n = cov.n_modes();
  const Eigen::MatrixXd v_qq = cov.V.topLeftCorner(n, n);
  const Eigen::MatrixXd v_qp = cov.V.topRightCorner(n, n);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(2.0 * v_qq);
  require(lu.isInvertible(), errc::singular_block, "position block of V is singular");
  const Eigen::MatrixXd y = symmetrize(lu.inverse());
  const Eigen::MatrixXd x = symmetrize(y * (2.0 * v_qp));

  GraphMatrix g = validate_graph(x, y, tol);
  const CovarianceMatrix rebuilt = cov_from_graph(g);
  const double scale = std::max(max_abs(cov.V), 1.0);
  if (max_abs(rebuilt.V - cov.V) > tol * scale || !is_pure(cov, std::max(tol, 1e-7))) {
    fail(errc::not_pure, "covariance matrix is not that of a pure state");
  }
  return g;
}

}  // namespace gaussprep
