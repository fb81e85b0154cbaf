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
#include <optional>
#include <sstream>
#include <vector>

#include "gaussprep/errors.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"

namespace gaussprep {

namespace defaults {
/// Margin below zero required of the spectral abscissa for "strictly stable".
inline constexpr double stability_margin = 1e-10;
/// Step size factor: dt = dt_factor / |spectral abscissa|.
inline constexpr double dt_factor = 1e-3;
}  // namespace defaults

/// Drift and diffusion of the moment equations
///   d<x>/dt = A <x>,   dV/dt = A V + V A^T + D,
/// with A = Sigma (G + Im(C^dag C)) and D = Sigma Re(C^dag C) Sigma^T.
struct DriftDiffusion {
  Eigen::MatrixXd A;
  Eigen::MatrixXd D;
  double spectral_abscissa = 0.0;

  int n_modes() const { return static_cast<int>(A.rows()) / 2; }
};

inline DriftDiffusion assemble_dynamics(const Eigen::MatrixXd& hamiltonian,
                                        const Eigen::MatrixXcd& coupling) {
  require(hamiltonian.rows() == hamiltonian.cols() && hamiltonian.rows() % 2 == 0 &&
              hamiltonian.rows() > 0,
          errc::shape_mismatch, "Hamiltonian matrix must be 2N x 2N");
  require(coupling.cols() == hamiltonian.rows(), errc::shape_mismatch,
          "coupling matrix must be K x 2N");
  const int n = static_cast<int>(hamiltonian.rows()) / 2;
  const Eigen::MatrixXd sigma = SymplecticForm::of(n).Sigma;
  const Eigen::MatrixXcd ctc = coupling.adjoint() * coupling;

  DriftDiffusion dd;
  dd.A = sigma * (hamiltonian + ctc.imag());
  dd.D = symmetrize(sigma * ctc.real() * sigma.transpose());
  Eigen::EigenSolver<Eigen::MatrixXd> es(dd.A, /*computeEigenvectors=*/false);
  dd.spectral_abscissa = es.eigenvalues().real().maxCoeff();
  return dd;
}

inline bool is_strictly_stable(const DriftDiffusion& dd,
                               double margin = defaults::stability_margin) {
  return dd.spectral_abscissa < -margin;
}

/// Default integrator step, tied to the slowest decay rate.
inline double default_dt(const DriftDiffusion& dd) {
  require(dd.spectral_abscissa < 0.0, errc::not_stable,
          "default step size is defined only for stable systems");
  return defaults::dt_factor / std::abs(dd.spectral_abscissa);
}

/// Solves A V + V A^T + D = 0 by full vectorization:
/// (I kron A + A kron I) vec(V) = -vec(D). Deliberately the brute-force
/// route, independent of the time-domain integrator.
inline CovarianceMatrix steady_state(const DriftDiffusion& dd,
                                     double tol = defaults::validation_tol,
                                     double margin = defaults::stability_margin) {
  if (!is_strictly_stable(dd, margin)) {
    std::ostringstream msg;
    msg << "spectral abscissa " << dd.spectral_abscissa << " is not below -" << margin;
    fail(errc::not_stable, msg.str());
  }
  const Eigen::Index dim = dd.A.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd system = kron(identity, dd.A) + kron(dd.A, identity);
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(dd.D.data(), dim * dim);
  const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
  CovarianceMatrix v{symmetrize(Eigen::Map<const Eigen::MatrixXd>(solution.data(), dim, dim))};

  const double residual = (dd.A * v.V + v.V * dd.A.transpose() + dd.D).norm();
  const double scale = std::max({1.0, dd.D.norm(), dd.A.norm() * v.V.norm()});
  if (residual > std::max(tol, 1e-8) * scale) {
    std::ostringstream msg;
    msg << "steady-state residual " << residual << " exceeds tolerance";
    fail(errc::ill_conditioned, msg.str());
  }
  return v;
}

/// Sampled moment trajectory. Covariances are stored exactly symmetric;
/// distances (to the optional target) in Frobenius norm.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<Eigen::VectorXd> means;
  std::vector<double> distances;
  bool has_target = false;
};

/// Fixed-step classical Runge-Kutta integration of the mean and covariance
/// equations. The covariance is re-symmetrized every step. Records are taken
/// every `stride` steps (the final step is always recorded); at each record
/// the smallest covariance eigenvalue is checked against -tol.
inline TrajectoryRecord integrate(const DriftDiffusion& dd, const CovarianceMatrix& v0,
                                  const Eigen::VectorXd& mean0, double t_final, double dt,
                                  const std::optional<CovarianceMatrix>& target = std::nullopt,
                                  int stride = 1, double tol = defaults::validation_tol) {
  const Eigen::Index dim = dd.A.rows();
  require(dt > 0.0 && t_final >= 0.0, errc::bad_params, "need dt > 0 and t_final >= 0");
  require(stride >= 1, errc::bad_params, "stride must be >= 1");
  require(v0.V.rows() == dim && v0.V.cols() == dim, errc::shape_mismatch,
          "initial covariance has wrong dimension");
  require(mean0.size() == dim, errc::shape_mismatch, "initial mean has wrong dimension");
  if (target) {
    require(target->V.rows() == dim && target->V.cols() == dim, errc::shape_mismatch,
            "target covariance has wrong dimension");
  }

  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
  Eigen::MatrixXd v = symmetrize(v0.V);
  Eigen::VectorXd mean = mean0;

  TrajectoryRecord record;
  record.has_target = target.has_value();

  auto cov_rhs = [&dd](const Eigen::MatrixXd& value) -> Eigen::MatrixXd {
    return dd.A * value + value * dd.A.transpose() + dd.D;
  };

  auto take_record = [&](double time) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol) {
      std::ostringstream msg;
      msg << "covariance eigenvalue " << min_eig << " at t = " << time
          << "; reduce the step size";
      fail(errc::step_too_large, msg.str());
    }
    record.times.push_back(time);
    record.covariances.push_back(v);
    record.means.push_back(mean);
    if (target) record.distances.push_back((v - target->V).norm());
  };

  take_record(0.0);
  for (long step = 0; step < steps; ++step) {
    const double h = std::min(dt, t_final - static_cast<double>(step) * dt);
    const Eigen::MatrixXd k1 = cov_rhs(v);
    const Eigen::MatrixXd k2 = cov_rhs(v + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = cov_rhs(v + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = cov_rhs(v + h * k3);
    v = symmetrize(v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

    const Eigen::VectorXd m1 = dd.A * mean;
    const Eigen::VectorXd m2 = dd.A * (mean + 0.5 * h * m1);
    const Eigen::VectorXd m3 = dd.A * (mean + 0.5 * h * m2);
    const Eigen::VectorXd m4 = dd.A * (mean + h * m3);
    mean += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);

    const bool last = step + 1 == steps;
    if (last || (step + 1) % stride == 0) {
      take_record(std::min(static_cast<double>(step + 1) * dt, t_final));
    }
  }
  return record;
}

/// Distance diagnostics for a trajectory with a target.
struct ConvergenceSummary {
  double final_distance = 0.0;
  std::optional<double> time_to_1e3;
  std::optional<double> time_to_1e6;
  double fitted_rate = 0.0;       // slope of ln(distance) vs t; diagnostic only
  double predicted_envelope = 0.0;  // first distance scaled by e^(abscissa * t_final)
};

inline ConvergenceSummary convergence_report(const TrajectoryRecord& traj,
                                             double spectral_abscissa = 0.0) {
  require(traj.has_target && !traj.distances.empty(), errc::no_target,
          "trajectory carries no target distances");
  ConvergenceSummary summary;
  summary.final_distance = traj.distances.back();
  auto first_below = [&traj](double threshold) -> std::optional<double> {
    for (std::size_t i = 0; i < traj.distances.size(); ++i)
      if (traj.distances[i] <= threshold) return traj.times[i];
    return std::nullopt;
  };
  summary.time_to_1e3 = first_below(1e-3);
  summary.time_to_1e6 = first_below(1e-6);
  summary.predicted_envelope =
      traj.distances.front() * std::exp(spectral_abscissa * traj.times.back());

  // Least-squares slope of ln(d) over samples where the distance is resolvable.
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < traj.distances.size(); ++i) {
    if (traj.distances[i] <= 1e-14) continue;
    const double t = traj.times[i];
    const double y = std::log(traj.distances[i]);
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
    ++count;
  }
  const double denom = static_cast<double>(count) * sum_tt - sum_t * sum_t;
  if (count >= 2 && std::abs(denom) > 0.0) {
    summary.fitted_rate = (static_cast<double>(count) * sum_ty - sum_t * sum_y) / denom;
  }
  return summary;
}

}  // namespace gaussprep
