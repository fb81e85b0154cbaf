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
#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include "gaussprep/errors.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"
#include "gaussprep/state_family.hpp"

namespace gaussprep {

namespace defaults {
/// Relative singular-value threshold for numerical rank decisions.
inline constexpr double rank_tol = 1e-8;
}  // namespace defaults

/// Free gains of the construction. `taus` holds one entry per block of the
/// canonical form (for even N the first entry belongs to the scalar block),
/// `rs` one entry per 2x2 block; all nonzero, |rs| pairwise distinct.
struct Gains {
  std::vector<double> taus;
  std::vector<double> rs;
  Complex tau_p{1.0, 0.0};
};

/// taus = 1, tau_p = 1 and rs = j (counting from 1 for odd N, from 2 for
/// even N, so magnitudes never collide with the zero of the scalar block).
inline Gains default_gains(int n_modes) {
  Gains gains;
  const int pairs = n_paired_blocks(n_modes);
  const int first = n_modes % 2 == 1 ? 1 : 2;
  gains.taus.assign(static_cast<std::size_t>(pairs + (n_modes % 2 == 0 ? 1 : 0)), 1.0);
  for (int j = 0; j < pairs; ++j) gains.rs.push_back(static_cast<double>(first + j));
  return gains;
}

inline void validate_gains(const Gains& gains, int n_modes) {
  const auto pairs = static_cast<std::size_t>(n_paired_blocks(n_modes));
  const std::size_t tau_count = pairs + (n_modes % 2 == 0 ? 1 : 0);
  require(gains.taus.size() == tau_count, errc::bad_gains,
          "wrong number of tau gains for this mode count");
  require(gains.rs.size() == pairs, errc::bad_gains,
          "wrong number of r gains for this mode count");
  require(std::abs(gains.tau_p) != 0.0, errc::bad_gains, "reservoir gain tau_p must be nonzero");
  for (double t : gains.taus)
    require(t != 0.0, errc::bad_gains, "tau gains must be nonzero");
  for (std::size_t a = 0; a < gains.rs.size(); ++a) {
    require(gains.rs[a] != 0.0, errc::bad_gains, "r gains must be nonzero");
    for (std::size_t b = a + 1; b < gains.rs.size(); ++b) {
      const double gap = std::abs(std::abs(gains.rs[a]) - std::abs(gains.rs[b]));
      const double ref = std::max(std::abs(gains.rs[a]), std::abs(gains.rs[b]));
      require(gap > 1e-9 * ref, errc::bad_gains, "|r| gains must be pairwise distinct");
    }
  }
}

/// The designed Hamiltonian data: interaction matrix R (symmetric), gauge
/// term Gamma = X R Y (antisymmetric) and reservoir vector P (one column,
/// supported on the coupled mode).
struct InteractionDesign {
  Eigen::MatrixXd R;
  Eigen::MatrixXd Gamma;
  Eigen::VectorXcd P;
};

/// Builds (R, Gamma, P) for a certified family member.
///
/// Per 2x2 block the reservoir column follows the eigenvector that carries
/// eigenvalue -1/zbar ([1,-1] for a plus member, [1,1] for a minus member);
/// the diagonal part pairs each r with -r, preceded by a zero for even N.
inline InteractionDesign design_interaction(const MembershipCertificate& cert,
                                            const GraphMatrix& g, const Gains& gains,
                                            double tol = defaults::validation_tol) {
  const int n = g.n_modes();
  require(cert.n_modes() == n, errc::certificate_mismatch,
          "certificate mode count does not match the graph matrix");
  validate_gains(gains, n);

  const double scale = std::max({max_abs(g.X), max_abs(g.Y), 1.0});
  {
    const GraphMatrix rebuilt = graph_from_certificate(cert);
    const double err = std::max(max_abs(rebuilt.X - g.X), max_abs(rebuilt.Y - g.Y));
    require(err <= std::max(100.0 * tol, 1e-7) * scale, errc::certificate_mismatch,
            "certificate does not reproduce the graph matrix");
  }

  const int m = n - 1;
  const int pairs = n_paired_blocks(n);
  Eigen::VectorXd r21 = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r22_diag = Eigen::VectorXd::Zero(m);
  int offset = 0;
  std::size_t tau_index = 0;
  if (n % 2 == 0) {
    r21(0) = gains.taus[tau_index++];
    offset = 1;
  }
  for (int j = 0; j < pairs; ++j) {
    const double tau = gains.taus[tau_index++];
    const bool plus_member = cert.block_signs[static_cast<std::size_t>(j)] > 0;
    r21(offset + 2 * j) = tau;
    r21(offset + 2 * j + 1) = plus_member ? -tau : tau;
    const double r = gains.rs[static_cast<std::size_t>(j)];
    r22_diag(offset + 2 * j) = r;
    r22_diag(offset + 2 * j + 1) = -r;
  }

  Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(n, n);
  if (m > 0) {
    const Eigen::RowVectorXd top = r21.transpose() * cert.q_orth;
    inner.block(0, 1, 1, m) = top;
    inner.block(1, 0, m, 1) = top.transpose();
    inner.bottomRightCorner(m, m) =
        symmetrize(cert.q_orth.transpose() * r22_diag.asDiagonal() * cert.q_orth);
  }

  InteractionDesign design;
  design.R = permute_from_slots<double>(inner, cert.perm);
  design.Gamma = g.X * design.R * g.Y;
  design.P = Eigen::VectorXcd::Zero(n);
  design.P(cert.perm[0]) = gains.tau_p;

  // Design identities, checked rather than assumed.
  const Eigen::MatrixXcd z = g.z();
  const double zrz_residual = max_abs(Eigen::MatrixXcd(z * design.R * z + design.R));
  const double gamma_residual = max_abs(Eigen::MatrixXd(design.Gamma + design.Gamma.transpose()));
  if (m > 0) {
    const Eigen::MatrixXcd core = family_block_core(n, cert.zbar, cert.block_signs);
    const double eigvec_residual =
        max_abs(Eigen::MatrixXcd(core * r21.cast<Complex>() * cert.zbar + r21.cast<Complex>()));
    require(eigvec_residual <= std::max(100.0 * tol, 1e-7) * scale * max_abs(design.R),
            errc::ill_conditioned, "reservoir column is not the -1/zbar eigenvector direction");
  }
  const double budget = std::max(100.0 * tol, 1e-7) * std::max(1.0, scale * scale) *
                        std::max(1.0, max_abs(design.R));
  require(zrz_residual <= budget, errc::ill_conditioned,
          "interaction matrix does not satisfy Z R Z = -R within tolerance");
  require(gamma_residual <= budget, errc::ill_conditioned,
          "gauge term is not antisymmetric within tolerance");
  return design;
}

/// Quadratic Hamiltonian coefficient matrix for a target graph matrix and a
/// chosen (R, Gamma):
///   [[X R X + Y R Y - Gamma Y^-1 X - X Y^-1 Gamma^T,  -X R + Gamma Y^-1],
///    [-R X + Y^-1 Gamma^T,                             R              ]].
inline Eigen::MatrixXd hamiltonian_matrix(const GraphMatrix& g, const Eigen::MatrixXd& r,
                                          const Eigen::MatrixXd& gamma) {
  const int n = g.n_modes();
  require(r.rows() == n && r.cols() == n && gamma.rows() == n && gamma.cols() == n,
          errc::shape_mismatch, "R and Gamma must be N x N");
  const Eigen::MatrixXd yi = g.Y.llt().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = symmetrize(g.X * r * g.X + g.Y * r * g.Y - gamma * yi * g.X -
                                       g.X * yi * gamma.transpose());
  out.topRightCorner(n, n) = -g.X * r + gamma * yi;
  out.bottomLeftCorner(n, n) = out.topRightCorner(n, n).transpose();
  out.bottomRightCorner(n, n) = symmetrize(r);
  return out;
}

/// Coupling matrix C = P^T [-Z I]; one row per reservoir column of P.
inline Eigen::MatrixXcd coupling_matrix(const GraphMatrix& g, const Eigen::MatrixXcd& p) {
  const int n = g.n_modes();
  require(p.rows() == n && p.cols() >= 1, errc::shape_mismatch, "P must be N x K");
  Eigen::MatrixXcd bracket(n, 2 * n);
  bracket.leftCols(n) = -g.z();
  bracket.rightCols(n) = Eigen::MatrixXcd::Identity(n, n);
  return p.transpose() * bracket;
}

/// Outcome of the two rank tests run on a matrix pair.
struct PairControllability {
  int krylov_rank = 0;
  double pbh_min_sv = 0.0;
  bool krylov_verdict = false;
  bool pbh_verdict = false;
};

/// Krylov-rank and eigenvalue (PBH) controllability tests for (A, B). The
/// Krylov blocks are column-normalized before the SVD so high matrix powers
/// do not drown the threshold.
inline PairControllability pair_controllability(const Eigen::MatrixXcd& a,
                                                const Eigen::MatrixXcd& b,
                                                double tol = defaults::rank_tol) {
  const Eigen::Index n = a.rows();
  require(a.cols() == n && b.rows() == n && b.cols() >= 1, errc::shape_mismatch,
          "pair test needs A (n x n) and B (n x k)");
  PairControllability out;

  Eigen::MatrixXcd krylov(n, n * b.cols());
  Eigen::MatrixXcd block = b;
  for (Eigen::Index j = 0; j < n; ++j) {
    krylov.middleCols(j * b.cols(), b.cols()) = block;
    block = a * block;
  }
  for (Eigen::Index c = 0; c < krylov.cols(); ++c) {
    const double norm = krylov.col(c).norm();
    if (norm > 0.0) krylov.col(c) /= norm;
  }
  out.krylov_rank = numerical_rank(krylov, tol);
  out.krylov_verdict = out.krylov_rank == static_cast<int>(n);

  Eigen::MatrixXcd compound(n, n + b.cols());
  compound.leftCols(n) = a;
  compound.rightCols(b.cols()) = b;
  const double sv_scale = std::max(largest_singular_value(compound), 1.0);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  double min_sv = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::MatrixXcd pencil(n, n + b.cols());
    pencil.leftCols(n) = a - es.eigenvalues()(k) * Eigen::MatrixXcd::Identity(n, n);
    pencil.rightCols(b.cols()) = b;
    min_sv = std::min(min_sv, smallest_singular_value(pencil));
  }
  out.pbh_min_sv = n == 0 ? 0.0 : min_sv;
  out.pbh_verdict = out.pbh_min_sv > tol * sv_scale;
  return out;
}

/// Controllability data for a candidate realization.
struct ControllabilityReport {
  Eigen::MatrixXcd q_ctrl;
  int rank = 0;
  double pbh_min_sv = 0.0;
  bool controllable = false;
};

/// Builds Q = -i R Y + Y^-1 Gamma and runs both rank tests; they must agree.
/// When Gamma = X R Y the matrix reduces to -R Z, which is checked.
inline ControllabilityReport controllability(const GraphMatrix& g, const Eigen::MatrixXd& r,
                                             const Eigen::MatrixXd& gamma,
                                             const Eigen::MatrixXcd& p,
                                             double tol = defaults::rank_tol) {
  const int n = g.n_modes();
  require(r.rows() == n && r.cols() == n && gamma.rows() == n && gamma.cols() == n &&
              p.rows() == n && p.cols() >= 1,
          errc::shape_mismatch, "inconsistent shapes for controllability test");

  ControllabilityReport report;
  const Eigen::MatrixXd yi_gamma = g.Y.llt().solve(gamma);
  report.q_ctrl =
      Complex(0, -1) * (r * g.Y).cast<Complex>() + yi_gamma.cast<Complex>();

  const double scale = std::max({max_abs(r), max_abs(g.X), max_abs(g.Y), 1.0});
  if (max_abs(Eigen::MatrixXd(gamma - g.X * r * g.Y)) <= 1e-9 * scale * scale * scale) {
    const double reduction_err = max_abs(Eigen::MatrixXcd(report.q_ctrl + r.cast<Complex>() * g.z()));
    require(reduction_err <= 1e-7 * scale * scale, errc::ill_conditioned,
            "Q does not reduce to -R Z although Gamma = X R Y");
  }

  const PairControllability pair = pair_controllability(report.q_ctrl, p, tol);
  report.rank = pair.krylov_rank;
  report.pbh_min_sv = pair.pbh_min_sv;
  if (pair.krylov_verdict != pair.pbh_verdict) {
    std::ostringstream msg;
    msg << "Krylov rank " << pair.krylov_rank << "/" << n << " and PBH minimum singular value "
        << pair.pbh_min_sv << " disagree at tolerance " << tol;
    fail(errc::rank_test_disagreement, msg.str());
  }
  report.controllable = pair.krylov_verdict;
  return report;
}

/// True iff the Hamiltonian matrix has equal q-q and p-p blocks and no q-p
/// mixing, i.e. only excitation-preserving interactions.
inline bool is_passive(const Eigen::MatrixXd& hamiltonian, double tol = defaults::validation_tol) {
  require(hamiltonian.rows() == hamiltonian.cols() && hamiltonian.rows() % 2 == 0,
          errc::shape_mismatch, "Hamiltonian matrix must be 2N x 2N");
  const Eigen::Index n = hamiltonian.rows() / 2;
  const double scale = std::max(max_abs(hamiltonian), 1.0);
  const double qq_pp =
      max_abs(Eigen::MatrixXd(hamiltonian.topLeftCorner(n, n) - hamiltonian.bottomRightCorner(n, n)));
  const double qp = max_abs(Eigen::MatrixXd(hamiltonian.topRightCorner(n, n)));
  return qq_pp <= tol * scale && qp <= tol * scale;
}

/// True iff C is a single row supported only on columns {ell, N+ell} for one
/// mode ell; returns that 1-based mode.
inline std::pair<bool, int> is_local_single(const Eigen::MatrixXcd& c,
                                            double tol = defaults::validation_tol) {
  require(c.cols() % 2 == 0 && c.cols() > 0, errc::shape_mismatch,
          "coupling matrix must be K x 2N");
  if (c.rows() != 1) return {false, 0};
  const Eigen::Index n = c.cols() / 2;
  const double scale = std::max(max_abs(c), 1.0);
  int mode = -1;
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    if (std::abs(c(0, j)) <= tol * scale) continue;
    const int this_mode = static_cast<int>(j % n);
    if (mode == -1) {
      mode = this_mode;
    } else if (mode != this_mode) {
      return {false, 0};
    }
  }
  if (mode == -1) return {false, 0};
  return {true, mode + 1};
}

/// Complete synthesized system preparing a family member.
struct SystemRealization {
  int n_modes = 0;
  Eigen::MatrixXd R;
  Eigen::MatrixXd Gamma;
  Eigen::VectorXcd P;
  Eigen::MatrixXd G;
  Eigen::MatrixXcd C;
  int ell = 0;  // 1-based reservoir-coupled mode
  Gains gains;
};

/// Full synthesis from an existing certificate.
inline SystemRealization synthesize(const GraphMatrix& g, const MembershipCertificate& cert,
                                    const Gains& gains, double tol = defaults::validation_tol) {
  SystemRealization real;
  real.n_modes = g.n_modes();
  real.gains = gains;
  real.ell = cert.ell();

  InteractionDesign design = design_interaction(cert, g, gains, tol);
  real.R = std::move(design.R);
  real.Gamma = std::move(design.Gamma);
  real.P = std::move(design.P);
  real.G = hamiltonian_matrix(g, real.R, real.Gamma);
  real.C = coupling_matrix(g, real.P);

  require(is_passive(real.G, std::max(tol, 1e-9)), errc::ill_conditioned,
          "designed Hamiltonian is not passive");
  const auto [local, mode] = is_local_single(real.C, std::max(tol, 1e-9));
  require(local && mode == real.ell, errc::ill_conditioned,
          "designed coupling is not local to the certified mode");
  const ControllabilityReport ctrl = controllability(g, real.R, real.Gamma, real.P);
  require(ctrl.controllable, errc::ill_conditioned, "designed pair is not controllable");
  return real;
}

/// Decides membership, then synthesizes. Rejections surface as typed errors.
inline SystemRealization synthesize(const GraphMatrix& g, const Gains& gains,
                                    double tol = defaults::validation_tol) {
  const MembershipResult result = membership(g);
  if (!result.accepted()) {
    switch (result.reason) {
      case RejectionReason::no_decoupled_mode:
        fail(errc::no_decoupled_mode, result.detail);
      case RejectionReason::imag_not_positive:
        fail(errc::imag_not_positive, result.detail);
      case RejectionReason::non_commuting_parts:
        fail(errc::non_commuting_parts, result.detail);
      case RejectionReason::wrong_spectrum:
        fail(errc::wrong_spectrum, result.detail);
    }
  }
  return synthesize(g, *result.certificate, gains, tol);
}

inline SystemRealization synthesize(const GraphMatrix& g, double tol = defaults::validation_tol) {
  return synthesize(g, default_gains(g.n_modes()), tol);
}

}  // namespace gaussprep
