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
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaussprep/errors.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"

namespace gaussprep {

namespace defaults {
/// Decoupled-row detection and spectrum matching tolerance.
inline constexpr double membership_tol = 1e-8;
/// Orthogonality tolerance for user-supplied basis matrices.
inline constexpr double orthogonality_tol = 1e-9;
}  // namespace defaults

enum class Parity { odd, even };

inline Parity parity_of(int n_modes) { return n_modes % 2 == 1 ? Parity::odd : Parity::even; }

/// Number of paired 2x2 blocks in the canonical form: (N-1)/2 for odd N,
/// (N-2)/2 for even N (an extra scalar block precedes the pairs).
inline int n_paired_blocks(int n_modes) {
  return n_modes % 2 == 1 ? (n_modes - 1) / 2 : (n_modes - 2) / 2;
}

/// The two 2x2 complex symmetric blocks with spectrum {z, -1/z}:
/// [[a, b], [b, a]] and [[a, -b], [-b, a]] with a = (z^2-1)/(2z),
/// b = (z^2+1)/(2z). The [1, 1] direction carries eigenvalue a+b = z for the
/// plus member and a-b = -1/z for the minus member; [1, -1] the other way
/// around.
struct BlockPair {
  Complex zbar;
  Eigen::Matrix2cd plus;
  Eigen::Matrix2cd minus;
};

inline BlockPair block_pair(Complex zbar) {
  require(zbar.imag() > 0.0, errc::imag_not_positive,
          "base scalar must lie in the open upper half-plane");
  const Complex a = (zbar * zbar - 1.0) / (2.0 * zbar);
  const Complex b = (zbar * zbar + 1.0) / (2.0 * zbar);
  BlockPair pair;
  pair.zbar = zbar;
  pair.plus << a, b, b, a;
  pair.minus << a, -b, -b, a;
  return pair;
}

/// Parameters selecting one member of the preparable family.
///
/// The graph matrix is assembled as P^T diag(zbar, Q^T B Q) P where B is block
/// diagonal: for odd N, n_paired_blocks 2x2 blocks chosen by block_signs
/// (+1 = plus member, -1 = minus member); for even N, a leading scalar -1/zbar
/// followed by the 2x2 blocks. perm[i] is the (0-based) mode that slot i of
/// the block form is routed to; the reservoir-coupled mode is perm[0].
struct FamilyParams {
  int n_modes = 0;
  Complex zbar;
  std::vector<int> perm;
  Eigen::MatrixXd q_orth;  // (N-1) x (N-1)
  std::vector<int> block_signs;
};

inline void validate_family_params(const FamilyParams& params,
                                   double tol_orth = defaults::orthogonality_tol) {
  require(params.n_modes >= 1, errc::bad_params, "n_modes must be >= 1");
  require(params.zbar.imag() > 0.0, errc::imag_not_positive,
          "base scalar must lie in the open upper half-plane");
  require(static_cast<int>(params.perm.size()) == params.n_modes &&
              is_permutation_vector(params.perm),
          errc::bad_params, "perm must be a permutation of 0..N-1");
  const int m = params.n_modes - 1;
  require(params.q_orth.rows() == m && params.q_orth.cols() == m, errc::bad_params,
          "orthogonal factor must be (N-1) x (N-1)");
  if (m > 0) {
    const double defect =
        max_abs(params.q_orth.transpose() * params.q_orth - Eigen::MatrixXd::Identity(m, m));
    require(defect <= tol_orth * std::max(1.0, max_abs(params.q_orth)), errc::bad_params,
            "basis matrix is not orthogonal within tolerance");
  }
  const auto expected_signs = static_cast<std::size_t>(n_paired_blocks(params.n_modes));
  if (params.block_signs.size() != expected_signs) {
    std::ostringstream msg;
    msg << "expected " << expected_signs << " block signs, got " << params.block_signs.size();
    fail(errc::bad_sign_count, msg.str());
  }
  for (int s : params.block_signs)
    require(s == 1 || s == -1, errc::bad_sign_count, "block signs must be +1 or -1");
}

/// Assembles the (N-1) x (N-1) block-diagonal core from the sign choices.
inline Eigen::MatrixXcd family_block_core(int n_modes, Complex zbar,
                                          const std::vector<int>& block_signs) {
  const int m = n_modes - 1;
  Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(m, m);
  int offset = 0;
  if (n_modes % 2 == 0) {
    core(0, 0) = -1.0 / zbar;
    offset = 1;
  }
  if (!block_signs.empty()) {
    const BlockPair pair = block_pair(zbar);
    for (std::size_t j = 0; j < block_signs.size(); ++j) {
      const auto& blk = block_signs[j] > 0 ? pair.plus : pair.minus;
      core.block<2, 2>(offset + 2 * static_cast<int>(j), offset + 2 * static_cast<int>(j)) = blk;
    }
  }
  return core;
}

/// Builds the graph matrix of the selected family member. The output passes
/// validate_graph by construction.
inline GraphMatrix build_graph(const FamilyParams& params,
                               double tol = defaults::validation_tol) {
  validate_family_params(params);
  const int n = params.n_modes;
  Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(n, n);
  inner(0, 0) = params.zbar;
  if (n > 1) {
    const Eigen::MatrixXcd core = family_block_core(n, params.zbar, params.block_signs);
    const Eigen::MatrixXcd q = params.q_orth.cast<Complex>();
    inner.bottomRightCorner(n - 1, n - 1) = q.transpose() * core * q;
  }
  const Eigen::MatrixXcd z = permute_from_slots<Complex>(inner, params.perm);
  return validate_graph(z.real(), z.imag(), tol);
}

/// Witness that a graph matrix belongs to the preparable family, carrying the
/// data needed to rebuild it (and to design a preparing system): the routing
/// permutation (coupled mode = perm[0]), the base scalar, the orthogonal
/// factor and the per-block member choices.
struct MembershipCertificate {
  Complex zbar;
  std::vector<int> perm;
  Eigen::MatrixXd q_orth;
  std::vector<int> block_signs;
  std::vector<Complex> spectrum;  // eigenvalues of the decoupled block, sorted by (Re, Im)
  Parity parity = Parity::odd;
  bool unique_mode = true;

  int n_modes() const { return static_cast<int>(perm.size()); }
  /// 1-based index of the reservoir-coupled mode.
  int ell() const { return perm.empty() ? 0 : perm[0] + 1; }
};

enum class RejectionReason {
  no_decoupled_mode,
  imag_not_positive,
  non_commuting_parts,
  wrong_spectrum,
};

inline std::string_view to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::no_decoupled_mode: return "no_decoupled_mode";
    case RejectionReason::imag_not_positive: return "imag_not_positive";
    case RejectionReason::non_commuting_parts: return "non_commuting_parts";
    case RejectionReason::wrong_spectrum: return "wrong_spectrum";
  }
  return "unknown";
}

struct MembershipResult {
  std::optional<MembershipCertificate> certificate;
  RejectionReason reason = RejectionReason::no_decoupled_mode;
  std::string detail;

  bool accepted() const { return certificate.has_value(); }
};

/// Jointly diagonalizes a commuting pair of real symmetric matrices by one
/// real orthogonal basis: eigenspaces of Yb are refined by the restriction of
/// Xb, which is exact because the two commute. Output ordering is
/// deterministic: eigenvalues d_k = x_k + i y_k sorted by (Re, Im), each
/// column's first significant entry made positive.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXcd> joint_diagonalize(
    const Eigen::MatrixXd& xb, const Eigen::MatrixXd& yb,
    double tol = defaults::membership_tol) {
  const Eigen::Index m = xb.rows();
  require(xb.cols() == m && yb.rows() == m && yb.cols() == m, errc::shape_mismatch,
          "joint diagonalization needs square matrices of equal size");
  if (m == 0) return {Eigen::MatrixXd(0, 0), Eigen::VectorXcd(0)};

  const double scale = std::max({max_abs(xb), max_abs(yb), 1.0});
  const double commutator = max_abs(xb * yb - yb * xb);
  if (commutator > tol * scale * scale) {
    std::ostringstream msg;
    msg << "commutator norm " << commutator << " exceeds " << tol * scale * scale;
    fail(errc::non_commuting_parts, msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_y(yb);
  Eigen::MatrixXd q = es_y.eigenvectors();
  const Eigen::VectorXd wy = es_y.eigenvalues();

  // Refine within clusters of Yb eigenvalues by diagonalizing Xb there.
  const double cluster_tol = 1e-7 * std::max(max_abs(yb), 1.0);
  Eigen::Index i = 0;
  while (i < m) {
    Eigen::Index j = i + 1;
    while (j < m && std::abs(wy(j) - wy(i)) <= cluster_tol) ++j;
    if (j - i > 1) {
      const Eigen::MatrixXd sub = q.middleCols(i, j - i);
      const Eigen::MatrixXd xs = symmetrize(sub.transpose() * xb * sub);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_x(xs);
      q.middleCols(i, j - i) = sub * es_x.eigenvectors();
    }
    i = j;
  }

  Eigen::VectorXcd d(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::VectorXd col = q.col(k);
    d(k) = Complex(col.dot(xb * col), col.dot(yb * col));
  }

  // Residual off-diagonal coupling must be below tolerance.
  const Eigen::MatrixXcd zq = q.transpose() * (xb.cast<Complex>() + Complex(0, 1) * yb.cast<Complex>()) * q;
  const double off = max_abs(Eigen::MatrixXcd(zq - Eigen::MatrixXcd(d.asDiagonal())));
  if (off > std::max(tol, 1e-7) * scale) {
    std::ostringstream msg;
    msg << "residual off-diagonal coupling " << off << " after joint diagonalization";
    fail(errc::non_commuting_parts, msg.str());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&d](Eigen::Index a, Eigen::Index b) {
    if (d(a).real() != d(b).real()) return d(a).real() < d(b).real();
    return d(a).imag() < d(b).imag();
  });
  Eigen::MatrixXd q_sorted(m, m);
  Eigen::VectorXcd d_sorted(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    q_sorted.col(k) = q.col(order[static_cast<std::size_t>(k)]);
    d_sorted(k) = d(order[static_cast<std::size_t>(k)]);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index r = 0; r < m; ++r) {
      if (std::abs(q_sorted(r, k)) > 1e-12) {
        if (q_sorted(r, k) < 0) q_sorted.col(k) *= -1.0;
        break;
      }
    }
  }
  return {q_sorted, d_sorted};
}

/// Rebuilds the graph matrix described by a certificate.
inline GraphMatrix graph_from_certificate(const MembershipCertificate& cert) {
  FamilyParams params{cert.n_modes(), cert.zbar, cert.perm, cert.q_orth, cert.block_signs};
  return build_graph(params);
}

/// Certificate for a graph matrix constructed from explicit parameters. The
/// spectrum is filled with the implied eigenvalue multiset.
inline MembershipCertificate certificate_from_params(const FamilyParams& params) {
  validate_family_params(params);
  MembershipCertificate cert;
  cert.zbar = params.zbar;
  cert.perm = params.perm;
  cert.q_orth = params.q_orth;
  cert.block_signs = params.block_signs;
  cert.parity = parity_of(params.n_modes);
  const Complex w = -1.0 / params.zbar;
  if (params.n_modes % 2 == 0) cert.spectrum.push_back(w);
  for (std::size_t j = 0; j < params.block_signs.size(); ++j) {
    cert.spectrum.push_back(params.zbar);
    cert.spectrum.push_back(w);
  }
  std::sort(cert.spectrum.begin(), cert.spectrum.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return cert;
}

namespace detail {

/// Attempts to certify membership with a given decoupled mode (0-based).
/// Returns either a certificate or the rejection reason for this candidate.
inline std::pair<std::optional<MembershipCertificate>, MembershipResult> try_candidate(
    const GraphMatrix& g, int mode, double tol, double scale) {
  const int n = g.n_modes();
  MembershipResult rejection;
  const Complex zbar(g.X(mode, mode), g.Y(mode, mode));
  if (zbar.imag() <= 0.0) {
    rejection.reason = RejectionReason::imag_not_positive;
    rejection.detail = "decoupled-mode scalar has non-positive imaginary part";
    return {std::nullopt, rejection};
  }

  MembershipCertificate cert;
  cert.zbar = zbar;
  cert.parity = parity_of(n);
  cert.perm.push_back(mode);
  for (int j = 0; j < n; ++j)
    if (j != mode) cert.perm.push_back(j);

  if (n == 1) {
    cert.q_orth = Eigen::MatrixXd(0, 0);
    return {cert, rejection};
  }

  // Remaining block with the decoupled mode removed.
  const int m = n - 1;
  Eigen::MatrixXd xb(m, m), yb(m, m);
  {
    int r = 0;
    for (int a = 0; a < n; ++a) {
      if (a == mode) continue;
      int c = 0;
      for (int b = 0; b < n; ++b) {
        if (b == mode) continue;
        xb(r, c) = g.X(a, b);
        yb(r, c) = g.Y(a, b);
        ++c;
      }
      ++r;
    }
  }

  Eigen::MatrixXd q_diag;
  Eigen::VectorXcd d;
  try {
    std::tie(q_diag, d) = joint_diagonalize(xb, yb, tol);
  } catch (const Error& e) {
    if (e.code() != errc::non_commuting_parts) throw;
    rejection.reason = RejectionReason::non_commuting_parts;
    rejection.detail = e.what();
    return {std::nullopt, rejection};
  }

  // Expected multiset: zbar and -1/zbar with parity-dependent multiplicities.
  const Complex w = -1.0 / zbar;
  const int pairs = n_paired_blocks(n);
  std::vector<Complex> targets;
  std::vector<bool> target_is_zbar;
  for (int j = 0; j < pairs; ++j) {
    targets.push_back(zbar);
    target_is_zbar.push_back(true);
  }
  const int w_count = n % 2 == 1 ? pairs : pairs + 1;
  for (int j = 0; j < w_count; ++j) {
    targets.push_back(w);
    target_is_zbar.push_back(false);
  }

  const double match_tol = std::max(tol * scale, 1e-10);
  std::vector<bool> used(targets.size(), false);
  std::vector<int> zbar_slots, w_slots;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (used[t]) continue;
      const double dist = std::abs(d(k) - targets[t]);
      if (best < 0 || dist < best_dist) {
        best = static_cast<int>(t);
        best_dist = dist;
      }
    }
    if (best < 0 || best_dist > match_tol) {
      rejection.reason = RejectionReason::wrong_spectrum;
      std::ostringstream msg;
      msg << "eigenvalue " << d(k) << " does not match the required multiset";
      rejection.detail = msg.str();
      return {std::nullopt, rejection};
    }
    used[static_cast<std::size_t>(best)] = true;
    (target_is_zbar[static_cast<std::size_t>(best)] ? zbar_slots : w_slots)
        .push_back(static_cast<int>(k));
  }

  // Regroup the diagonal form into canonical 2x2 blocks: each (zbar, -1/zbar)
  // pair rotates into a plus-member block via [[1,1],[1,-1]]/sqrt(2); for even
  // N one -1/zbar stays as the scalar block. The orthogonal factor becomes
  // Q = B * Q_perm^T.
  std::vector<int> col_order;
  if (n % 2 == 0) {
    col_order.push_back(w_slots.back());
    w_slots.pop_back();
  }
  for (int j = 0; j < pairs; ++j) {
    col_order.push_back(zbar_slots[static_cast<std::size_t>(j)]);
    col_order.push_back(w_slots[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd q_perm(m, m);
  for (int k = 0; k < m; ++k) q_perm.col(k) = q_diag.col(col_order[static_cast<std::size_t>(k)]);

  Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(m, m);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  int offset = n % 2 == 0 ? 1 : 0;
  for (int j = 0; j < pairs; ++j) {
    Eigen::Matrix2d u;
    u << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
    rotation.block<2, 2>(offset + 2 * j, offset + 2 * j) = u;
  }
  cert.q_orth = rotation * q_perm.transpose();
  cert.block_signs.assign(static_cast<std::size_t>(pairs), 1);
  cert.spectrum.assign(d.data(), d.data() + d.size());

  // Final gate: the certificate must reproduce the input.
  const GraphMatrix rebuilt = graph_from_certificate(cert);
  const double err = std::max(max_abs(rebuilt.X - g.X), max_abs(rebuilt.Y - g.Y));
  if (err > std::max(10.0 * tol, 1e-7) * scale) {
    rejection.reason = RejectionReason::wrong_spectrum;
    std::ostringstream msg;
    msg << "certificate reconstruction error " << err;
    rejection.detail = msg.str();
    return {std::nullopt, rejection};
  }
  return {cert, rejection};
}

}  // namespace detail

/// Decides whether a graph matrix belongs to the preparable family.
///
/// Every mode whose off-diagonal row vanishes (within tol) is a candidate for
/// the reservoir-coupled mode; candidates are tried in increasing index order
/// and the first one that certifies wins. On rejection the reason reported is
/// the one from the candidate that progressed furthest.
inline MembershipResult membership(const GraphMatrix& g,
                                   double tol = defaults::membership_tol) {
  const int n = g.n_modes();
  const double scale = std::max({max_abs(g.X), max_abs(g.Y), 1.0});
  MembershipResult result;

  std::vector<int> candidates;
  for (int mode = 0; mode < n; ++mode) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == mode) continue;
      off = std::max({off, std::abs(g.X(mode, j)), std::abs(g.Y(mode, j))});
    }
    if (n == 1 || off <= tol * scale) candidates.push_back(mode);
  }
  if (candidates.empty()) {
    result.reason = RejectionReason::no_decoupled_mode;
    result.detail = "no mode is decoupled from the rest of the graph";
    return result;
  }

  auto rank_of = [](RejectionReason r) {
    switch (r) {
      case RejectionReason::no_decoupled_mode: return 0;
      case RejectionReason::imag_not_positive: return 1;
      case RejectionReason::non_commuting_parts: return 2;
      case RejectionReason::wrong_spectrum: return 3;
    }
    return 0;
  };

  bool have_rejection = false;
  for (int mode : candidates) {
    auto [cert, rejection] = detail::try_candidate(g, mode, tol, scale);
    if (cert) {
      cert->unique_mode = candidates.size() == 1;
      result.certificate = std::move(cert);
      return result;
    }
    if (!have_rejection || rank_of(rejection.reason) > rank_of(result.reason)) {
      result.reason = rejection.reason;
      result.detail = rejection.detail;
      have_rejection = true;
    }
  }
  return result;
}

}  // namespace gaussprep
