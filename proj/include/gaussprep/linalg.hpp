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
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "gaussprep/errors.hpp"

namespace gaussprep {

using Complex = std::complex<double>;

/// (M + M^T)/2. Products that are symmetric in exact arithmetic go through this
/// so that symmetry-based checks stay exact.
template <typename Derived>
Eigen::MatrixXd symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXcd symmetrize_complex(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.transpose());
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double asymmetry(const Eigen::MatrixXd& m) {
  return max_abs(m - m.transpose());
}

/// Kronecker product of dense real matrices.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Deterministic standard-normal draw (Box-Muller over mt19937_64), so that
/// seeded runs reproduce across standard-library implementations.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 1e-300);
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * M_PI * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1p-53;
  }

  std::uint64_t integer(std::uint64_t bound) { return engine_() % bound; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline Eigen::MatrixXd random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                              NormalSampler& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng();
  return m;
}

/// Random real orthogonal matrix: QR of a Gaussian matrix, signs fixed so that
/// diag(R) > 0. Deterministic for a given sampler state.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, NormalSampler& rng) {
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd g = random_gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

/// Random permutation of {0, ..., n-1} via Fisher-Yates on the sampler.
inline std::vector<int> random_permutation(int n, NormalSampler& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

inline bool is_permutation_vector(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

/// P^T M P for the permutation with P(i, perm[i]) = 1, i.e. slot i of the
/// canonical block form is routed to row/column perm[i] of the output.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> permute_from_slots(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, const std::vector<int>& perm) {
  const auto n = m.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = m(i, j);
  return out;
}

/// Inverse routing: extract the canonical block form from a permuted matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> permute_to_slots(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, const std::vector<int>& perm) {
  const auto n = m.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = m(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  return out;
}

/// Numerical rank from singular values, threshold relative to the largest.
inline int numerical_rank(const Eigen::MatrixXcd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

inline double largest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() == 0 ? 0.0 : sv(0);
}

}  // namespace gaussprep
