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

#include "gaussprep/state_family.hpp"
#include "gaussprep/synthesis.hpp"

namespace gaussprep::presets {

// Reference configuration: a five-oscillator chain with nearest-neighbour
// passive couplings whose central mode is damped by the reservoir. The steady
// state entangles modes (1,5) and (2,4) with log-negativity 2|alpha| each,
// while the central mode stays separable. The closed-form graph matrix,
// the family parameters that generate it, and gains for which the designed
// interaction matrix comes out integer-valued are all provided, which makes
// the configuration a convenient end-to-end regression target.

/// Closed-form graph matrix of the chain state: X = 0 and
/// Y = [[c, 0, 0, 0, s], [0, c, 0, -s, 0], [0, 0, c+s, 0, 0],
///      [0, -s, 0, c, 0], [s, 0, 0, 0, c]] with c = cosh(2a), s = sinh(2a).
inline GraphMatrix five_mode_chain_graph(double alpha) {
  const double c = std::cosh(2.0 * alpha);
  const double s = std::sinh(2.0 * alpha);
  Eigen::MatrixXd y(5, 5);
  y << c, 0, 0, 0, s,
       0, c, 0, -s, 0,
       0, 0, c + s, 0, 0,
       0, -s, 0, c, 0,
       s, 0, 0, 0, c;
  return validate_graph(Eigen::MatrixXd::Zero(5, 5), y);
}

/// Family parameters reproducing five_mode_chain_graph: base scalar
/// i e^(2 alpha) on mode 3, a fixed orthogonal mixing of the remaining four
/// modes, and one block of each member type.
inline FamilyParams five_mode_chain_params(double alpha) {
  FamilyParams params;
  params.n_modes = 5;
  params.zbar = Complex(0.0, std::exp(2.0 * alpha));
  params.perm = {2, 0, 4, 1, 3};
  const double h = std::sqrt(2.0) / 2.0;
  params.q_orth.resize(4, 4);
  params.q_orth << -h, 0, -h, 0,
                    0, -h, 0, h,
                    0, h, 0, h,
                   -h, 0, h, 0;
  params.block_signs = {1, -1};
  return params;
}

/// Gains for which the designed interaction matrix is integer-valued
/// (tridiagonal with couplings 2) and the Lindblad operator becomes
/// cosh(alpha) a_3 + sinh(alpha) a_3^*.
inline Gains five_mode_chain_gains(double alpha) {
  Gains gains;
  gains.taus = {-std::sqrt(2.0), std::sqrt(2.0)};
  gains.rs = {1.0, 3.0};
  gains.tau_p = Complex(0.0, (std::cosh(alpha) - std::sinh(alpha)) / std::sqrt(2.0));
  return gains;
}

/// The interaction matrix produced by the chain gains, independent of alpha.
inline Eigen::MatrixXd five_mode_chain_interaction() {
  Eigen::MatrixXd r(5, 5);
  r << -1, 2, 0, 0, 0,
        2, -1, 2, 0, 0,
        0, 2, 0, 2, 0,
        0, 0, 2, 1, 2,
        0, 0, 0, 2, 1;
  return r;
}

}  // namespace gaussprep::presets
