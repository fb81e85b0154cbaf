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

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaussprep {

/// Typed failure reasons raised by library operations.
enum class errc {
  asymmetric_input,
  not_positive_definite,
  not_pure,
  singular_block,
  non_positive_determinant,
  imag_not_positive,
  bad_sign_count,
  bad_params,
  bad_gains,
  certificate_mismatch,
  no_decoupled_mode,
  non_commuting_parts,
  wrong_spectrum,
  rank_test_disagreement,
  not_stable,
  ill_conditioned,
  step_too_large,
  bad_indices,
  unphysical,
  no_target,
  shape_mismatch,
  bad_config,
  io_failure,
};

inline std::string_view to_string(errc code) {
  switch (code) {
    case errc::asymmetric_input: return "asymmetric_input";
    case errc::not_positive_definite: return "not_positive_definite";
    case errc::not_pure: return "not_pure";
    case errc::singular_block: return "singular_block";
    case errc::non_positive_determinant: return "non_positive_determinant";
    case errc::imag_not_positive: return "imag_not_positive";
    case errc::bad_sign_count: return "bad_sign_count";
    case errc::bad_params: return "bad_params";
    case errc::bad_gains: return "bad_gains";
    case errc::certificate_mismatch: return "certificate_mismatch";
    case errc::no_decoupled_mode: return "no_decoupled_mode";
    case errc::non_commuting_parts: return "non_commuting_parts";
    case errc::wrong_spectrum: return "wrong_spectrum";
    case errc::rank_test_disagreement: return "rank_test_disagreement";
    case errc::not_stable: return "not_stable";
    case errc::ill_conditioned: return "ill_conditioned";
    case errc::step_too_large: return "step_too_large";
    case errc::bad_indices: return "bad_indices";
    case errc::unphysical: return "unphysical";
    case errc::no_target: return "no_target";
    case errc::shape_mismatch: return "shape_mismatch";
    case errc::bad_config: return "bad_config";
    case errc::io_failure: return "io_failure";
  }
  return "unknown";
}

/// Exception carrying a typed reason code alongside the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace gaussprep
