/* Copyright 2026 The srnlg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Finite-difference certification of every hand-derived backward pass on
// small random instances.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srnlg/finite_diff.hpp"

namespace srnlg {

struct GradCheckConfig {
  std::size_t seeds = 10;
  double eps = 1e-5;
  double tolerance = 1e-4;
  std::size_t embed = 4;
  std::size_t hidden = 4;
  std::size_t vocab = 7;
  std::size_t da = 5;
  std::size_t max_len = 6;  // total sequence length including BOS and EOS
  bool bias = false;
  // Negates the analytic gradient of this matrix before comparison. Used to
  // prove that a broken backward pass is caught and named.
  std::string flip_sign;
};

struct GradCheckCase {
  std::string model;  // cell kind name or "tb-pair"
  std::uint64_t seed = 0;
  bool dropout = false;
  std::vector<GradDiff> diffs;
  GradDiff worst;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double seconds = 0.0;
  double tolerance = 1e-4;

  bool passed() const;
  /// One line per case, then a summary line. Failures name the matrix.
  std::string text() const;
};

/// All three cell kinds and the tied forward/backward pair, `seeds` random
/// instances each. Odd seeds also run with dropout masks.
GradCheckReport run_gradcheck(const GradCheckConfig& config);

}  // namespace srnlg
