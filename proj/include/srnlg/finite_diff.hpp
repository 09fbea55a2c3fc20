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

// Central finite differences over a ParamStore. This is the oracle every
// hand-derived backward pass in the repository is checked against.

#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "srnlg/param_store.hpp"

namespace srnlg {

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& param, const std::string& msg)
      : std::runtime_error(msg), param_(param) {}
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

using GradSnapshot = std::map<std::string, Matrix>;

/// (f(θ+eps) - f(θ-eps)) / 2eps for every scalar in every distinct
/// parameter. Values are restored bit-exactly after each probe.
GradSnapshot finite_diff_grad(const std::function<double(const ParamStore&)>& f,
                              ParamStore& params, double eps = 1e-5);

struct GradDiff {
  std::string name;
  double rel_error = 0.0;  // ||a - n|| / max(||a||, ||n||)
  double max_abs_error = 0.0;
};

/// Compares the analytic gradients held in `params` with a snapshot.
std::vector<GradDiff> compare_gradients(const ParamStore& params, const GradSnapshot& numeric);

}  // namespace srnlg
