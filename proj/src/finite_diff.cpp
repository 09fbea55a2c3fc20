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

#include "srnlg/finite_diff.hpp"

#include <algorithm>
#include <cmath>

namespace srnlg {

GradSnapshot finite_diff_grad(const std::function<double(const ParamStore&)>& f,
                              ParamStore& params, double eps) {
  if (!(eps > 0.0)) throw ConfigError("finite_diff_grad: eps must be positive");
  GradSnapshot out;
  params.for_each_unique([&](const std::string& name, Parameter& p) {
    Matrix g(p.value.rows(), p.value.cols());
    auto values = p.value.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = f(params);
      values[i] = saved - eps;
      const double down = f(params);
      values[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw NonFiniteError(name, "finite_diff_grad: non-finite objective while probing " + name);
      g.data()[i] = (up - down) / (2.0 * eps);
    }
    out.emplace(name, std::move(g));
  });
  return out;
}

std::vector<GradDiff> compare_gradients(const ParamStore& params, const GradSnapshot& numeric) {
  std::vector<GradDiff> out;
  for (const auto& [name, num] : numeric) {
    const Matrix& ana = params.at(name).grad;
    require_dims(ana.same_shape(num), "compare_gradients: " + name);
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
      const double a = ana.data()[i], n = num.data()[i];
      diff2 += (a - n) * (a - n);
      a2 += a * a;
      n2 += n * n;
      max_abs = std::max(max_abs, std::abs(a - n));
    }
    const double scale = std::sqrt(std::max(a2, n2));
    // Both gradients numerically zero: fall back to the absolute error.
    const double rel = scale < 1e-10 ? std::sqrt(diff2) : std::sqrt(diff2) / scale;
    out.push_back({name, rel, max_abs});
  }
  return out;
}

}  // namespace srnlg
