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

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "srnlg/matrix.hpp"

namespace srnlg {

class Rng;

struct Parameter {
  Matrix value;
  Matrix grad;
};

/// Named parameters with gradient slots, iterated in name order.
///
/// Entries are held through shared pointers so that two stores can alias the
/// same storage (tied weights). Copying a store deep-copies every parameter;
/// aliasing between entries of the same store is preserved in the copy,
/// aliasing with other stores is not.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  /// Adds a zero-initialized parameter. Throws ConfigError on duplicates.
  Parameter& add(const std::string& name, std::size_t rows, std::size_t cols);
  /// Makes `name` refer to an existing parameter object (weight tying).
  void link(const std::string& name, std::shared_ptr<Parameter> shared);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  std::shared_ptr<Parameter> handle(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  /// Visits each distinct parameter once, even when several names alias it.
  void for_each_unique(const std::function<void(const std::string&, Parameter&)>& fn);
  void for_each_unique(
      const std::function<void(const std::string&, const Parameter&)>& fn) const;

  void zero_grad();
  void init_uniform(Rng& rng, double lo, double hi);
  bool all_finite() const;

  /// Global L2 norm of all (unique) gradients.
  double grad_norm() const;

  bool values_equal(const ParamStore& other) const;

 private:
  std::map<std::string, std::shared_ptr<Parameter>> entries_;
};

}  // namespace srnlg
