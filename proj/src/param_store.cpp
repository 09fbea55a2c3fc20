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

#include "srnlg/param_store.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "srnlg/rng.hpp"

namespace srnlg {

ParamStore::ParamStore(const ParamStore& other) { *this = other; }

ParamStore& ParamStore::operator=(const ParamStore& other) {
  if (this == &other) return *this;
  std::map<const Parameter*, std::shared_ptr<Parameter>> cloned;
  std::map<std::string, std::shared_ptr<Parameter>> fresh;
  for (const auto& [name, p] : other.entries_) {
    auto& c = cloned[p.get()];
    if (!c) c = std::make_shared<Parameter>(*p);
    fresh.emplace(name, c);
  }
  entries_ = std::move(fresh);
  return *this;
}

Parameter& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  if (contains(name)) throw ConfigError("duplicate parameter name: " + name);
  auto p = std::make_shared<Parameter>(Parameter{Matrix(rows, cols), Matrix(rows, cols)});
  auto& ref = *p;
  entries_.emplace(name, std::move(p));
  return ref;
}

void ParamStore::link(const std::string& name, std::shared_ptr<Parameter> shared) {
  if (!shared) throw ConfigError("link: null parameter for " + name);
  entries_[name] = std::move(shared);
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *it->second;
}

std::shared_ptr<Parameter> ParamStore::handle(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for_each_unique([&](const std::string&, const Parameter& p) { n += p.value.size(); });
  return n;
}

void ParamStore::for_each_unique(
    const std::function<void(const std::string&, Parameter&)>& fn) {
  std::set<const Parameter*> seen;
  for (auto& [name, p] : entries_)
    if (seen.insert(p.get()).second) fn(name, *p);
}

void ParamStore::for_each_unique(
    const std::function<void(const std::string&, const Parameter&)>& fn) const {
  std::set<const Parameter*> seen;
  for (const auto& [name, p] : entries_)
    if (seen.insert(p.get()).second) fn(name, *p);
}

void ParamStore::zero_grad() {
  for_each_unique([](const std::string&, Parameter& p) { p.grad.fill(0.0); });
}

void ParamStore::init_uniform(Rng& rng, double lo, double hi) {
  for_each_unique([&](const std::string&, Parameter& p) {
    for (double& x : p.value.data()) x = rng.uniform(lo, hi);
  });
}

bool ParamStore::all_finite() const {
  bool ok = true;
  for_each_unique([&](const std::string&, const Parameter& p) { ok = ok && p.value.all_finite(); });
  return ok;
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for_each_unique([&](const std::string&, const Parameter& p) { s += p.grad.squared_norm(); });
  return std::sqrt(s);
}

bool ParamStore::values_equal(const ParamStore& other) const {
  if (names() != other.names()) return false;
  for (const auto& [name, p] : entries_)
    if (!(p->value == other.at(name).value)) return false;
  return true;
}

}  // namespace srnlg
