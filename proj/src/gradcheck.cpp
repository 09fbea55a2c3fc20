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

#include "srnlg/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "srnlg/cells.hpp"
#include "srnlg/rng.hpp"
#include "srnlg/training.hpp"
#include "srnlg/vocab.hpp"

namespace srnlg {
namespace {

constexpr double kInitScale = 0.5;
constexpr double kDropout = 0.3;

std::vector<int> random_sequence(const GradCheckConfig& c, Rng& rng) {
  const std::size_t interior = rng.below(c.max_len - 1);  // 0 .. max_len-2
  std::vector<int> ids{Vocab::kBos};
  for (std::size_t i = 0; i < interior; ++i)
    ids.push_back(static_cast<int>(3 + rng.below(c.vocab - 3)));
  ids.push_back(Vocab::kEos);
  return ids;
}

Vector random_z(std::size_t n, Rng& rng) {
  Vector z(n, 0.0);
  for (double& v : z) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  z[rng.below(n)] = 1.0;
  return z;
}

void flip(ParamStore& store, const std::string& target) {
  if (target.empty()) return;
  for (const auto& name : store.names()) {
    const auto slash = name.find('/');
    const std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
    if (base == target)
      for (double& g : store.at(name).grad.data()) g = -g;
  }
}

void finish_case(GradCheckCase& c, double tolerance) {
  c.worst = {};
  for (const auto& d : c.diffs) {
    if (d.rel_error >= c.worst.rel_error || c.worst.name.empty()) c.worst = d;
    if (!(d.rel_error <= tolerance)) c.passed = false;
  }
}

GradCheckCase check_cell(CellKind kind, const GradCheckConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams m(kind, {cfg.vocab, cfg.embed, cfg.hidden, cfg.da, cfg.bias});
  m.store().init_uniform(rng, -kInitScale, kInitScale);
  const std::vector<int> ids = random_sequence(cfg, rng);
  const Vector z = random_z(cfg.da, rng);
  GradCheckCase c;
  c.model = std::string(to_string(kind));
  c.seed = seed;
  c.dropout = seed % 2 == 1;
  DropoutMasks masks;
  if (c.dropout) masks = make_dropout_masks(ids.size() - 1, m.dims(), kDropout, rng);
  const DropoutMasks* mp = c.dropout ? &masks : nullptr;

  m.store().zero_grad();
  backward_sequence(m, forward_sequence(m, ids, z, mp), ids, z);
  flip(m.store(), cfg.flip_sign);
  const GradSnapshot num = finite_diff_grad(
      [&](const ParamStore&) { return forward_sequence(m, ids, z, mp).loss; }, m.store(), cfg.eps);
  c.diffs = compare_gradients(m.store(), num);
  finish_case(c, cfg.tolerance);
  return c;
}

GradCheckCase check_tied(const GradCheckConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const ModelDims dims{cfg.vocab, cfg.embed, cfg.hidden, cfg.da, cfg.bias};
  ModelParams fw(CellKind::SrgruContext, dims), bw(CellKind::SrgruContext, dims);
  fw.store().init_uniform(rng, -kInitScale, kInitScale);
  bw.store().init_uniform(rng, -kInitScale, kInitScale);
  TiedPair pair(std::move(fw), std::move(bw));
  ParamStore view = pair.joint_view();
  const std::vector<int> ids = random_sequence(cfg, rng);
  const Vector z = random_z(cfg.da, rng);
  GradCheckCase c;
  c.model = "tb-pair";
  c.seed = seed;
  c.dropout = seed % 2 == 1;
  DropoutMasks fm, bm;
  if (c.dropout) {
    fm = make_dropout_masks(ids.size() - 1, dims, kDropout, rng);
    bm = make_dropout_masks(ids.size() - 1, dims, kDropout, rng);
  }
  const DropoutMasks* fp = c.dropout ? &fm : nullptr;
  const DropoutMasks* bp = c.dropout ? &bm : nullptr;
  auto loss = [&](const ParamStore&) {
    return forward_sequence(pair.forward(), ids, z, fp).loss +
           forward_sequence(pair.backward(), reverse_sequence(ids), z, bp).loss;
  };

  view.zero_grad();
  tied_sequence_backward(pair, ids, z, fp, bp);
  flip(view, cfg.flip_sign);
  const GradSnapshot num = finite_diff_grad(loss, view, cfg.eps);
  c.diffs = compare_gradients(view, num);
  finish_case(c, cfg.tolerance);
  return c;
}

}  // namespace

bool GradCheckReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const GradCheckCase& c) { return c.passed; });
}

std::string GradCheckReport::text() const {
  std::string out;
  char buf[256];
  std::size_t failed = 0;
  for (const auto& c : cases) {
    std::snprintf(buf, sizeof buf, "%s %-13s seed %2llu%s worst %s rel %.3e\n",
                  c.passed ? "PASS" : "FAIL", c.model.c_str(),
                  static_cast<unsigned long long>(c.seed), c.dropout ? " dropout" : "        ",
                  c.worst.name.c_str(), c.worst.rel_error);
    out += buf;
    if (c.passed) continue;
    ++failed;
    for (const auto& d : c.diffs)
      if (!(d.rel_error <= tolerance) || d.name == c.worst.name) {
        std::snprintf(buf, sizeof buf, "  %s rel %.3e max_abs %.3e\n", d.name.c_str(), d.rel_error,
                      d.max_abs_error);
        out += buf;
      }
  }
  std::snprintf(buf, sizeof buf, "%zu/%zu cases passed in %.2fs\n", cases.size() - failed,
                cases.size(), seconds);
  return out + buf;
}

GradCheckReport run_gradcheck(const GradCheckConfig& config) {
  if (config.vocab < 4) throw ConfigError("gradcheck needs at least one word besides BOS/EOS/UNK");
  if (config.max_len < 2) throw ConfigError("gradcheck max_len must be at least 2");
  if (config.da == 0 || config.seeds == 0) throw ConfigError("gradcheck needs da > 0 and seeds > 0");
  const auto start = std::chrono::steady_clock::now();
  GradCheckReport rep;
  rep.tolerance = config.tolerance;
  for (CellKind k : {CellKind::GruBase, CellKind::SrgruBase, CellKind::SrgruContext})
    for (std::uint64_t s = 1; s <= config.seeds; ++s) rep.cases.push_back(check_cell(k, config, s));
  for (std::uint64_t s = 1; s <= config.seeds; ++s) rep.cases.push_back(check_tied(config, s));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace srnlg
