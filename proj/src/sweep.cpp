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

#include "srnlg/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "srnlg/evaluation.hpp"
#include "srnlg/rng.hpp"

namespace srnlg {

std::string SweepSeries::to_tsv() const {
  std::string out = "# " + axis + "\tbleu\terr_percent\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%g\t%.6f\t%.6f\n", p.x, p.bleu, p.err_percent);
    out += buf;
  }
  return out;
}

Dataset nested_subset(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("subset fraction must be in (0, 1]");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(data.size()) - 1e-9)));
  Dataset out;
  for (std::size_t i = 0; i < std::min(n, data.size()); ++i) out.push_back(data[order[i]]);
  return out;
}

SweepSeries sweep_beam(const Generator& gen, const Dataset& test, const DecodeConfig& base,
                       const std::vector<std::size_t>& widths, std::size_t jobs) {
  SweepSeries s{"beam", {}};
  for (std::size_t w : widths) {
    DecodeConfig cfg = base;
    cfg.beam.width = w;
    const EvalReport rep =
        evaluate_blocks(test, generate_blocks(gen, test, cfg, jobs), {cfg.top_k, false, false});
    s.points.push_back({static_cast<double>(w), rep.bleu.bleu, rep.err_percent});
  }
  return s;
}

SweepSeries sweep_top_k(const Generator& gen, const Dataset& test, const DecodeConfig& base,
                        const std::vector<std::size_t>& ks, std::size_t beam_width, std::size_t jobs) {
  SweepSeries s{"top_k", {}};
  for (std::size_t k : ks) {
    DecodeConfig cfg = base;
    cfg.beam.width = beam_width;
    cfg.beam.need = std::max(cfg.beam.need, k);
    cfg.top_k = k;
    const EvalReport rep =
        evaluate_blocks(test, generate_blocks(gen, test, cfg, jobs), {k, true, false});
    s.points.push_back({static_cast<double>(k), rep.bleu.bleu, rep.err_percent});
  }
  return s;
}

SweepSeries sweep_proportion(CellKind kind, const DataSplits& splits, const TrainConfig& train_config,
                             const DecodeConfig& decode, const std::vector<double>& fractions,
                             std::uint64_t seed, std::size_t jobs) {
  SweepSeries s{"proportion", {}};
  std::vector<DialogueAct> acts;
  for (const auto* part : {&splits.train, &splits.valid, &splits.test})
    for (const auto& g : *part) acts.push_back(g.da);
  const DASchema schema = DASchema::build(acts);
  for (double f : fractions) {
    const PreparedData data =
        prepare_data(nested_subset(splits.train, f, seed), splits.valid, 1, &schema);
    const TrainResult tr = train(kind, data, train_config, seed);
    const Generator gen{tr.params, data.vocab, data.schema, nullptr};
    const EvalReport rep = evaluate_blocks(splits.test, generate_blocks(gen, splits.test, decode, jobs),
                                           {decode.top_k, false, false});
    s.points.push_back({f, rep.bleu.bleu, rep.err_percent});
  }
  return s;
}

}  // namespace srnlg
