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

// Series over training-set proportion, beam width and top-k, for plotting.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srnlg/dataset.hpp"
#include "srnlg/decoding.hpp"
#include "srnlg/training.hpp"

namespace srnlg {

struct SweepPoint {
  double x = 0.0;
  double bleu = 0.0;
  double err_percent = 0.0;
};

struct SweepSeries {
  std::string axis;  // "proportion", "beam" or "top_k"
  std::vector<SweepPoint> points;

  /// Header line then one "x<TAB>bleu<TAB>err" row per point.
  std::string to_tsv() const;
};

/// The first ceil(fraction * n) DA groups of one seeded permutation, so that
/// smaller fractions are always subsets of larger ones.
Dataset nested_subset(const Dataset& data, double fraction, std::uint64_t seed);

SweepSeries sweep_beam(const Generator& gen, const Dataset& test, const DecodeConfig& base,
                       const std::vector<std::size_t>& widths, std::size_t jobs = 1);

/// Every one of the top k realizations counts as a BLEU hypothesis and
/// towards ERR. `need` is raised to k where necessary.
SweepSeries sweep_top_k(const Generator& gen, const Dataset& test, const DecodeConfig& base,
                        const std::vector<std::size_t>& ks, std::size_t beam_width = 100,
                        std::size_t jobs = 1);

/// Trains one model per fraction on nested training subsets and evaluates
/// each on the full test split.
SweepSeries sweep_proportion(CellKind kind, const DataSplits& splits, const TrainConfig& train_config,
                             const DecodeConfig& decode, const std::vector<double>& fractions,
                             std::uint64_t seed, std::size_t jobs = 1);

}  // namespace srnlg
