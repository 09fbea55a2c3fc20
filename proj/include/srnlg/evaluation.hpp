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

// Test-set generation and scoring shared by the evaluate and sweep commands.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "srnlg/dataset.hpp"
#include "srnlg/decoding.hpp"
#include "srnlg/metrics.hpp"

namespace srnlg {

RealizationBlock to_block(const std::string& da_text, const GenerateResult& result);

/// Runs generate() for every DA group; DAs with an act type unknown to the
/// schema get an empty block. `jobs` > 1 splits the DAs across
/// threads; the output order and content do not depend on `jobs`.
std::vector<RealizationBlock> generate_blocks(const Generator& gen, const Dataset& data,
                                              const DecodeConfig& config, std::size_t jobs = 1);

std::string format_blocks(const std::vector<RealizationBlock>& blocks);

struct EvalOptions {
  std::size_t top_k = 5;          // realizations averaged into ERR
  bool bleu_over_top_k = false;   // every top-k realization is a BLEU hypothesis
  bool smoothing = false;
};

/// BLEU of the lexicalized top-1 realization against each DA's references
/// and ERR averaged over the top-k realizations. Blocks are matched to DA
/// groups by exact DA string; a DA without a block is an error that lists
/// every missing DA.
EvalReport evaluate_blocks(const Dataset& test, const std::vector<RealizationBlock>& blocks,
                           const EvalOptions& options = {});

}  // namespace srnlg
