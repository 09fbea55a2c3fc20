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

// Over-generation with beam search followed by slot-error reranking.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srnlg/cells.hpp"
#include "srnlg/da_schema.hpp"
#include "srnlg/dialogue_act.hpp"
#include "srnlg/slot_error.hpp"
#include "srnlg/vocab.hpp"

namespace srnlg {

struct Hypothesis {
  std::vector<int> tokens;  // starts with BOS; ends with EOS once finished
  double nll = 0.0;
  bool finished = false;
  bool forced = false;  // EOS appended at max_len rather than chosen
  Vector hidden;
};

struct BeamConfig {
  std::size_t width = 10;
  std::size_t need = 20;  // stop once this many hypotheses have finished
  std::size_t max_len = 100;
};

struct BeamResult {
  std::vector<Hypothesis> hypotheses;  // sorted by NLL, then token ids
  bool insufficient = false;           // fewer than `need` finished
};

/// Pruning record for one expansion step; used by tests to certify that
/// nothing better than a kept expansion was discarded.
struct BeamStepInfo {
  std::size_t step = 0;
  std::size_t kept = 0;
  std::size_t discarded = 0;
  double worst_kept_nll = 0.0;
  double best_discarded_nll = 0.0;  // +inf when nothing was discarded
};

/// Standard beam search by cumulative NLL without length normalization. At
/// each step the `width` best expansions of all live hypotheses are kept;
/// those ending in EOS move to the finished pool and the rest stay live. BOS
/// and UNK are never emitted. Ties are broken by the lexicographically
/// smaller token-id sequence.
BeamResult beam_search(const ModelParams& model, std::span<const double> z, const BeamConfig& config,
                       const std::function<void(const BeamStepInfo&)>& observer = {});

struct RerankCandidate {
  std::vector<int> ids;
  Tokens tokens;  // delexicalized, without BOS/EOS
  double f_fw = 0.0;
  std::optional<double> f_bw;
  SlotError slot;
  double r = 0.0;
};

/// R = F_fw (+ F_bw) + lambda * ERR, then ascending sort by (R, F_fw, tokens).
void rank_candidates(std::vector<RerankCandidate>& candidates, double lambda);

/// Scores finished hypotheses against the DA. When `backward` is given, F_bw
/// is its NLL on the reversed sequence.
std::vector<RerankCandidate> rerank(const std::vector<Hypothesis>& hypotheses, const DialogueAct& da,
                                    const Vocab& vocab, std::span<const double> z, double lambda,
                                    const ModelParams* backward = nullptr);

struct DecodeConfig {
  BeamConfig beam;
  std::size_t top_k = 5;
  double lambda = 1000.0;
};

/// Read-only bundle of everything decoding needs.
struct Generator {
  const ModelParams& forward;
  const Vocab& vocab;
  const DASchema& schema;
  const ModelParams* backward = nullptr;
};

struct Realization {
  std::string text;  // lexicalized surface form
  Tokens delex;
  double r = 0.0;
  double f_fw = 0.0;
  std::optional<double> f_bw;
  SlotError slot;
};

struct GenerateResult {
  std::vector<Realization> realizations;
  bool short_pool = false;  // fewer than top_k candidates available
  std::size_t unknown_features = 0;
};

GenerateResult generate(const Generator& gen, const DialogueAct& da, const DecodeConfig& config);

/// Greedy (beam 1) delexicalized output.
Tokens greedy_decode(const ModelParams& model, const Vocab& vocab, std::span<const double> z,
                     std::size_t max_len);

// Realization files: per DA, the DA string on its own line, then one
// "R<TAB>F_fw<TAB>ERR<TAB>utterance" line per realization, then a blank line.
struct RealizationLine {
  double r = 0.0;
  double f_fw = 0.0;
  double err = 0.0;
  std::string utterance;
};

struct RealizationBlock {
  std::string da_text;
  std::vector<RealizationLine> lines;
};

std::string format_realizations(const std::string& da_text, const GenerateResult& result);
std::vector<RealizationBlock> parse_realizations(std::string_view text);

}  // namespace srnlg
