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

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "srnlg/dialogue_act.hpp"
#include "srnlg/text.hpp"

namespace srnlg {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BleuReport {
  double bleu = 0.0;
  std::array<double, 4> precisions{};  // clipped n-gram precision, n = 1..4
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;  // sum of closest reference lengths
};

/// Corpus BLEU-4: clipped counts against the max count over each reference
/// group, closest-reference brevity penalty (ties go to the shorter
/// reference), unweighted geometric mean. Zero if any precision is zero
/// unless `smoothing` adds one to numerator and denominator for n >= 2.
BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses,
                       const std::vector<std::vector<Tokens>>& references,
                       bool smoothing = false);

/// Mean slot error (percent) over every (DA, realization) pair. `outputs[i]`
/// holds the delexicalized top-k outputs for `das[i]`.
double corpus_err(const std::vector<std::vector<Tokens>>& outputs,
                  const std::vector<DialogueAct>& das);

struct DAScore {
  std::string da_text;
  std::string hypothesis;
  double err = 0.0;  // mean over the top-k realizations
};

struct EvalReport {
  BleuReport bleu;
  double err_percent = 0.0;
  std::vector<DAScore> per_da;
  std::size_t unrealized = 0;  // DAs whose block has no realization lines

  /// "BLEU 0.7634 ERR 0.49%"
  std::string headline() const;
  /// Headline, per-n precisions and the brevity penalty.
  std::string text() const;
  /// key=value lines for scripts.
  std::string key_values() const;
};

}  // namespace srnlg
