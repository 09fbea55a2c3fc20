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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srnlg/cells.hpp"
#include "srnlg/da_schema.hpp"
#include "srnlg/dataset.hpp"
#include "srnlg/metrics.hpp"
#include "srnlg/rng.hpp"
#include "srnlg/vocab.hpp"

namespace srnlg {

struct TrainConfig {
  std::size_t hidden_size = 80;
  std::size_t embed_size = 80;
  double learn_rate = 0.1;
  bool lr_decay = true;  // halve after every epoch without improvement
  double dropout_rate = 0.7;
  double l2_coeff = 1e-5;
  std::size_t l2_every = 10;  // sentences between penalty applications
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  std::size_t seeds = 5;
  double grad_clip = 5.0;  // global norm; <= 0 disables
  std::size_t max_decode_len = 100;
  double init_scale = 0.1;
  bool bias = false;
  double stop_valid_loss = 0.0;  // stop once validation NLL is below this; 0 disables
  bool tb_joint = true;  // tied pair: alternate fw/bw sentences vs train fw first
  std::optional<std::filesystem::path> embeddings;

  void validate() const;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One training sentence: BOS ... EOS ids and its DA vector.
struct Example {
  std::vector<int> ids;
  Vector z;
};

/// A validation/test DA with its tokenized surface references.
struct EvalItem {
  std::string da_text;
  DialogueAct da;
  Vector z;
  std::vector<Tokens> references;
};

/// Vocabulary, schema and encoded splits, all derived from the training split.
struct PreparedData {
  Vocab vocab;
  DASchema schema;
  std::vector<Example> train;
  std::vector<Example> valid;
  std::vector<EvalItem> valid_items;
  std::size_t delex_misses = 0;  // normal slot values not found in references
  std::size_t valid_skipped = 0;  // validation DAs whose act type is absent from training
};

/// `schema` overrides the one built from `train` (sweeps over training subsets
/// keep the full-corpus act inventory).
PreparedData prepare_data(const Dataset& train, const Dataset& valid, std::size_t min_count = 1,
                          const DASchema* schema = nullptr);
std::vector<Example> encode_examples(const Dataset& data, const Vocab& vocab, const DASchema& schema);
std::vector<EvalItem> make_eval_items(const Dataset& data, const DASchema& schema);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // per-token NLL, with dropout
  double valid_loss = 0.0;  // per-token NLL, no dropout
  double valid_bleu = 0.0;  // greedy decoding
  std::size_t checkpoint = 0;  // epoch of the best checkpoint so far
  std::size_t l2_applications = 0;
  double learn_rate = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_bleu = 0.0;
  double best_valid_loss = 0.0;

  /// One line per epoch: epoch, train-loss, valid-loss, valid-BLEU.
  std::string to_tsv() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Per-sentence SGD with BPTT. Returns the checkpoint with the highest
/// validation BLEU (ties: lower validation loss).
TrainResult train(CellKind kind, const PreparedData& data, const TrainConfig& config,
                  std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Forward and backward SrgruContext models whose W_dz and W_dh (and b_d when
/// present) are the same storage.
class TiedPair {
 public:
  static const std::vector<std::string>& tied_names();

  TiedPair(ModelParams forward, ModelParams backward);
  TiedPair(const TiedPair& other);
  TiedPair& operator=(const TiedPair& other);
  TiedPair(TiedPair&&) noexcept = default;
  TiedPair& operator=(TiedPair&&) noexcept = default;

  ModelParams& forward() { return forward_; }
  ModelParams& backward() { return backward_; }
  const ModelParams& forward() const { return forward_; }
  const ModelParams& backward() const { return backward_; }

  /// "fw/<name>" for every forward matrix and "bw/<name>" for the backward
  /// matrices that are not tied. Entries alias the models' storage.
  ParamStore joint_view() const;
  bool storage_shared() const;

 private:
  void tie();

  ModelParams forward_;
  ModelParams backward_;
};

struct TiedResult {
  TiedPair pair;
  TrainHistory history;
};

TiedResult train_tied_backward(const PreparedData& data, const TrainConfig& config,
                               std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Summed forward NLL plus backward NLL on the reversed sequence.
double tied_sequence_loss(const TiedPair& pair, std::span<const int> ids, std::span<const double> z);
/// Gradients of tied_sequence_loss accumulated into both models.
double tied_sequence_backward(TiedPair& pair, std::span<const int> ids, std::span<const double> z,
                              const DropoutMasks* fw_masks = nullptr,
                              const DropoutMasks* bw_masks = nullptr);

/// Inverted dropout: zero with probability `rate`, survivors scaled by 1/(1-rate).
Vector dropout_mask(std::size_t n, double rate, Rng& rng);
Vector apply_dropout(std::span<const double> v, double rate, Rng& rng);
DropoutMasks make_dropout_masks(std::size_t steps, const ModelDims& dims, double rate, Rng& rng);

struct EmbeddingInit {
  Matrix table;
  std::size_t copied = 0;
  double coverage = 0.0;  // copied / vocab size
};

/// Random uniform(-scale, scale) table with rows replaced by vectors from a
/// "token v1 ... vd" text file when given.
EmbeddingInit init_embeddings(const Vocab& vocab, std::size_t dim,
                              const std::optional<std::filesystem::path>& pretrained, Rng& rng,
                              double scale = 0.1);

/// Builds and randomly initializes a model for the prepared data.
ModelParams init_model(CellKind kind, const PreparedData& data, const TrainConfig& config, Rng& rng);

/// One SGD update over every distinct parameter (frozen names skipped).
void sgd_step(ParamStore& params, double learn_rate, const std::vector<std::string>& frozen = {});
/// Rescales all gradients so their global norm is at most max_norm.
double clip_gradients(ParamStore& params, double max_norm);
/// grad += coeff * value for every distinct parameter.
void add_l2_gradient(ParamStore& params, double coeff);

/// Mean per-token NLL without dropout.
double mean_token_nll(const ModelParams& model, const std::vector<Example>& examples);
/// Corpus BLEU of greedy lexicalized outputs.
BleuReport greedy_bleu(const ModelParams& model, const Vocab& vocab,
                       const std::vector<EvalItem>& items, std::size_t max_len);

}  // namespace srnlg
