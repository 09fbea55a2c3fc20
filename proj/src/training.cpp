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

#include "srnlg/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "srnlg/decoding.hpp"
#include "srnlg/delex.hpp"

namespace srnlg {
namespace {

// Hooks binding the generic SGD loop to one objective.
struct Objective {
  ParamStore* view = nullptr;          // parameters to update
  std::vector<std::string> frozen;     // names in *view that never move
  std::function<double(const Example&, Rng&)> accumulate;  // loss; adds gradients
  std::function<std::pair<double, double>()> validate;     // (valid loss, valid BLEU)
  std::function<void()> save_best;
  double report_scale = 1.0;  // joint tied training averages its two directions
};

std::size_t target_count(const std::vector<Example>& ex) {
  std::size_t n = 0;
  for (const auto& e : ex) n += e.ids.size() > 0 ? e.ids.size() - 1 : 0;
  return n;
}

TrainHistory run_loop(const std::vector<Example>& train, const TrainConfig& config, Rng& rng,
                      Objective& obj, const EpochCallback& on_epoch, std::size_t epoch_offset = 0) {
  if (train.empty()) throw ConfigError("training split is empty");
  TrainHistory hist;
  hist.best_bleu = -1.0;
  hist.best_valid_loss = std::numeric_limits<double>::infinity();
  double lr = config.learn_rate;
  std::size_t stale = 0;
  const std::size_t tokens = std::max<std::size_t>(1, target_count(train));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double sum_loss = 0.0;
    std::size_t processed = 0, l2_applied = 0;
    for (std::size_t idx : order) {
      obj.view->zero_grad();
      const double loss = obj.accumulate(train[idx], rng);
      if (!std::isfinite(loss) || !obj.view->all_finite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch + epoch_offset << ", sentence " << idx
            << " (loss " << loss << ", learn rate " << lr << ")";
        throw DivergenceError(msg.str());
      }
      sum_loss += loss;
      ++processed;
      if (config.l2_every > 0 && processed % config.l2_every == 0) {
        add_l2_gradient(*obj.view, config.l2_coeff);
        ++l2_applied;
      }
      if (config.grad_clip > 0.0) clip_gradients(*obj.view, config.grad_clip);
      sgd_step(*obj.view, lr, obj.frozen);
    }

    const auto [valid_loss, valid_bleu] = obj.validate();
    if (!std::isfinite(valid_loss))
      throw DivergenceError("validation loss is not finite at epoch " +
                            std::to_string(epoch + epoch_offset));
    const bool improved = valid_bleu > hist.best_bleu ||
                          (valid_bleu == hist.best_bleu && valid_loss < hist.best_valid_loss);
    EpochRecord rec;
    rec.epoch = epoch + epoch_offset;
    rec.train_loss = obj.report_scale * sum_loss / static_cast<double>(tokens);
    rec.valid_loss = valid_loss;
    rec.valid_bleu = valid_bleu;
    rec.l2_applications = l2_applied;
    rec.learn_rate = lr;
    if (improved) {
      hist.best_bleu = valid_bleu;
      hist.best_valid_loss = valid_loss;
      hist.best_epoch = rec.epoch;
      obj.save_best();
      stale = 0;
    } else {
      ++stale;
      if (config.lr_decay) lr *= 0.5;
    }
    rec.checkpoint = hist.best_epoch;
    hist.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stale >= config.patience) break;
    if (valid_loss < config.stop_valid_loss) break;
  }
  return hist;
}

double model_accumulate(ModelParams& model, const std::vector<int>& ids, std::span<const double> z,
                        const TrainConfig& config, Rng& rng) {
  DropoutMasks masks;
  const bool dropout = config.dropout_rate > 0.0;
  if (dropout) masks = make_dropout_masks(ids.size() - 1, model.dims(), config.dropout_rate, rng);
  const ForwardPass fwd = forward_sequence(model, ids, z, dropout ? &masks : nullptr);
  if (!std::isfinite(fwd.loss)) return fwd.loss;
  backward_sequence(model, fwd, ids, z);
  return fwd.loss;
}

double mean_reversed_nll(const ModelParams& model, const std::vector<Example>& examples) {
  double sum = 0.0;
  for (const auto& e : examples) sum += forward_sequence(model, reverse_sequence(e.ids), e.z).loss;
  return sum / static_cast<double>(std::max<std::size_t>(1, target_count(examples)));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
  if (hidden_size == 0 || embed_size == 0) throw ConfigError("layer sizes must be positive");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!(learn_rate > 0.0)) throw ConfigError("learn rate must be positive");
  if (l2_coeff < 0.0) throw ConfigError("l2 coefficient must be non-negative");
  if (seeds < 1) throw ConfigError("need at least one seed");
  if (max_decode_len < 1) throw ConfigError("max decode length must be positive");
}

std::vector<Example> encode_examples(const Dataset& data, const Vocab& vocab, const DASchema& schema) {
  std::vector<Example> out;
  for (const auto& g : data) {
    Vector z = schema.encode(g.da).z;
    for (const auto& ref : g.references)
      out.push_back({vocab.encode(delexicalize(ref, g.da).tokens), z});
  }
  return out;
}

std::vector<EvalItem> make_eval_items(const Dataset& data, const DASchema& schema) {
  std::vector<EvalItem> out;
  for (const auto& g : data) {
    EvalItem item{g.da_text, g.da, schema.encode(g.da).z, {}};
    for (const auto& ref : g.references) item.references.push_back(tokenize(ref));
    out.push_back(std::move(item));
  }
  return out;
}

PreparedData prepare_data(const Dataset& train, const Dataset& valid, std::size_t min_count,
                          const DASchema* schema) {
  PreparedData pd;
  std::vector<DialogueAct> acts;
  std::vector<Tokens> sentences;
  std::set<std::string> slot_tokens;
  for (const auto& g : train) {
    acts.push_back(g.da);
    for (const auto& s : g.da.slots)
      if (s.delexicalizable()) slot_tokens.insert(slot_token(s.name));
    for (const auto& ref : g.references) {
      DelexUtterance d = delexicalize(ref, g.da);
      pd.delex_misses += d.misses.size();
      sentences.push_back(std::move(d.tokens));
    }
  }
  pd.schema = schema ? *schema : DASchema::build(acts);
  pd.vocab = Vocab::build(sentences, {slot_tokens.begin(), slot_tokens.end()}, min_count);
  pd.train = encode_examples(train, pd.vocab, pd.schema);
  Dataset known;
  const auto& acts_known = pd.schema.act_types();
  for (const auto& g : valid) {
    if (std::find(acts_known.begin(), acts_known.end(), g.da.act_type) == acts_known.end())
      ++pd.valid_skipped;
    else
      known.push_back(g);
  }
  pd.valid = encode_examples(known, pd.vocab, pd.schema);
  pd.valid_items = make_eval_items(known, pd.schema);
  return pd;
}

std::string TrainHistory::to_tsv() const {
  std::string out = "# epoch\ttrain_loss\tvalid_loss\tvalid_bleu\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f\n", e.epoch, e.train_loss, e.valid_loss,
                  e.valid_bleu);
    out += buf;
  }
  return out;
}

Vector dropout_mask(std::size_t n, double rate, Rng& rng) {
  Vector m(n, 1.0);
  if (rate <= 0.0) return m;
  const double keep = 1.0 / (1.0 - rate);
  for (double& x : m) x = rng.uniform() < rate ? 0.0 : keep;
  return m;
}

Vector apply_dropout(std::span<const double> v, double rate, Rng& rng) {
  if (rate <= 0.0) return {v.begin(), v.end()};
  return hadamard(v, dropout_mask(v.size(), rate, rng));
}

DropoutMasks make_dropout_masks(std::size_t steps, const ModelDims& dims, double rate, Rng& rng) {
  DropoutMasks m;
  m.input.reserve(steps);
  m.output.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    m.input.push_back(dropout_mask(dims.embed, rate, rng));
    m.output.push_back(dropout_mask(dims.hidden, rate, rng));
  }
  return m;
}

EmbeddingInit init_embeddings(const Vocab& vocab, std::size_t dim,
                              const std::optional<std::filesystem::path>& pretrained, Rng& rng,
                              double scale) {
  EmbeddingInit out;
  out.table = Matrix(vocab.size(), dim);
  for (double& x : out.table.data()) x = rng.uniform(-scale, scale);
  if (pretrained) {
    std::ifstream in(*pretrained);
    if (!in) throw std::runtime_error("cannot read embeddings file " + pretrained->string());
    std::vector<bool> done(vocab.size(), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      if (!(ls >> tok)) continue;
      Vector v;
      double x;
      while (ls >> x) v.push_back(x);
      if (v.size() != dim)
        throw ConfigError("embeddings line " + std::to_string(lineno) + ": expected " +
                          std::to_string(dim) + " values, found " + std::to_string(v.size()));
      if (!vocab.contains(tok)) continue;
      const auto id = static_cast<std::size_t>(vocab.id(tok));
      if (done[id]) continue;
      done[id] = true;
      std::copy(v.begin(), v.end(), out.table.row(id).begin());
      ++out.copied;
    }
  }
  out.coverage = static_cast<double>(out.copied) / static_cast<double>(vocab.size());
  return out;
}

ModelParams init_model(CellKind kind, const PreparedData& data, const TrainConfig& config, Rng& rng) {
  ModelDims dims{data.vocab.size(), config.embed_size, config.hidden_size, data.schema.size(),
                 config.bias};
  ModelParams m(kind, dims);
  m.init_uniform(rng, config.init_scale);
  if (config.embeddings)
    m.weight("embed") =
        init_embeddings(data.vocab, config.embed_size, config.embeddings, rng, config.init_scale).table;
  return m;
}

void sgd_step(ParamStore& params, double learn_rate, const std::vector<std::string>& frozen) {
  params.for_each_unique([&](const std::string& name, Parameter& p) {
    if (std::find(frozen.begin(), frozen.end(), name) != frozen.end()) return;
    axpy_inplace(p.value.data(), -learn_rate, p.grad.data());
  });
}

double clip_gradients(ParamStore& params, double max_norm) {
  const double norm = params.grad_norm();
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    params.for_each_unique([&](const std::string&, Parameter& p) {
      for (double& g : p.grad.data()) g *= s;
    });
  }
  return norm;
}

void add_l2_gradient(ParamStore& params, double coeff) {
  params.for_each_unique([&](const std::string&, Parameter& p) {
    axpy_inplace(p.grad.data(), coeff, p.value.data());
  });
}

double mean_token_nll(const ModelParams& model, const std::vector<Example>& examples) {
  double sum = 0.0;
  for (const auto& e : examples) sum += forward_sequence(model, e.ids, e.z).loss;
  return sum / static_cast<double>(std::max<std::size_t>(1, target_count(examples)));
}

BleuReport greedy_bleu(const ModelParams& model, const Vocab& vocab,
                       const std::vector<EvalItem>& items, std::size_t max_len) {
  std::vector<Tokens> hyps;
  std::vector<std::vector<Tokens>> refs;
  for (const auto& it : items) {
    const Tokens out = greedy_decode(model, vocab, it.z, max_len);
    hyps.push_back(tokenize(lexicalize(out, it.da).text));
    refs.push_back(it.references);
  }
  return corpus_bleu(hyps, refs);
}

TrainResult train(CellKind kind, const PreparedData& data, const TrainConfig& config,
                  std::uint64_t seed, const EpochCallback& on_epoch) {
  config.validate();
  if (data.valid.empty() || data.valid_items.empty()) throw ConfigError("validation split is empty");
  Rng rng(seed);
  ModelParams model = init_model(kind, data, config, rng);
  ModelParams best = model;

  Objective obj;
  obj.view = &model.store();
  obj.accumulate = [&](const Example& e, Rng& r) { return model_accumulate(model, e.ids, e.z, config, r); };
  obj.validate = [&] {
    return std::pair{mean_token_nll(model, data.valid),
                     greedy_bleu(model, data.vocab, data.valid_items, config.max_decode_len).bleu};
  };
  obj.save_best = [&] { best = model; };

  TrainHistory hist = run_loop(data.train, config, rng, obj, on_epoch);
  return {std::move(best), std::move(hist)};
}

const std::vector<std::string>& TiedPair::tied_names() {
  static const std::vector<std::string> names{"W_dz", "W_dh", "b_d"};
  return names;
}

TiedPair::TiedPair(ModelParams forward, ModelParams backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.kind() != CellKind::SrgruContext || backward_.kind() != CellKind::SrgruContext)
    throw ConfigError("weight tying needs two SrgruContext models");
  if (!(forward_.dims() == backward_.dims())) throw ConfigError("tied models differ in shape");
  tie();
}

TiedPair::TiedPair(const TiedPair& other) : forward_(other.forward_), backward_(other.backward_) {
  tie();
}

TiedPair& TiedPair::operator=(const TiedPair& other) {
  if (this == &other) return *this;
  forward_ = other.forward_;
  backward_ = other.backward_;
  tie();
  return *this;
}

void TiedPair::tie() {
  for (const auto& n : tied_names())
    if (forward_.has(n)) backward_.store().link(n, forward_.store().handle(n));
}

ParamStore TiedPair::joint_view() const {
  ParamStore v;
  const auto& tied = tied_names();
  for (const auto& n : forward_.store().names()) v.link("fw/" + n, forward_.store().handle(n));
  for (const auto& n : backward_.store().names())
    if (std::find(tied.begin(), tied.end(), n) == tied.end())
      v.link("bw/" + n, backward_.store().handle(n));
  return v;
}

bool TiedPair::storage_shared() const {
  for (const auto& n : tied_names())
    if (forward_.has(n) && forward_.store().handle(n) != backward_.store().handle(n)) return false;
  return true;
}

double tied_sequence_loss(const TiedPair& pair, std::span<const int> ids, std::span<const double> z) {
  return forward_sequence(pair.forward(), ids, z).loss +
         forward_sequence(pair.backward(), reverse_sequence(ids), z).loss;
}

double tied_sequence_backward(TiedPair& pair, std::span<const int> ids, std::span<const double> z,
                              const DropoutMasks* fw_masks, const DropoutMasks* bw_masks) {
  const ForwardPass fw = forward_sequence(pair.forward(), ids, z, fw_masks);
  const std::vector<int> rev = reverse_sequence(ids);
  const ForwardPass bw = forward_sequence(pair.backward(), rev, z, bw_masks);
  if (!std::isfinite(fw.loss) || !std::isfinite(bw.loss)) return fw.loss + bw.loss;
  backward_sequence(pair.forward(), fw, ids, z);
  backward_sequence(pair.backward(), bw, rev, z);
  return fw.loss + bw.loss;
}

TiedResult train_tied_backward(const PreparedData& data, const TrainConfig& config,
                               std::uint64_t seed, const EpochCallback& on_epoch) {
  config.validate();
  if (data.valid.empty() || data.valid_items.empty()) throw ConfigError("validation split is empty");

  if (!config.tb_joint) {
    // Forward model first, then the backward model with the shared gate frozen.
    TrainResult fw = train(CellKind::SrgruContext, data, config, seed, on_epoch);
    Rng rng(seed ^ 0x5bd1e995ULL);
    TiedPair pair(std::move(fw.params), init_model(CellKind::SrgruContext, data, config, rng));
    TiedPair best = pair;
    std::vector<Example> reversed = data.train;
    for (auto& e : reversed) e.ids = reverse_sequence(e.ids);
    TrainConfig bw_config = config;
    Objective obj;
    obj.view = &pair.backward().store();
    obj.frozen = TiedPair::tied_names();
    obj.accumulate = [&](const Example& e, Rng& r) {
      return model_accumulate(pair.backward(), e.ids, e.z, bw_config, r);
    };
    // Backward greedy output is reversed text, so selection uses loss alone.
    obj.validate = [&] { return std::pair{mean_reversed_nll(pair.backward(), data.valid), 0.0}; };
    obj.save_best = [&] { best = pair; };
    TrainHistory bw_hist = run_loop(reversed, bw_config, rng, obj, on_epoch, fw.history.epochs.size());
    TrainHistory hist = fw.history;
    hist.epochs.insert(hist.epochs.end(), bw_hist.epochs.begin(), bw_hist.epochs.end());
    return {std::move(best), std::move(hist)};
  }

  Rng rng(seed);
  ModelParams fw = init_model(CellKind::SrgruContext, data, config, rng);
  ModelParams bw = init_model(CellKind::SrgruContext, data, config, rng);
  TiedPair pair(std::move(fw), std::move(bw));
  TiedPair best = pair;
  ParamStore view = pair.joint_view();

  Objective obj;
  obj.view = &view;
  obj.accumulate = [&](const Example& e, Rng& r) {
    const std::size_t steps = e.ids.size() - 1;
    if (config.dropout_rate > 0.0) {
      const DropoutMasks fm = make_dropout_masks(steps, pair.forward().dims(), config.dropout_rate, r);
      const DropoutMasks bm = make_dropout_masks(steps, pair.backward().dims(), config.dropout_rate, r);
      return tied_sequence_backward(pair, e.ids, e.z, &fm, &bm);
    }
    return tied_sequence_backward(pair, e.ids, e.z);
  };
  obj.validate = [&] {
    const double loss =
        0.5 * (mean_token_nll(pair.forward(), data.valid) + mean_reversed_nll(pair.backward(), data.valid));
    return std::pair{loss,
                     greedy_bleu(pair.forward(), data.vocab, data.valid_items, config.max_decode_len).bleu};
  };
  obj.save_best = [&] { best = pair; };
  obj.report_scale = 0.5;
  TrainHistory hist = run_loop(data.train, config, rng, obj, on_epoch);
  return {std::move(best), std::move(hist)};
}

}  // namespace srnlg
