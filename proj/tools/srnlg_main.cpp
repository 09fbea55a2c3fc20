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

// srnlg: train, generate, evaluate, sweep and gradcheck.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
// Every subcommand accepts --config FILE holding `key = value` lines (long
// option names without dashes, `#` comments); flags on the command line win.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "srnlg/da_schema.hpp"
#include "srnlg/dataset.hpp"
#include "srnlg/decoding.hpp"
#include "srnlg/evaluation.hpp"
#include "srnlg/gradcheck.hpp"
#include "srnlg/io.hpp"
#include "srnlg/model_io.hpp"
#include "srnlg/sweep.hpp"
#include "srnlg/training.hpp"
#include "srnlg/vocab.hpp"

namespace fs = std::filesystem;
using namespace srnlg;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> config_args(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '\'' || value.front() == '"') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key == "config" || value.empty()) continue;
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// Moves the options of `--config FILE` in front of the command-line flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t take = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      take = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      take = 1;
    }
    if (!take) continue;
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + take));
    const auto extra = config_args(path);
    const std::size_t at = args.empty() ? 0 : 1;  // right after the subcommand name
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    break;
  }
  return args;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw UsageError("bad value '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", "key = value file; command-line flags override it");
}

// ---------------------------------------------------------------- train ----

struct TrainOpts {
  std::string data;
  std::string out = "run";
  std::string cell = "srgru-context";
  std::string embeddings;
  std::string tb_mode = "joint";
  std::size_t min_count = 1;
  std::uint64_t split_seed = 1;
  std::size_t jobs = 1;
  TrainConfig cfg;
};

void add_train_options(CLI::App* sub, TrainOpts& o) {
  sub->add_option("--data", o.data, "dataset file, or directory with train/valid/test.json")
      ->required();
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--cell", o.cell, "gru-base | srgru-base | srgru-context | tb-srgru")
      ->capture_default_str();
  sub->add_option("--hidden", o.cfg.hidden_size, "hidden layer size")->capture_default_str();
  sub->add_option("--embed", o.cfg.embed_size, "embedding size")->capture_default_str();
  sub->add_option("--lr", o.cfg.learn_rate, "SGD learning rate")->capture_default_str();
  sub->add_flag("--lr-decay,!--no-lr-decay", o.cfg.lr_decay,
                "halve the learning rate after an epoch without improvement")
      ->capture_default_str();
  sub->add_option("--dropout", o.cfg.dropout_rate, "drop probability")->capture_default_str();
  sub->add_option("--l2", o.cfg.l2_coeff, "l2 coefficient")->capture_default_str();
  sub->add_option("--l2-every", o.cfg.l2_every, "sentences between l2 applications")
      ->capture_default_str();
  sub->add_option("--max-epochs", o.cfg.max_epochs, "epoch limit")->capture_default_str();
  sub->add_option("--patience", o.cfg.patience, "epochs without validation BLEU gain")
      ->capture_default_str();
  sub->add_option("--seeds", o.cfg.seeds, "runs with seeds 1..N")->capture_default_str();
  sub->add_option("--clip", o.cfg.grad_clip, "global gradient norm limit, 0 disables")
      ->capture_default_str();
  sub->add_option("--max-len", o.cfg.max_decode_len, "greedy validation decode limit")
      ->capture_default_str();
  sub->add_option("--init-scale", o.cfg.init_scale, "uniform init half-width")
      ->capture_default_str();
  sub->add_option("--stop-loss", o.cfg.stop_valid_loss,
                  "stop once validation NLL per token is below this, 0 disables")
      ->capture_default_str();
  sub->add_flag("--bias,!--no-bias", o.cfg.bias, "add bias vectors")->capture_default_str();
  sub->add_option("--tb-mode", o.tb_mode, "tb-srgru training: joint | sequential")
      ->capture_default_str();
  sub->add_option("--embeddings", o.embeddings, "pretrained vectors, `token v1 ... vd` lines");
  sub->add_option("--min-count", o.min_count, "minimum word frequency")->capture_default_str();
  sub->add_option("--split-seed", o.split_seed, "seed of the 3:1:1 split")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "seeds trained in parallel")->capture_default_str();
  add_config_option(sub);
}

std::string kv(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }
std::string kv(const std::string& key, double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return kv(key, std::string(buf, res.ptr));
}
std::string kv(const std::string& key, std::size_t value) { return kv(key, std::to_string(value)); }
std::string kv(const std::string& key, bool value) { return kv(key, std::string(value ? "true" : "false")); }

// The resolved options in the --config format.
std::string echo_train(const TrainOpts& o) {
  const TrainConfig& c = o.cfg;
  return kv("data", o.data) + kv("out", o.out) + kv("cell", o.cell) + kv("hidden", c.hidden_size) +
         kv("embed", c.embed_size) + kv("lr", c.learn_rate) + kv("lr-decay", c.lr_decay) +
         kv("dropout", c.dropout_rate) + kv("l2", c.l2_coeff) + kv("l2-every", c.l2_every) +
         kv("max-epochs", c.max_epochs) + kv("patience", c.patience) + kv("seeds", c.seeds) +
         kv("clip", c.grad_clip) + kv("max-len", c.max_decode_len) + kv("init-scale", c.init_scale) +
         kv("stop-loss", c.stop_valid_loss) + kv("bias", c.bias) + kv("tb-mode", o.tb_mode) +
         (o.embeddings.empty() ? "" : kv("embeddings", o.embeddings)) + kv("min-count", o.min_count) +
         kv("split-seed", static_cast<std::size_t>(o.split_seed)) + kv("jobs", o.jobs);
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  TrainHistory history;
};

void check_train_opts(TrainOpts& o) {
  if (!fs::exists(o.data)) throw UsageError("dataset not found: " + o.data);
  if (!o.embeddings.empty()) {
    if (!fs::exists(o.embeddings)) throw UsageError("embeddings file not found: " + o.embeddings);
    o.cfg.embeddings = o.embeddings;
  }
  if (o.tb_mode != "joint" && o.tb_mode != "sequential")
    throw UsageError("--tb-mode must be joint or sequential");
  o.cfg.tb_joint = o.tb_mode == "joint";
  if (o.cell != "tb-srgru") parse_cell_kind(o.cell);
  o.cfg.validate();
}

int cmd_train(TrainOpts& o) {
  check_train_opts(o);
  const bool tb = o.cell == "tb-srgru";
  const CellKind kind = tb ? CellKind::SrgruContext : parse_cell_kind(o.cell);
  const DataSplits splits = load_splits(o.data, o.split_seed);
  const PreparedData data = prepare_data(splits.train, splits.valid, o.min_count);
  std::fprintf(stderr, "train %zu sentences, valid %zu, test %zu DAs; vocab %zu, schema %zu, delex misses %zu\n",
               data.train.size(), data.valid.size(), splits.test.size(), data.vocab.size(),
               data.schema.size(), data.delex_misses);

  const fs::path out = o.out;
  write_file(out / "config.txt", echo_train(o));
  data.vocab.save(out / "vocab.txt");
  data.schema.save(out / "schema.txt");
  save_dataset(out / "train.json", splits.train);
  save_dataset(out / "valid.json", splits.valid);
  save_dataset(out / "test.json", splits.test);

  std::vector<SeedOutcome> outcomes(o.cfg.seeds);
  std::mutex log_mu;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(o.cfg.seeds);
  auto run_seed = [&](std::size_t i) {
    const std::uint64_t seed = i + 1;
    const fs::path dir = out / ("seed" + std::to_string(seed));
    auto log = [&](const EpochRecord& r) {
      std::lock_guard<std::mutex> lock(log_mu);
      std::fprintf(stderr, "seed %llu epoch %zu train %.4f valid %.4f bleu %.4f lr %.3g\n",
                   static_cast<unsigned long long>(seed), r.epoch, r.train_loss, r.valid_loss,
                   r.valid_bleu, r.learn_rate);
    };
    TrainHistory hist;
    if (tb) {
      TiedResult res = train_tied_backward(data, o.cfg, seed, log);
      save_model(dir / "model.txt", {res.pair.forward(), data.vocab.hash(), data.schema.hash()});
      save_model(dir / "backward.txt", {res.pair.backward(), data.vocab.hash(), data.schema.hash()});
      hist = std::move(res.history);
    } else {
      TrainResult res = train(kind, data, o.cfg, seed, log);
      save_model(dir / "model.txt", {res.params, data.vocab.hash(), data.schema.hash()});
      hist = std::move(res.history);
    }
    write_file(dir / "history.tsv", hist.to_tsv());
    outcomes[i] = {seed, std::move(hist)};
  };
  const std::size_t workers = std::clamp<std::size_t>(o.jobs, 1, o.cfg.seeds);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < o.cfg.seeds; i = next++) {
        try {
          run_seed(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string summary;
  std::size_t best = 0;
  double mean_bleu = 0.0, mean_loss = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& h = outcomes[i].history;
    summary += "seed " + std::to_string(outcomes[i].seed) + " best_epoch " +
               std::to_string(h.best_epoch) + " valid_bleu " + fmt("%.6f", h.best_bleu) +
               " valid_loss " + fmt("%.6f", h.best_valid_loss) + " epochs " +
               std::to_string(h.epochs.size()) + "\n";
    mean_bleu += h.best_bleu / static_cast<double>(outcomes.size());
    mean_loss += h.best_valid_loss / static_cast<double>(outcomes.size());
    const auto& b = outcomes[best].history;
    if (h.best_bleu > b.best_bleu || (h.best_bleu == b.best_bleu && h.best_valid_loss < b.best_valid_loss))
      best = i;
  }
  const std::string best_dir = "seed" + std::to_string(outcomes[best].seed);
  summary += "best_seed " + std::to_string(outcomes[best].seed) + "\n";
  summary += "best_model " + best_dir + "/model.txt\n";
  if (tb) summary += "best_backward " + best_dir + "/backward.txt\n";
  summary += "mean_valid_bleu " + fmt("%.6f", mean_bleu) + "\n";
  summary += "mean_valid_loss " + fmt("%.6f", mean_loss) + "\n";
  write_file(out / "summary.txt", summary);
  std::cout << summary;
  return 0;
}

// ------------------------------------------------------------- decoding ----

struct DecodeOpts {
  std::string run;
  std::string model;
  std::string tb_model;
  std::string vocab;
  std::string schema;
  bool tb = false;
  std::size_t jobs = 1;
  DecodeConfig cfg;
};

// `standalone` is false under sweep, which takes --max-len and --jobs from
// the training options.
void add_decode_options(CLI::App* sub, DecodeOpts& o, bool standalone = true) {
  sub->add_option("--run", o.run, "training output directory (supplies model, vocab, schema)");
  sub->add_option("--model", o.model, "forward model file");
  sub->add_option("--tb-model", o.tb_model, "backward model; adds F_bw to the rerank score");
  sub->add_flag("--tb", o.tb, "use the run's backward model");
  sub->add_option("--vocab", o.vocab, "vocabulary file");
  sub->add_option("--schema", o.schema, "DA schema file");
  sub->add_option("--beam", o.cfg.beam.width, "beam width")->capture_default_str();
  sub->add_option("--need", o.cfg.beam.need, "finished candidates to over-generate")
      ->capture_default_str();
  sub->add_option("--top-k", o.cfg.top_k, "realizations kept after reranking")
      ->capture_default_str();
  sub->add_option("--lambda", o.cfg.lambda, "slot error weight")->capture_default_str();
  if (!standalone) return;
  sub->add_option("--max-len", o.cfg.beam.max_len, "decode length limit")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "DAs decoded in parallel")->capture_default_str();
}

std::map<std::string, std::string> read_summary(const fs::path& run) {
  std::ifstream in(run / "summary.txt");
  if (!in) throw UsageError("no summary.txt in " + run.string());
  std::map<std::string, std::string> kv;
  std::string key, value;
  while (in >> key && std::getline(in, value)) kv[key] = trim(value);
  return kv;
}

struct Artifacts {
  Vocab vocab;
  DASchema schema;
  ModelFile forward;
  std::optional<ModelFile> backward;

  Generator generator() const {
    return {forward.params, vocab, schema, backward ? &backward->params : nullptr};
  }
};

std::string require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what + " (give it or --run)");
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
  return path;
}

Artifacts load_artifacts(DecodeOpts& o) {
  if (!o.run.empty()) {
    const fs::path run = o.run;
    const auto summary = read_summary(run);
    if (o.model.empty() && summary.count("best_model")) o.model = (run / summary.at("best_model")).string();
    if (o.vocab.empty()) o.vocab = (run / "vocab.txt").string();
    if (o.schema.empty()) o.schema = (run / "schema.txt").string();
    if (o.tb && o.tb_model.empty()) {
      if (!summary.count("best_backward")) throw UsageError("run has no backward model");
      o.tb_model = (run / summary.at("best_backward")).string();
    }
  }
  Artifacts a;
  a.vocab = Vocab::load(require_file(o.vocab, "vocab"));
  a.schema = DASchema::load(require_file(o.schema, "schema"));
  a.forward = load_model(require_file(o.model, "model"));
  auto check = [&](const ModelFile& m, const std::string& path) {
    if (m.vocab_hash != a.vocab.hash())
      throw UsageError(path + ": model was trained with a different vocabulary (hash " +
                       hex64(m.vocab_hash) + ", vocab file " + hex64(a.vocab.hash()) + ")");
    if (m.schema_hash != a.schema.hash())
      throw UsageError(path + ": model was trained with a different DA schema (hash " +
                       hex64(m.schema_hash) + ", schema file " + hex64(a.schema.hash()) + ")");
  };
  check(a.forward, o.model);
  if (!o.tb_model.empty()) {
    a.backward = load_model(require_file(o.tb_model, "backward model"));
    check(*a.backward, o.tb_model);
    if (!(a.backward->params.dims() == a.forward.params.dims()))
      throw UsageError("backward model shape differs from the forward model");
  }
  return a;
}

Dataset load_test_data(const std::string& data, const std::string& run) {
  std::string path = data;
  if (path.empty() && !run.empty()) path = (fs::path(run) / "test.json").string();
  if (path.empty()) throw UsageError("missing --data (or --run with test.json)");
  if (!fs::exists(path)) throw UsageError("dataset not found: " + path);
  return load_dataset(path);
}

int generate_stdin(const Artifacts& a, const DecodeConfig& cfg) {
  const Generator gen = a.generator();
  std::string line;
  int status = 0;
  while (std::getline(std::cin, line)) {
    line = trim(line);
    if (line.empty()) continue;
    try {
      const DialogueAct da = parse_da(line);
      const GenerateResult r = generate(gen, da, cfg);
      std::cout << line << "\n";
      if (r.unknown_features)
        std::cout << "# " << r.unknown_features << " slot feature(s) unknown to the schema\n";
      if (r.short_pool) std::cout << "# fewer than " << cfg.top_k << " candidates\n";
      std::cout << "# R\tF_fw\tERR\tp\tq\tN\tutterance\n";
      for (const auto& x : r.realizations)
        std::cout << fmt("%.6f", x.r) << "\t" << fmt("%.6f", x.f_fw) << "\t"
                  << fmt("%.6f", x.slot.err) << "\t" << x.slot.missing << "\t" << x.slot.redundant
                  << "\t" << x.slot.total << "\t" << x.text << "\n";
      std::cout << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << line << ": " << e.what() << "\n";
      status = kExitRuntime;
    }
  }
  return status;
}

int cmd_generate(DecodeOpts& o, const std::string& data, const std::string& out, bool from_stdin) {
  const Artifacts a = load_artifacts(o);
  if (from_stdin) return generate_stdin(a, o.cfg);
  const Dataset test = load_test_data(data, o.run);
  const auto blocks = generate_blocks(a.generator(), test, o.cfg, o.jobs);
  for (const auto& b : blocks)
    if (b.lines.empty()) std::fprintf(stderr, "warning: act type unknown to the schema, left empty: %s\n", b.da_text.c_str());
  write_file(out, format_blocks(blocks));
  std::fprintf(stderr, "wrote %zu DA blocks to %s\n", blocks.size(), out.c_str());
  return 0;
}

// ------------------------------------------------------------- evaluate ----

int cmd_evaluate(const std::string& realizations, const std::string& data, const std::string& run,
                 const std::string& out, const EvalOptions& opts) {
  if (!fs::exists(realizations)) throw UsageError("realizations not found: " + realizations);
  const Dataset test = load_test_data(data, run);
  const EvalReport rep = evaluate_blocks(test, parse_realizations(read_file(realizations)), opts);
  std::cout << rep.text();
  if (!out.empty()) {
    write_file(fs::path(out) / "report.txt", rep.text());
    write_file(fs::path(out) / "report.kv", rep.key_values());
  }
  return 0;
}

// ---------------------------------------------------------------- sweep ----

struct SweepOpts {
  std::string axis = "all";
  std::string fractions = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::string widths = "1,5,10,20,50,100";
  std::string ks = "1,5,10,20";
  std::size_t topk_beam = 100;
  std::string test_data;
  std::uint64_t seed = 1;
};

int cmd_sweep(SweepOpts& s, TrainOpts& t, DecodeOpts& d) {
  static const std::set<std::string> axes{"all", "proportion", "beam", "top_k"};
  if (!axes.count(s.axis)) throw UsageError("--axis must be all, proportion, beam or top_k");
  const fs::path out = t.out;
  const bool want_prop = s.axis == "all" || s.axis == "proportion";
  const bool want_decode = s.axis != "proportion";
  const auto fractions = parse_list<double>(s.fractions, "--fractions");
  const auto widths = parse_list<std::size_t>(s.widths, "--widths");
  const auto ks = parse_list<std::size_t>(s.ks, "--ks");
  std::string echo = kv("axis", s.axis) + kv("fractions", s.fractions) + kv("widths", s.widths) +
                     kv("ks", s.ks) + kv("topk-beam", s.topk_beam) +
                     kv("sweep-seed", static_cast<std::size_t>(s.seed)) + kv("beam", d.cfg.beam.width) +
                     kv("need", d.cfg.beam.need) + kv("top-k", d.cfg.top_k) + kv("lambda", d.cfg.lambda);
  if (!d.run.empty()) echo += kv("run", d.run);
  if (!s.test_data.empty()) echo += kv("test-data", s.test_data);
  write_file(out / "config.txt", echo + echo_train(t));

  if (want_prop) {
    check_train_opts(t);
    if (t.cell == "tb-srgru") throw UsageError("the proportion sweep trains single models");
    const DataSplits splits = load_splits(t.data, t.split_seed);
    const SweepSeries series = sweep_proportion(parse_cell_kind(t.cell), splits, t.cfg, d.cfg,
                                                fractions, s.seed, d.jobs);
    write_file(out / "sweep_proportion.tsv", series.to_tsv());
    std::cout << series.to_tsv();
  }
  if (want_decode) {
    const Artifacts a = load_artifacts(d);
    const Dataset test = load_test_data(s.test_data, d.run);
    const Generator gen = a.generator();
    const SweepSeries beam = sweep_beam(gen, test, d.cfg, widths, d.jobs);
    write_file(out / "sweep_beam.tsv", beam.to_tsv());
    std::cout << beam.to_tsv();
    const SweepSeries topk = sweep_top_k(gen, test, d.cfg, ks, s.topk_beam, d.jobs);
    write_file(out / "sweep_top_k.tsv", topk.to_tsv());
    std::cout << topk.to_tsv();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srnlg: semantically refined recurrent generators for dialogue NLG", "srnlg"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "train one model per seed and pick the best");
  add_train_options(train_cmd, train_opts);

  DecodeOpts gen_opts;
  std::string gen_data, gen_out = "realizations.txt";
  bool gen_stdin = false;
  CLI::App* gen_cmd = app.add_subcommand("generate", "over-generate, rerank and lexicalize");
  add_decode_options(gen_cmd, gen_opts);
  gen_cmd->add_option("--data", gen_data, "test dataset (default: <run>/test.json)");
  gen_cmd->add_option("--out", gen_out, "realizations file")->capture_default_str();
  gen_cmd->add_flag("--stdin", gen_stdin, "read DAs from stdin and print diagnostics");
  add_config_option(gen_cmd);

  std::string ev_real, ev_data, ev_run, ev_out;
  EvalOptions ev_opts;
  CLI::App* ev_cmd = app.add_subcommand("evaluate", "corpus BLEU and slot error of realizations");
  ev_cmd->add_option("--realizations", ev_real, "file written by generate")->required();
  ev_cmd->add_option("--data", ev_data, "test dataset (default: <run>/test.json)");
  ev_cmd->add_option("--run", ev_run, "training output directory");
  ev_cmd->add_option("--out", ev_out, "directory for report.txt and report.kv");
  ev_cmd->add_option("--top-k", ev_opts.top_k, "realizations averaged into ERR")
      ->capture_default_str();
  ev_cmd->add_flag("--smoothing", ev_opts.smoothing, "add-one smoothing for n >= 2");
  add_config_option(ev_cmd);

  SweepOpts sw;
  TrainOpts sw_train;
  DecodeOpts sw_dec;
  sw_train.out = "sweep";
  CLI::App* sw_cmd = app.add_subcommand("sweep", "BLEU/ERR series over data size, beam and top-k");
  sw_cmd->add_option("--axis", sw.axis, "all | proportion | beam | top_k")->capture_default_str();
  sw_cmd->add_option("--fractions", sw.fractions, "training proportions")->capture_default_str();
  sw_cmd->add_option("--widths", sw.widths, "beam widths")->capture_default_str();
  sw_cmd->add_option("--ks", sw.ks, "top-k values")->capture_default_str();
  sw_cmd->add_option("--topk-beam", sw.topk_beam, "beam width of the top-k sweep")
      ->capture_default_str();
  sw_cmd->add_option("--test-data", sw.test_data, "test set of the decode sweeps");
  sw_cmd->add_option("--sweep-seed", sw.seed, "seed of subset order and training")
      ->capture_default_str();
  add_train_options(sw_cmd, sw_train);
  sw_cmd->get_option("--data")->required(false);
  add_decode_options(sw_cmd, sw_dec, false);

  GradCheckConfig gc;
  CLI::App* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of every backward pass");
  gc_cmd->add_option("--seeds", gc.seeds, "random instances per model")->capture_default_str();
  gc_cmd->add_option("--eps", gc.eps, "central difference step")->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance, "relative error limit")->capture_default_str();
  gc_cmd->add_flag("--bias", gc.bias, "check the bias variant");
  gc_cmd->add_option("--flip-sign", gc.flip_sign, "negate one matrix gradient (self-test)");
  add_config_option(gc_cmd);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (gen_cmd->parsed()) return cmd_generate(gen_opts, gen_data, gen_out, gen_stdin);
    if (ev_cmd->parsed()) return cmd_evaluate(ev_real, ev_data, ev_run, ev_out, ev_opts);
    if (sw_cmd->parsed()) {
      sw_dec.cfg.beam.max_len = sw_train.cfg.max_decode_len;
      sw_dec.jobs = sw_train.jobs;
      return cmd_sweep(sw, sw_train, sw_dec);
    }
    if (gc_cmd->parsed()) {
      const GradCheckReport rep = run_gradcheck(gc);
      std::cout << rep.text();
      return rep.passed() ? 0 : kExitRuntime;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
