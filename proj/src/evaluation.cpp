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

#include "srnlg/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>
#include <unordered_map>

#include "srnlg/slot_error.hpp"
#include "srnlg/text.hpp"

namespace srnlg {

RealizationBlock to_block(const std::string& da_text, const GenerateResult& result) {
  RealizationBlock b{da_text, {}};
  for (const auto& r : result.realizations) b.lines.push_back({r.r, r.f_fw, r.slot.err, r.text});
  return b;
}

std::vector<RealizationBlock> generate_blocks(const Generator& gen, const Dataset& data,
                                              const DecodeConfig& config, std::size_t jobs) {
  std::vector<RealizationBlock> out(data.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < data.size(); i += step)
      try {
        out[i] = to_block(data[i].da_text, generate(gen, data[i].da, config));
      } catch (const UnknownActError&) {
        out[i] = {data[i].da_text, {}};
      }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, data.size()));
  if (jobs == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j)
    pool.emplace_back([&, j] {
      try {
        work(j, jobs);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string format_blocks(const std::vector<RealizationBlock>& blocks) {
  std::string out;
  char buf[128];
  for (const auto& b : blocks) {
    out += b.da_text + "\n";
    for (const auto& l : b.lines) {
      std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\t", l.r, l.f_fw, l.err);
      out += buf + l.utterance + "\n";
    }
    out += "\n";
  }
  return out;
}

EvalReport evaluate_blocks(const Dataset& test, const std::vector<RealizationBlock>& blocks,
                           const EvalOptions& options) {
  if (options.top_k == 0) throw MetricError("top_k must be at least 1");
  std::unordered_map<std::string, const RealizationBlock*> by_da;
  for (const auto& b : blocks) by_da.emplace(b.da_text, &b);

  std::string missing;
  std::size_t n_missing = 0;
  for (const auto& g : test)
    if (!by_da.count(g.da_text)) {
      ++n_missing;
      missing += "\n  " + g.da_text;
    }
  if (n_missing)
    throw MetricError("no realizations for " + std::to_string(n_missing) + " DA(s):" + missing);

  EvalReport rep;
  std::vector<Tokens> hyps;
  std::vector<std::vector<Tokens>> refs;
  double err_sum = 0.0;
  std::size_t err_n = 0;
  for (const auto& g : test) {
    const auto& lines = by_da.at(g.da_text)->lines;
    std::vector<Tokens> group;
    for (const auto& r : g.references) group.push_back(tokenize(r));
    if (lines.empty()) {
      // Scored as one empty utterance.
      ++rep.unrealized;
      const double err = compute_err({}, g.da).err;
      hyps.emplace_back();
      refs.push_back(group);
      err_sum += err;
      ++err_n;
      rep.per_da.push_back({g.da_text, "", err});
      continue;
    }
    const std::size_t k = std::min(options.top_k, lines.size());
    const std::size_t nh = options.bleu_over_top_k ? k : 1;
    for (std::size_t i = 0; i < nh; ++i) {
      hyps.push_back(tokenize(lines[i].utterance));
      refs.push_back(group);
    }
    double da_err = 0.0;
    for (std::size_t i = 0; i < k; ++i) da_err += lines[i].err;
    err_sum += da_err;
    err_n += k;
    rep.per_da.push_back({g.da_text, lines[0].utterance, da_err / static_cast<double>(k)});
  }
  if (hyps.empty()) throw MetricError("empty test set");
  rep.bleu = corpus_bleu(hyps, refs, options.smoothing);
  rep.err_percent = 100.0 * err_sum / static_cast<double>(err_n);
  return rep;
}

}  // namespace srnlg
