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

#include "srnlg/decoding.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "srnlg/delex.hpp"

namespace srnlg {
namespace {

struct Expansion {
  double nll;
  std::size_t parent;
  int token;
};

bool hyp_less(const Hypothesis& a, const Hypothesis& b) {
  if (a.nll != b.nll) return a.nll < b.nll;
  return a.tokens < b.tokens;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

BeamResult beam_search(const ModelParams& model, std::span<const double> z, const BeamConfig& config,
                       const std::function<void(const BeamStepInfo&)>& observer) {
  if (config.width == 0) throw ConfigError("beam width must be at least 1");
  const std::size_t V = model.dims().vocab;

  std::vector<Hypothesis> live(1);
  live[0].tokens = {Vocab::kBos};
  live[0].hidden.assign(model.dims().hidden, 0.0);
  std::vector<Hypothesis> pool;

  // Lexicographic order on (parent tokens ++ token) for tie-breaking.
  auto expansion_less = [&](const Expansion& a, const Expansion& b) {
    if (a.nll != b.nll) return a.nll < b.nll;
    const auto& ta = live[a.parent].tokens;
    const auto& tb = live[b.parent].tokens;
    if (ta != tb) return ta < tb;
    return a.token < b.token;
  };

  for (std::size_t step = 0; step < config.max_len; ++step) {
    if (live.empty() || pool.size() >= config.need) break;
    std::vector<StepTrace> traces;
    traces.reserve(live.size());
    std::vector<Expansion> cands;
    cands.reserve(live.size() * V);
    for (std::size_t i = 0; i < live.size(); ++i) {
      traces.push_back(cell_step(model, live[i].tokens.back(), z, live[i].hidden));
      const StepTrace& tr = traces.back();
      for (std::size_t v = 0; v < V; ++v) {
        const int tok = static_cast<int>(v);
        if (tok == Vocab::kBos || tok == Vocab::kUnk) continue;
        cands.push_back({live[i].nll + -step_log_prob(tr, tok), i, tok});
      }
    }
    const std::size_t keep = std::min(config.width, cands.size());
    const std::size_t sorted = std::min(keep + 1, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(sorted), cands.end(),
                      expansion_less);

    if (observer) {
      BeamStepInfo info;
      info.step = step;
      info.kept = keep;
      info.discarded = cands.size() - keep;
      info.worst_kept_nll = keep ? cands[keep - 1].nll : 0.0;
      info.best_discarded_nll =
          keep < cands.size() ? cands[keep].nll : std::numeric_limits<double>::infinity();
      observer(info);
    }

    std::vector<Hypothesis> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Expansion& e = cands[k];
      Hypothesis h;
      h.tokens = live[e.parent].tokens;
      h.tokens.push_back(e.token);
      h.nll = e.nll;
      h.hidden = traces[e.parent].h;
      if (e.token == Vocab::kEos) {
        h.finished = true;
        pool.push_back(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }

  if (pool.size() < config.need) {
    // Whatever is still live has hit max_len.
    for (auto& h : live) {
      const StepTrace tr = cell_step(model, h.tokens.back(), z, h.hidden);
      h.nll += -step_log_prob(tr, Vocab::kEos);
      h.tokens.push_back(Vocab::kEos);
      h.hidden = tr.h;
      h.finished = true;
      h.forced = true;
      pool.push_back(std::move(h));
    }
  }

  std::sort(pool.begin(), pool.end(), hyp_less);
  BeamResult out;
  if (pool.size() > config.need) pool.resize(config.need);
  out.insufficient = pool.size() < config.need;
  out.hypotheses = std::move(pool);
  return out;
}

void rank_candidates(std::vector<RerankCandidate>& candidates, double lambda) {
  for (auto& c : candidates) c.r = c.f_fw + (c.f_bw ? *c.f_bw : 0.0) + lambda * c.slot.err;
  std::sort(candidates.begin(), candidates.end(), [](const RerankCandidate& a, const RerankCandidate& b) {
    if (a.r != b.r) return a.r < b.r;
    if (a.f_fw != b.f_fw) return a.f_fw < b.f_fw;
    return a.ids < b.ids;
  });
}

std::vector<RerankCandidate> rerank(const std::vector<Hypothesis>& hypotheses, const DialogueAct& da,
                                    const Vocab& vocab, std::span<const double> z, double lambda,
                                    const ModelParams* backward) {
  std::vector<RerankCandidate> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    RerankCandidate c;
    c.ids = h.tokens;
    c.tokens = vocab.decode(h.tokens);
    c.f_fw = h.nll;
    if (backward) c.f_bw = forward_sequence(*backward, reverse_sequence(h.tokens), z).loss;
    c.slot = compute_err(c.tokens, da);
    out.push_back(std::move(c));
  }
  rank_candidates(out, lambda);
  return out;
}

GenerateResult generate(const Generator& gen, const DialogueAct& da, const DecodeConfig& config) {
  const DAVector zv = gen.schema.encode(da);
  const BeamResult beam = beam_search(gen.forward, zv.z, config.beam);
  auto ranked = rerank(beam.hypotheses, da, gen.vocab, zv.z, config.lambda, gen.backward);
  GenerateResult out;
  out.unknown_features = zv.unknown_features;
  out.short_pool = ranked.size() < config.top_k;
  const std::size_t n = std::min(config.top_k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = ranked[i];
    Realization r;
    r.text = lexicalize(c.tokens, da).text;
    r.delex = std::move(c.tokens);
    r.r = c.r;
    r.f_fw = c.f_fw;
    r.f_bw = c.f_bw;
    r.slot = c.slot;
    out.realizations.push_back(std::move(r));
  }
  return out;
}

Tokens greedy_decode(const ModelParams& model, const Vocab& vocab, std::span<const double> z,
                     std::size_t max_len) {
  const BeamResult res = beam_search(model, z, {1, 1, max_len});
  if (res.hypotheses.empty()) return {};
  return vocab.decode(res.hypotheses.front().tokens);
}

std::string format_realizations(const std::string& da_text, const GenerateResult& result) {
  std::string out = da_text + "\n";
  for (const auto& r : result.realizations)
    out += fmt(r.r) + "\t" + fmt(r.f_fw) + "\t" + fmt(r.slot.err) + "\t" + r.text + "\n";
  return out + "\n";
}

std::vector<RealizationBlock> parse_realizations(std::string_view text) {
  std::vector<RealizationBlock> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool in_block = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      in_block = false;
      continue;
    }
    if (!in_block) {
      out.push_back({line, {}});
      in_block = true;
      continue;
    }
    RealizationLine r;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos)
      throw std::runtime_error("realizations: malformed line " + std::to_string(lineno));
    try {
      r.r = std::stod(line.substr(0, t1));
      r.f_fw = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
      r.err = std::stod(line.substr(t2 + 1, t3 - t2 - 1));
    } catch (const std::exception&) {
      throw std::runtime_error("realizations: bad number on line " + std::to_string(lineno));
    }
    r.utterance = line.substr(t3 + 1);
    out.back().lines.push_back(std::move(r));
  }
  return out;
}

}  // namespace srnlg
