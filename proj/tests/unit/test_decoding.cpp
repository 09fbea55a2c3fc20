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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "doctest.h"
#include "srnlg/decoding.hpp"
#include "srnlg/delex.hpp"
#include "srnlg/evaluation.hpp"
#include "srnlg/training.hpp"

using namespace srnlg;

namespace {

ModelParams random_model(std::size_t vocab, std::uint64_t seed, double scale = 1.0) {
  ModelParams m(CellKind::SrgruContext, {vocab, 4, 4, 3, false});
  Rng rng(seed);
  m.store().init_uniform(rng, -scale, scale);
  return m;
}

// Multiset difference computed with a plain map, independent of the library.
SlotError brute_err(const Tokens& tokens, const DialogueAct& da) {
  std::map<std::string, long> need, have;
  std::size_t n = 0;
  for (const auto& s : da.slots)
    if (s.value_class == ValueClass::Normal) {
      ++need["SLOT_" + [&] {
        std::string u = s.name;
        for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return u;
      }()];
      ++n;
    }
  for (const auto& t : tokens)
    if (t.rfind("SLOT_", 0) == 0) ++have[t];
  SlotError e;
  for (const auto& [k, v] : need) e.missing += static_cast<std::size_t>(std::max(0L, v - have[k]));
  for (const auto& [k, v] : have) e.redundant += static_cast<std::size_t>(std::max(0L, v - need[k]));
  e.total = n;
  e.err = n ? static_cast<double>(e.missing + e.redundant) / n : 0.0;
  e.no_slots = n == 0;
  return e;
}

struct Memorized {
  Dataset data;
  PreparedData prepared;
  ModelParams model;
};

Memorized memorize(const std::string& da, const std::string& utt) {
  Memorized m;
  m.data.push_back({da, parse_da(da), {utt}});
  m.prepared = prepare_data(m.data, m.data);
  TrainConfig cfg;
  cfg.hidden_size = 32;
  cfg.embed_size = 32;
  cfg.dropout_rate = 0.0;
  cfg.lr_decay = false;
  cfg.max_epochs = 1000;
  cfg.patience = 1000;
  cfg.stop_valid_loss = 0.01;
  cfg.max_decode_len = 40;
  m.model = train(CellKind::SrgruContext, m.prepared, cfg, 1).params;
  return m;
}

}  // namespace

TEST_CASE("beam search contract") {
  const ModelParams m = random_model(9, 1);
  const Vector z{1, 0, 1};
  const BeamResult r = beam_search(m, z, {10, 20, 12});
  CHECK(r.hypotheses.size() <= 20);
  CHECK_FALSE(r.hypotheses.empty());
  for (std::size_t i = 0; i < r.hypotheses.size(); ++i) {
    const Hypothesis& h = r.hypotheses[i];
    CHECK(h.finished);
    CHECK(h.tokens.front() == Vocab::kBos);
    CHECK(h.tokens.back() == Vocab::kEos);
    CHECK(h.nll >= 0.0);
    CHECK(h.tokens.size() <= 12 + 2);
    for (std::size_t t = 1; t < h.tokens.size(); ++t) {
      CHECK(h.tokens[t] != Vocab::kBos);
      CHECK(h.tokens[t] != Vocab::kUnk);
    }
    for (std::size_t t = 1; t + 1 < h.tokens.size(); ++t) CHECK(h.tokens[t] != Vocab::kEos);
    if (i) CHECK(r.hypotheses[i - 1].nll <= h.nll);
  }
  CHECK_THROWS_AS(beam_search(m, z, {0, 20, 12}), ConfigError);
}

TEST_CASE("beam NLL equals rescoring the twice-reversed sequence") {
  const ModelParams m = random_model(9, 2);
  const Vector z{0, 1, 1};
  for (const auto& h : beam_search(m, z, {5, 10, 8}).hypotheses)
    CHECK(forward_sequence(m, reverse_sequence(reverse_sequence(h.tokens)), z).loss == h.nll);
}

TEST_CASE("beam search records a local optimality certificate") {
  const ModelParams m = random_model(11, 3);
  std::size_t steps = 0;
  beam_search(m, Vector{1, 1, 0}, {4, 20, 15}, [&](const BeamStepInfo& s) {
    ++steps;
    CHECK(s.kept <= 4);
    CHECK(s.worst_kept_nll <= s.best_discarded_nll);
  });
  CHECK(steps > 0);
}

TEST_CASE("beam search force-finishes at max_len") {
  ModelParams m(CellKind::GruBase, {6, 3, 3, 2, true});
  m.weight("b_o")(3, 0) = 10.0;  // "word" 3 dominates, EOS never wins
  const BeamResult r = beam_search(m, Vector{1, 0}, {2, 5, 3});
  // Step by step EOS ties the other minor words and wins the lexicographic
  // tie-break, so the pool is {0 1}, {0 3 1}, {0 3 3 1} plus the forced path.
  REQUIRE(r.hypotheses.size() == 4);
  std::size_t forced = 0;
  for (const auto& h : r.hypotheses)
    if (h.forced) {
      ++forced;
      CHECK(h.tokens == std::vector<int>{0, 3, 3, 3, 1});
    }
  CHECK(forced == 1);
  CHECK(r.insufficient);
}

TEST_CASE("a single dominant path is returned first") {
  ModelParams m(CellKind::GruBase, {6, 3, 3, 2, true});
  m.weight("b_o")(Vocab::kEos, 0) = 8.0;
  const BeamResult r = beam_search(m, Vector{1, 0}, {10, 20, 5});
  CHECK(r.hypotheses.front().tokens == std::vector<int>{Vocab::kBos, Vocab::kEos});
}

TEST_CASE("wide beam finds the exhaustive optimum on a small model") {
  const ModelParams m = random_model(6, 4, 2.0);
  const Vector z{1, 0, 1};
  const std::size_t max_len = 3;
  // Enumerate every word sequence of length 0..max_len followed by EOS.
  double best = 1e300;
  std::vector<int> arg;
  std::size_t count = 0;
  std::function<void(std::vector<int>&)> rec = [&](std::vector<int>& prefix) {
    std::vector<int> full = prefix;
    full.push_back(Vocab::kEos);
    const double nll = forward_sequence(m, full, z).loss;
    ++count;
    if (nll < best || (nll == best && full < arg)) {
      best = nll;
      arg = full;
    }
    if (prefix.size() == max_len + 1) return;  // BOS plus max_len words
    for (int w = 3; w < 6; ++w) {
      prefix.push_back(w);
      rec(prefix);
      prefix.pop_back();
    }
  };
  std::vector<int> start{Vocab::kBos};
  rec(start);
  const BeamResult r = beam_search(m, z, {216, count, max_len});
  CHECK(r.hypotheses.size() == count);
  CHECK(r.hypotheses.front().tokens == arg);
  CHECK(r.hypotheses.front().nll == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("compute_err examples") {
  const DialogueAct three = parse_da("inform(name='a';food='b';area='c';kids=yes)");
  SlotError e = compute_err({"SLOT_AREA", "x", "SLOT_NAME", "SLOT_FOOD"}, three);
  CHECK(e.missing == 0);
  CHECK(e.redundant == 0);
  CHECK(e.total == 3);
  CHECK(e.err == 0.0);
  e = compute_err({"SLOT_AREA", "SLOT_NAME"}, three);
  CHECK(e.missing == 1);
  CHECK(e.redundant == 0);
  CHECK(e.err == doctest::Approx(1.0 / 3.0));

  const DialogueAct basque = parse_da(
      "inform_count(type=restaurant; count=2; food=Basque; kidsallowed=no; pricerange=moderate)");
  // "there are 2 restaurants that are moderately priced and do not allow kids."
  e = compute_err({"there", "are", "SLOT_COUNT", "SLOT_TYPE", "that", "are", "SLOT_PRICERANGE",
                   "priced", "and", "do", "not", "allow", "kids", "."},
                  basque);
  CHECK(e.missing == 1);
  CHECK(e.redundant == 0);
  CHECK(e.total == 4);
  CHECK(e.err == 0.25);

  e = compute_err({"SLOT_NAME"}, parse_da("goodbye()"));
  CHECK(e.no_slots);
  CHECK(e.err == 0.0);
  CHECK(e.redundant == 1);
}

TEST_CASE("compute_err agrees with a brute-force counter and ignores order") {
  Rng rng(5);
  const std::vector<std::string> names{"name", "food", "area", "near"};
  for (int trial = 0; trial < 300; ++trial) {
    DialogueAct da{"inform", {}};
    const std::size_t ns = rng.below(5);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto cls = static_cast<ValueClass>(rng.below(5));
      Slot s{names[rng.below(names.size())], std::nullopt, cls};
      if (cls != ValueClass::NoValue) s.value = "v";
      da.slots.push_back(s);
    }
    Tokens toks;
    const std::size_t nt = rng.below(7);
    for (std::size_t i = 0; i < nt; ++i)
      toks.push_back(rng.bernoulli(0.5) ? slot_token(names[rng.below(names.size())]) : "w");
    const SlotError a = compute_err(toks, da), b = brute_err(toks, da);
    CHECK(a.missing == b.missing);
    CHECK(a.redundant == b.redundant);
    CHECK(a.total == b.total);
    CHECK(a.err == b.err);
    rng.shuffle(toks);
    CHECK(compute_err(toks, da).err == a.err);
  }
}

TEST_CASE("rerank: lambda dominance, pure NLL at lambda 0, brute-force order") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RerankCandidate> c(20);
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i].ids = {0, static_cast<int>(i), 1};
      c[i].f_fw = rng.uniform(0.0, 50.0);
      if (rng.bernoulli(0.3)) c[i].f_bw = rng.uniform(0.0, 50.0);
      c[i].slot.total = 4;
      c[i].slot.missing = rng.bernoulli(0.5) ? rng.below(3) : 0;
      c[i].slot.err = c[i].slot.missing / 4.0;
    }
    std::vector<RerankCandidate> pure = c;
    rank_candidates(pure, 0.0);
    for (std::size_t i = 1; i < pure.size(); ++i)
      CHECK(pure[i - 1].f_fw + pure[i - 1].f_bw.value_or(0) <= pure[i].f_fw + pure[i].f_bw.value_or(0));

    std::vector<RerankCandidate> ranked = c;
    rank_candidates(ranked, 1000.0);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const double r = ranked[i].f_fw + ranked[i].f_bw.value_or(0.0) + 1000.0 * ranked[i].slot.err;
      CHECK(ranked[i].r == r);
      if (i) CHECK(ranked[i - 1].r <= r);
      for (std::size_t j = i + 1; j < ranked.size(); ++j) {
        const auto& x = ranked[i];
        const auto& y = ranked[j];
        const double fx = x.f_fw + x.f_bw.value_or(0.0), fy = y.f_fw + y.f_bw.value_or(0.0);
        // x precedes y although y is slot-perfect: only possible when y's F
        // exceeds x's by at least lambda / N.
        if (x.slot.err > 0 && y.slot.err == 0) CHECK(fy - fx >= 1000.0 / 4);
      }
    }
    // A zero-ERR candidate is never ranked below one with ERR > 0.
    bool seen_err = false;
    for (const auto& r : ranked) {
      if (r.slot.err > 0) seen_err = true;
      if (seen_err) CHECK(r.slot.err > 0);
    }
  }
}

TEST_CASE("rerank score is monotone in ERR and in F") {
  RerankCandidate a, b;
  a.f_fw = b.f_fw = 3.0;
  a.slot.err = 0.25;
  b.slot.err = 0.5;
  std::vector<RerankCandidate> v{b, a};
  rank_candidates(v, 1000.0);
  CHECK(v[0].slot.err == 0.25);
  a.f_fw = 2.0;
  b = a;
  b.f_fw = 2.5;
  v = {b, a};
  rank_candidates(v, 1000.0);
  CHECK(v[0].f_fw == 2.0);
}

TEST_CASE("rerank with a backward model adds F_bw") {
  const ModelParams fw = random_model(8, 7), bw = random_model(8, 8);
  const Vocab vocab = Vocab::from_tokens({"a", "b", "c", "d", "e"});
  const Vector z{1, 0, 0};
  const DialogueAct da = parse_da("goodbye()");
  const auto hyps = beam_search(fw, z, {5, 10, 6}).hypotheses;
  const auto ranked = rerank(hyps, da, vocab, z, 1000.0, &bw);
  for (const auto& c : ranked) {
    REQUIRE(c.f_bw.has_value());
    CHECK(*c.f_bw == forward_sequence(bw, reverse_sequence(c.ids), z).loss);
    CHECK(c.r == c.f_fw + *c.f_bw);
  }
}

TEST_CASE("generate on a memorized compare utterance") {
  const std::string da =
      "compare(name='Triton 52';ecorating='A+';family='L7';name='Hades 76';ecorating='C';family='L9')";
  const std::string ref =
      "compared to triton 52 which is in the a+ eco rating and is in the l7 product family, "
      "hades 76 is in the c eco rating and is in the l9 product family. which one do you prefer?";
  const Memorized m = memorize(da, ref);
  const Generator gen{m.model, m.prepared.vocab, m.prepared.schema, nullptr};
  DecodeConfig cfg;
  cfg.beam.max_len = 60;
  const GenerateResult r = generate(gen, parse_da(da), cfg);
  REQUIRE_FALSE(r.realizations.empty());
  CHECK(r.realizations.size() <= 5);
  CHECK(r.realizations[0].slot.err == 0.0);
  CHECK(tokenize(r.realizations[0].text) ==
        tokenize("compared to Triton 52 which is in the A+ eco rating and is in the L7 product "
                 "family, Hades 76 is in the C eco rating and is in the L9 product family. which "
                 "one do you prefer?"));
  CHECK(r.realizations[0].text.find("Triton 52") < r.realizations[0].text.find("Hades 76"));

  DecodeConfig wide = cfg;
  wide.top_k = 50;
  const GenerateResult all = generate(gen, parse_da(da), wide);
  CHECK(all.short_pool);
  CHECK(all.realizations.size() <= 20);
  CHECK(all.realizations.size() > 5);
  CHECK_THROWS_AS(generate(gen, parse_da("bogus(a=b)"), cfg), UnknownActError);
}

TEST_CASE("realization files round trip") {
  GenerateResult g;
  Realization r;
  r.text = "the eagle is nice.";
  r.r = 3.25;
  r.f_fw = 3.25;
  g.realizations = {r, r};
  g.realizations[1].slot.err = 0.5;
  g.realizations[1].r = 503.25;
  const std::string text = format_realizations("inform(name='the eagle')", g) +
                           format_realizations("goodbye()", g);
  const auto blocks = parse_realizations(text);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].da_text == "inform(name='the eagle')");
  REQUIRE(blocks[0].lines.size() == 2);
  CHECK(blocks[0].lines[1].err == 0.5);
  CHECK(blocks[0].lines[1].r == 503.25);
  CHECK(blocks[0].lines[0].utterance == "the eagle is nice.");
  CHECK(format_blocks(blocks) == text);
  CHECK_THROWS(parse_realizations("x()\nnot a line\n"));
}

TEST_CASE("evaluate_blocks: perfect output, missing DAs and ERR averaging") {
  Dataset test;
  for (const char* s : {"inform(name='a')", "inform(name='b')"})
    test.push_back({s, parse_da(s), {std::string("the place ") + s[13] + " is good ."}});
  std::vector<RealizationBlock> blocks;
  for (const auto& g : test) blocks.push_back({g.da_text, {{0, 0, 0.0, g.references[0]}}});
  EvalReport rep = evaluate_blocks(test, blocks);
  CHECK(rep.bleu.bleu == doctest::Approx(1.0));
  CHECK(rep.err_percent == 0.0);

  blocks[1].lines.push_back({0, 0, 0.5, "x"});
  rep = evaluate_blocks(test, blocks, {5, false, false});
  CHECK(rep.err_percent == doctest::Approx(100.0 * 0.5 / 3.0));
  blocks.pop_back();
  try {
    evaluate_blocks(test, blocks);
    FAIL("expected MetricError");
  } catch (const MetricError& e) {
    CHECK(std::string(e.what()).find("inform(name='b')") != std::string::npos);
  }
  // An empty block counts as an empty utterance with every slot missing.
  blocks.push_back({test[1].da_text, {}});
  rep = evaluate_blocks(test, blocks);
  CHECK(rep.unrealized == 1);
  CHECK(rep.err_percent == doctest::Approx(50.0));
  CHECK(rep.per_da[1].err == 1.0);
}

TEST_CASE("parallel generation matches sequential generation") {
  const Memorized m = memorize("inform(name='nandos';food='thai')", "nandos serves thai food.");
  Dataset test = m.data;
  test.push_back({"inform(name='red lion')", parse_da("inform(name='red lion')"), {"red lion."}});
  test.push_back({"inform(food='thai')", parse_da("inform(food='thai')"), {"thai."}});
  const Generator gen{m.model, m.prepared.vocab, m.prepared.schema, nullptr};
  DecodeConfig cfg;
  cfg.beam.max_len = 20;
  CHECK(format_blocks(generate_blocks(gen, test, cfg, 1)) ==
        format_blocks(generate_blocks(gen, test, cfg, 3)));
}
