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
#include <cctype>
#include <cmath>

#include "doctest.h"
#include "srnlg/metrics.hpp"
#include "srnlg/rng.hpp"
#include "srnlg/slot_error.hpp"

using namespace srnlg;

TEST_CASE("corpus BLEU on a hand-counted two-sentence corpus") {
  const std::vector<Tokens> hyps{tokenize("the cat sat on the red mat"), tokenize("a dog runs")};
  const std::vector<std::vector<Tokens>> refs{
      {tokenize("the cat sat on the mat"), tokenize("there is a cat on the mat")},
      {tokenize("a dog runs fast"), tokenize("the dog is running")}};
  // Clipped matches / totals summed over both sentences:
  //   1-grams 6/7 + 3/3, 2-grams 4/6 + 2/2, 3-grams 3/5 + 1/1, 4-grams 2/4 + 0/0.
  // Closest reference lengths 7 and 4 against hypothesis lengths 7 and 3.
  const BleuReport r = corpus_bleu(hyps, refs);
  CHECK(std::abs(r.precisions[0] - 9.0 / 10.0) < 1e-12);
  CHECK(std::abs(r.precisions[1] - 6.0 / 8.0) < 1e-12);
  CHECK(std::abs(r.precisions[2] - 4.0 / 6.0) < 1e-12);
  CHECK(std::abs(r.precisions[3] - 2.0 / 4.0) < 1e-12);
  CHECK(r.hyp_length == 10);
  CHECK(r.ref_length == 11);
  CHECK(std::abs(r.brevity_penalty - std::exp(1.0 - 11.0 / 10.0)) < 1e-12);
  const double expected =
      std::exp(1.0 - 11.0 / 10.0) * std::pow((9.0 / 10) * (6.0 / 8) * (4.0 / 6) * (2.0 / 4), 0.25);
  CHECK(std::abs(r.bleu - expected) <= 1e-9);
}

TEST_CASE("corpus BLEU edge cases") {
  const std::vector<std::vector<Tokens>> refs{{tokenize("one two three four five")},
                                              {tokenize("six seven eight nine"), tokenize("ten")}};
  CHECK(corpus_bleu({refs[0][0], refs[1][0]}, refs).bleu == doctest::Approx(1.0));
  CHECK(corpus_bleu({tokenize("x y z w v"), tokenize("q r s t")}, refs).bleu == 0.0);
  CHECK_THROWS_AS(corpus_bleu({}, {}), MetricError);
  CHECK_THROWS_AS(corpus_bleu({tokenize("a")}, {}), MetricError);
  CHECK_THROWS_AS(corpus_bleu({tokenize("a")}, {{}}), MetricError);

  // Equidistant references: the shorter length is used.
  const BleuReport tie = corpus_bleu({tokenize("a b c d e")}, {{tokenize("a b c d"), tokenize("a b c d e f")}});
  CHECK(tie.ref_length == 4);
  CHECK(tie.brevity_penalty == 1.0);

  // Smoothing rescues a corpus without 4-gram matches.
  const std::vector<Tokens> h{tokenize("a b c x")};
  const std::vector<std::vector<Tokens>> rr{{tokenize("a b c d")}};
  CHECK(corpus_bleu(h, rr).bleu == 0.0);
  const BleuReport sm = corpus_bleu(h, rr, true);
  CHECK(sm.bleu > 0.0);
  CHECK(sm.precisions[3] == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("corpus BLEU properties") {
  Rng rng(1);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f"};
  auto sentence = [&] {
    Tokens t;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) t.push_back(words[rng.below(words.size())]);
    return t;
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Tokens> hyps;
    std::vector<std::vector<Tokens>> refs;
    for (int i = 0; i < 4; ++i) {
      hyps.push_back(sentence());
      refs.push_back({sentence(), sentence()});
    }
    const double b = corpus_bleu(hyps, refs).bleu;
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);

    std::vector<std::size_t> perm{0, 1, 2, 3};
    rng.shuffle(perm);
    std::vector<Tokens> ph;
    std::vector<std::vector<Tokens>> pr;
    for (auto i : perm) {
      ph.push_back(hyps[i]);
      pr.push_back(refs[i]);
    }
    CHECK(corpus_bleu(ph, pr).bleu == doctest::Approx(b).epsilon(1e-12));

    auto upper = [](Tokens t) {
      for (auto& w : t)
        for (char& c : w) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return t;
    };
    std::vector<Tokens> uh;
    std::vector<std::vector<Tokens>> ur;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      uh.push_back(upper(hyps[i]));
      ur.push_back({upper(refs[i][0]), upper(refs[i][1])});
    }
    CHECK(corpus_bleu(uh, ur).bleu == b);

    std::vector<std::vector<Tokens>> dup = refs;
    dup[rng.below(4)].push_back(refs[rng.below(4)][0]);
    const BleuReport with_dup = corpus_bleu(hyps, dup);
    const BleuReport without = corpus_bleu(hyps, refs);
    for (int n = 0; n < 4; ++n) CHECK(with_dup.precisions[n] >= without.precisions[n]);
    dup = refs;
    dup[0].push_back(refs[0][0]);  // an exact duplicate changes nothing
    CHECK(corpus_bleu(hyps, dup).bleu == b);
  }
}

TEST_CASE("corpus ERR") {
  std::vector<DialogueAct> das;
  std::vector<std::vector<Tokens>> outs;
  for (int i = 0; i < 10; ++i) {
    das.push_back(parse_da("inform(name='x';food='y')"));
    outs.push_back(std::vector<Tokens>(5, Tokens{"SLOT_NAME", "SLOT_FOOD"}));
  }
  CHECK(corpus_err(outs, das) == 0.0);
  outs[3][2] = {"SLOT_NAME"};
  CHECK(corpus_err(outs, das) == doctest::Approx(1.0));
  CHECK_THROWS_AS(corpus_err(outs, {}), MetricError);

  // Arithmetic mean of per-realization ERR.
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < das.size(); ++i)
    for (const auto& o : outs[i]) {
      sum += compute_err(o, das[i]).err;
      ++n;
    }
  CHECK(corpus_err(outs, das) == doctest::Approx(100.0 * sum / n));
}

TEST_CASE("report formatting") {
  EvalReport r;
  r.bleu.bleu = 0.7634;
  r.err_percent = 0.49;
  CHECK(r.headline() == "BLEU 0.7634 ERR 0.49%");
  CHECK(r.text().rfind("BLEU 0.7634 ERR 0.49%\n", 0) == 0);
  CHECK(r.text().find("brevity_penalty") != std::string::npos);
  CHECK(r.key_values().find("bleu=0.763400\n") != std::string::npos);
  CHECK(r.key_values().find("err_percent=0.490000\n") != std::string::npos);
}
