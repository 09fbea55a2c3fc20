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

#include "srnlg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "srnlg/slot_error.hpp"

namespace srnlg {
namespace {

using NgramCounts = std::map<Tokens, std::size_t>;

NgramCounts count_ngrams(const Tokens& s, std::size_t n) {
  NgramCounts c;
  if (s.size() < n) return c;
  for (std::size_t i = 0; i + n <= s.size(); ++i)
    ++c[Tokens(s.begin() + static_cast<std::ptrdiff_t>(i),
               s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return c;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses,
                       const std::vector<std::vector<Tokens>>& references, bool smoothing) {
  if (hypotheses.empty()) throw MetricError("corpus_bleu: empty corpus");
  if (hypotheses.size() != references.size())
    throw MetricError("corpus_bleu: hypothesis/reference count mismatch");

  std::array<std::size_t, 4> matched{}, total{};
  BleuReport rep;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const Tokens& hyp = hypotheses[i];
    const auto& refs = references[i];
    if (refs.empty()) throw MetricError("corpus_bleu: empty reference group at " + std::to_string(i));
    rep.hyp_length += hyp.size();

    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
      const auto d = std::llabs(static_cast<long long>(r.size()) - static_cast<long long>(hyp.size()));
      const auto bd = std::llabs(static_cast<long long>(best) - static_cast<long long>(hyp.size()));
      if (d < bd || (d == bd && r.size() < best)) best = r.size();
    }
    rep.ref_length += best;

    for (std::size_t n = 1; n <= 4; ++n) {
      const NgramCounts hc = count_ngrams(hyp, n);
      NgramCounts max_ref;
      for (const auto& r : refs)
        for (const auto& [g, c] : count_ngrams(r, n)) {
          auto& m = max_ref[g];
          if (c > m) m = c;
        }
      for (const auto& [g, c] : hc) {
        auto it = max_ref.find(g);
        matched[n - 1] += it == max_ref.end() ? 0 : std::min(c, it->second);
        total[n - 1] += c;
      }
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    double num = static_cast<double>(matched[n]);
    double den = static_cast<double>(total[n]);
    if (smoothing && n > 0) {
      num += 1.0;
      den += 1.0;
    }
    rep.precisions[n] = den > 0.0 ? num / den : 0.0;
    if (rep.precisions[n] <= 0.0)
      zero = true;
    else
      log_sum += std::log(rep.precisions[n]);
  }
  const double c = static_cast<double>(rep.hyp_length);
  const double r = static_cast<double>(rep.ref_length);
  rep.brevity_penalty = c == 0.0 ? 0.0 : (c > r ? 1.0 : std::exp(1.0 - r / c));
  rep.bleu = zero ? 0.0 : rep.brevity_penalty * std::exp(log_sum / 4.0);
  return rep;
}

double corpus_err(const std::vector<std::vector<Tokens>>& outputs,
                  const std::vector<DialogueAct>& das) {
  if (outputs.size() != das.size()) throw MetricError("corpus_err: output/DA count mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < das.size(); ++i)
    for (const auto& out : outputs[i]) {
      sum += compute_err(out, das[i]).err;
      ++n;
    }
  if (n == 0) throw MetricError("corpus_err: no realizations");
  return 100.0 * sum / static_cast<double>(n);
}

std::string EvalReport::headline() const {
  return "BLEU " + fmt("%.4f", bleu.bleu) + " ERR " + fmt("%.2f", err_percent) + "%";
}

std::string EvalReport::text() const {
  std::string out = headline() + "\n";
  for (std::size_t n = 0; n < 4; ++n)
    out += "precision_" + std::to_string(n + 1) + " " + fmt("%.4f", bleu.precisions[n]) + "\n";
  out += "brevity_penalty " + fmt("%.4f", bleu.brevity_penalty) + "\n";
  out += "hyp_length " + std::to_string(bleu.hyp_length) + "\n";
  out += "ref_length " + std::to_string(bleu.ref_length) + "\n";
  out += "das " + std::to_string(per_da.size()) + "\n";
  if (unrealized) out += "unrealized " + std::to_string(unrealized) + "\n";
  return out;
}

std::string EvalReport::key_values() const {
  std::string out = "bleu=" + fmt("%.6f", bleu.bleu) + "\n";
  out += "err_percent=" + fmt("%.6f", err_percent) + "\n";
  for (std::size_t n = 0; n < 4; ++n)
    out += "p" + std::to_string(n + 1) + "=" + fmt("%.6f", bleu.precisions[n]) + "\n";
  out += "bp=" + fmt("%.6f", bleu.brevity_penalty) + "\n";
  out += "das=" + std::to_string(per_da.size()) + "\n";
  out += "unrealized=" + std::to_string(unrealized) + "\n";
  return out;
}

}  // namespace srnlg
