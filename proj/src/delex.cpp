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

#include "srnlg/delex.hpp"

#include <algorithm>

namespace srnlg {

DelexUtterance delexicalize(std::string_view utterance, const DialogueAct& da) {
  const Tokens words = tokenize(utterance);

  std::vector<Tokens> values(da.slots.size());
  std::vector<bool> consumed(da.slots.size(), true);
  for (std::size_t k = 0; k < da.slots.size(); ++k) {
    const Slot& s = da.slots[k];
    if (!s.delexicalizable() || !s.value) continue;
    values[k] = tokenize(*s.value);
    consumed[k] = values[k].empty();
  }

  DelexUtterance out;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t best = da.slots.size();
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < da.slots.size(); ++k) {
      if (consumed[k]) continue;
      const Tokens& v = values[k];
      if (v.size() <= best_len || i + v.size() > words.size()) continue;
      if (std::equal(v.begin(), v.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
        best = k;
        best_len = v.size();
      }
    }
    if (best_len == 0) {
      out.tokens.push_back(words[i++]);
      continue;
    }
    consumed[best] = true;
    out.alignment.push_back({out.tokens.size(), best});
    out.tokens.push_back(slot_token(da.slots[best].name));
    i += best_len;
  }

  for (std::size_t k = 0; k < da.slots.size(); ++k)
    if (da.slots[k].delexicalizable() && !consumed[k]) out.misses.push_back(k);
  return out;
}

Lexicalized lexicalize(const Tokens& tokens, const DialogueAct& da) {
  std::vector<bool> used(da.slots.size(), false);
  Tokens surface;
  surface.reserve(tokens.size());
  Lexicalized out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (!is_slot_token(t)) {
      surface.push_back(t);
      continue;
    }
    bool filled = false;
    for (std::size_t k = 0; k < da.slots.size(); ++k) {
      const Slot& s = da.slots[k];
      if (used[k] || !s.delexicalizable() || !s.value || slot_token(s.name) != t) continue;
      used[k] = true;
      surface.push_back(*s.value);
      filled = true;
      break;
    }
    if (!filled) {
      surface.push_back(t);
      out.unfilled.push_back(i);
    }
  }
  out.text = detokenize(surface);
  return out;
}

}  // namespace srnlg
