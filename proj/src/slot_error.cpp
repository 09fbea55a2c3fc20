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

#include "srnlg/slot_error.hpp"

#include <map>

namespace srnlg {

SlotError compute_err(const Tokens& tokens, const DialogueAct& da) {
  std::map<std::string, long> balance;  // required - produced
  SlotError e;
  for (const auto& s : da.slots) {
    if (!s.delexicalizable()) continue;
    ++balance[slot_token(s.name)];
    ++e.total;
  }
  for (const auto& t : tokens)
    if (is_slot_token(t)) --balance[t];
  for (const auto& [_, b] : balance) {
    if (b > 0) e.missing += static_cast<std::size_t>(b);
    if (b < 0) e.redundant += static_cast<std::size_t>(-b);
  }
  if (e.total == 0) {
    e.no_slots = true;
    e.err = 0.0;
  } else {
    e.err = static_cast<double>(e.missing + e.redundant) / static_cast<double>(e.total);
  }
  return e;
}

}  // namespace srnlg
