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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "srnlg/dialogue_act.hpp"
#include "srnlg/text.hpp"

namespace srnlg {

struct SlotAlignment {
  std::size_t token_index = 0;
  std::size_t slot_index = 0;  // index into DialogueAct::slots
  friend bool operator==(const SlotAlignment&, const SlotAlignment&) = default;
};

/// Tokenized utterance with slot values replaced by SLOT_<NAME> tokens.
/// BOS/EOS are not stored here; Vocab::encode adds them.
struct DelexUtterance {
  Tokens tokens;
  std::vector<SlotAlignment> alignment;  // one entry per slot token
  std::vector<std::size_t> misses;       // normal slots whose value was not found
};

/// Left-to-right, longest-match replacement of normal slot values. Each DA
/// slot is consumed at most once; among equal-length matches the earliest
/// unconsumed slot wins. Binary, dont_care and bare slots are never replaced.
DelexUtterance delexicalize(std::string_view utterance, const DialogueAct& da);

struct Lexicalized {
  std::string text;
  std::vector<std::size_t> unfilled;  // token indices of slot tokens left verbatim
};

/// Each SLOT_<NAME> takes the next unconsumed slot of that name in DA order.
Lexicalized lexicalize(const Tokens& tokens, const DialogueAct& da);

}  // namespace srnlg
