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

#include "srnlg/dialogue_act.hpp"
#include "srnlg/text.hpp"

namespace srnlg {

struct SlotError {
  std::size_t missing = 0;    // p
  std::size_t redundant = 0;  // q
  std::size_t total = 0;      // N, delexicalizable DA slots
  double err = 0.0;           // (p + q) / N
  bool no_slots = false;      // N == 0, err forced to 0
};

/// Slot error of a delexicalized token sequence against a DA. Only normal
/// (delexicalizable) DA slots are counted; the comparison is between the
/// multiset of SLOT_<NAME> tokens produced and the multiset the DA requires.
SlotError compute_err(const Tokens& tokens, const DialogueAct& da);

}  // namespace srnlg
