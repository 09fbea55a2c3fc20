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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srnlg {

enum class ValueClass { Normal, BinaryYes, BinaryNo, DontCare, NoValue };

std::string_view to_string(ValueClass c);

struct Slot {
  std::string name;
  std::optional<std::string> value;
  ValueClass value_class = ValueClass::Normal;

  // Only normal values are replaced by slot tokens in text.
  bool delexicalizable() const { return value_class == ValueClass::Normal; }
  friend bool operator==(const Slot&, const Slot&) = default;
};

/// An act type with its slots in source order. Duplicate slot names are
/// legal and their order is significant (e.g. compare acts naming two items).
struct DialogueAct {
  std::string act_type;
  std::vector<Slot> slots;

  std::size_t delexicalizable_count() const;
  friend bool operator==(const DialogueAct&, const DialogueAct&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses `act(slot=value; slot='quoted value'; bare_slot)`.
DialogueAct parse_da(std::string_view text);
/// Inverse printer: parse_da(render_da(da)) == da.
std::string render_da(const DialogueAct& da);

/// "SLOT_" + upper-cased slot name.
std::string slot_token(std::string_view slot_name);
bool is_slot_token(std::string_view token);

}  // namespace srnlg
