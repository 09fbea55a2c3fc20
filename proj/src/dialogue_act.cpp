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

#include "srnlg/dialogue_act.hpp"

#include <algorithm>
#include <cctype>

namespace srnlg {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

ValueClass classify(std::string_view value) {
  const std::string v = lower(value);
  if (v == "yes") return ValueClass::BinaryYes;
  if (v == "no") return ValueClass::BinaryNo;
  if (v == "dont_care" || v == "dontcare") return ValueClass::DontCare;
  return ValueClass::Normal;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  DialogueAct parse() {
    DialogueAct da;
    skip_ws();
    const std::size_t act_start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '(' && !is_space(s_[pos_])) {
      if (s_[pos_] == ')' || s_[pos_] == ';' || s_[pos_] == '=')
        throw ParseError("unexpected character in act type", pos_);
      ++pos_;
    }
    da.act_type = std::string(s_.substr(act_start, pos_ - act_start));
    if (da.act_type.empty()) throw ParseError("empty act type", act_start);
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '(') throw ParseError("expected '('", pos_);
    ++pos_;
    skip_ws();
    if (peek() == ')') {
      ++pos_;
    } else {
      for (;;) {
        da.slots.push_back(parse_slot());
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unbalanced parentheses: missing ')'", pos_);
        if (s_[pos_] == ';') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        throw ParseError("expected ';' or ')'", pos_);
      }
    }
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("trailing characters after ')'", pos_);
    return da;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  Slot parse_slot() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != '=' && s_[pos_] != ';' &&
           s_[pos_] != ')' && s_[pos_] != '(' && s_[pos_] != '\'')
      ++pos_;
    Slot slot;
    slot.name = std::string(s_.substr(start, pos_ - start));
    if (slot.name.empty()) throw ParseError("malformed slot: empty slot name", start);
    skip_ws();
    if (peek() != '=') {
      slot.value_class = ValueClass::NoValue;
      return slot;
    }
    ++pos_;
    skip_ws();
    std::string value;
    if (peek() == '\'') {
      const std::size_t open = pos_++;
      // A quote closes the value only when followed by ';' or ')', so
      // apostrophes inside values survive.
      std::size_t close = std::string_view::npos;
      for (std::size_t i = pos_; i < s_.size(); ++i) {
        if (s_[i] != '\'') continue;
        std::size_t j = i + 1;
        while (j < s_.size() && is_space(s_[j])) ++j;
        if (j < s_.size() && (s_[j] == ';' || s_[j] == ')')) {
          close = i;
          break;
        }
      }
      if (close == std::string_view::npos) throw ParseError("unterminated quoted value", open);
      value = std::string(s_.substr(pos_, close - pos_));
      pos_ = close + 1;
    } else {
      const std::size_t vstart = pos_;
      while (pos_ < s_.size() && s_[pos_] != ';' && s_[pos_] != ')') {
        if (s_[pos_] == '(') throw ParseError("malformed slot value", pos_);
        ++pos_;
      }
      value = std::string(trim(s_.substr(vstart, pos_ - vstart)));
      if (value.empty()) throw ParseError("malformed slot: empty value", vstart);
    }
    slot.value_class = classify(value);
    slot.value = std::move(value);
    return slot;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(ValueClass c) {
  switch (c) {
    case ValueClass::Normal: return "normal";
    case ValueClass::BinaryYes: return "yes";
    case ValueClass::BinaryNo: return "no";
    case ValueClass::DontCare: return "dont_care";
    case ValueClass::NoValue: return "none";
  }
  return "normal";
}

std::size_t DialogueAct::delexicalizable_count() const {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](const Slot& s) { return s.delexicalizable(); }));
}

DialogueAct parse_da(std::string_view text) { return Parser(text).parse(); }

std::string render_da(const DialogueAct& da) {
  std::string out = da.act_type + "(";
  for (std::size_t i = 0; i < da.slots.size(); ++i) {
    if (i) out += ';';
    out += da.slots[i].name;
    if (da.slots[i].value) out += "='" + *da.slots[i].value + "'";
  }
  return out + ")";
}

std::string slot_token(std::string_view slot_name) {
  std::string out = "SLOT_";
  for (unsigned char c : slot_name) out += static_cast<char>(std::toupper(c));
  return out;
}

bool is_slot_token(std::string_view token) { return token.size() > 5 && token.starts_with("SLOT_"); }

}  // namespace srnlg
