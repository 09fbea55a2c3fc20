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

#include "srnlg/text.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace srnlg {
namespace {

bool is_punct(char c) { return c == '.' || c == ',' || c == '?' || c == '!'; }

bool is_punct_token(const std::string& t) { return t.size() == 1 && is_punct(t[0]); }

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string lowered;
  lowered.reserve(text.size());
  for (unsigned char c : text) lowered += static_cast<char>(std::tolower(c));
  std::istringstream in(lowered);
  std::string word;
  while (in >> word) {
    std::vector<std::string> trailing;
    while (word.size() > 1 && is_punct(word.back())) {
      trailing.emplace_back(1, word.back());
      word.pop_back();
    }
    out.push_back(std::move(word));
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(*it);
  }
  return out;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !is_punct_token(t)) out += ' ';
    out += t;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace srnlg
