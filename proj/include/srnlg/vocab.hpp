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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srnlg/text.hpp"

namespace srnlg {

/// Dense token <-> index map. Layout: BOS, EOS, UNK, then slot tokens in
/// sorted order, then words in sorted order.
class Vocab {
 public:
  static constexpr int kBos = 0;
  static constexpr int kEos = 1;
  static constexpr int kUnk = 2;
  static constexpr std::string_view kFormat = "srnlg-vocab 1";

  Vocab();
  static Vocab build(const std::vector<Tokens>& sentences,
                     const std::vector<std::string>& slot_tokens, std::size_t min_count = 1);
  /// Builds from an explicit word list (no frequency filtering). For tests.
  static Vocab from_tokens(const std::vector<std::string>& words);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  int id(std::string_view token) const;  // kUnk when absent
  const std::string& token(int id) const;

  /// BOS + ids + EOS.
  std::vector<int> encode(const Tokens& tokens) const;
  /// Drops BOS/EOS.
  Tokens decode(std::span<const int> ids) const;

  std::string serialize() const;
  static Vocab parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);
  std::uint64_t hash() const { return fnv1a64(serialize()); }

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  void append(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace srnlg
