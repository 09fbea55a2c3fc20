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

#include "srnlg/vocab.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "srnlg/dialogue_act.hpp"
#include "srnlg/io.hpp"

namespace srnlg {
namespace {

const std::string kBosToken = "<s>";
const std::string kEosToken = "</s>";
const std::string kUnkToken = "<unk>";

}  // namespace

Vocab::Vocab() {
  append(kBosToken);
  append(kEosToken);
  append(kUnkToken);
}

void Vocab::append(const std::string& token) {
  if (index_.count(token)) throw std::invalid_argument("duplicate vocabulary token: " + token);
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocab Vocab::build(const std::vector<Tokens>& sentences,
                   const std::vector<std::string>& slot_tokens, std::size_t min_count) {
  std::set<std::string> slots(slot_tokens.begin(), slot_tokens.end());
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) {
      if (is_slot_token(t))
        slots.insert(t);
      else
        ++counts[t];
    }
  Vocab v;
  for (const auto& s : slots) v.append(s);
  for (const auto& [w, c] : counts)
    if (c >= min_count && !v.contains(w)) v.append(w);
  return v;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& words) {
  Vocab v;
  for (const auto& w : words)
    if (!v.contains(w)) v.append(w);
  return v;
}

bool Vocab::contains(std::string_view token) const { return index_.count(std::string(token)) != 0; }

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw std::out_of_range("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::encode(const Tokens& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 2);
  ids.push_back(kBos);
  for (const auto& t : tokens) ids.push_back(id(t));
  ids.push_back(kEos);
  return ids;
}

Tokens Vocab::decode(std::span<const int> ids) const {
  Tokens out;
  for (int i : ids)
    if (i != kBos && i != kEos) out.push_back(token(i));
  return out;
}

std::string Vocab::serialize() const {
  std::string out(kFormat);
  out += '\n';
  for (const auto& t : tokens_) out += t + '\n';
  return out;
}

Vocab Vocab::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kFormat)
    throw std::runtime_error("vocab: missing or unsupported header");
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < 3 || lines[0] != kBosToken || lines[1] != kEosToken || lines[2] != kUnkToken)
    throw std::runtime_error("vocab: reserved tokens missing");
  Vocab v;
  for (std::size_t i = 3; i < lines.size(); ++i) v.append(lines[i]);
  return v;
}

void Vocab::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Vocab Vocab::load(const std::filesystem::path& path) { return parse(read_file(path)); }

}  // namespace srnlg
