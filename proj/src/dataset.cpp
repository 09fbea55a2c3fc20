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

#include "srnlg/dataset.hpp"

#include <json.hpp>
#include <map>

#include "srnlg/io.hpp"
#include "srnlg/rng.hpp"

namespace srnlg {
namespace {

// Skips leading blank and '#' lines; returns the offset of the JSON body.
std::size_t skip_comment_block(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t eol = s.find('\n', pos);
    if (eol == std::string_view::npos) eol = s.size();
    std::string_view line = s.substr(pos, eol - pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') return pos;
    pos = eol + 1;
  }
  return s.size();
}

}  // namespace

Dataset parse_dataset(std::string_view content) {
  const std::size_t body = skip_comment_block(content);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content.substr(body));
  } catch (const nlohmann::json::parse_error& e) {
    throw DatasetError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_array()) throw DatasetError("top level is not an array", 0);

  Dataset out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_array() || rec.size() < 2 || !rec[0].is_string() || !rec[1].is_string())
      throw DatasetError("expected [\"da\", \"utterance\", ...]", i);
    const std::string da_text = rec[0].get<std::string>();
    auto it = index.find(da_text);
    if (it == index.end()) {
      DialogueAct da;
      try {
        da = parse_da(da_text);
      } catch (const ParseError& e) {
        throw DatasetError(e.what(), i);
      }
      it = index.emplace(da_text, out.size()).first;
      out.push_back({da_text, std::move(da), {}});
    }
    out[it->second].references.push_back(rec[1].get<std::string>());
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& g : data)
    for (const auto& r : g.references) doc.push_back({g.da_text, r});
  write_file(path, doc.dump(1) + "\n");
}

DataSplits split_dataset(Dataset data, std::uint64_t seed) {
  Rng rng(seed);
  rng.shuffle(data);
  const std::size_t n = data.size();
  const std::size_t n_train = n * 3 / 5;
  const std::size_t n_valid = n / 5;
  DataSplits s;
  auto begin = std::make_move_iterator(data.begin());
  s.train.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                 begin + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_valid),
                std::make_move_iterator(data.end()));
  return s;
}

DataSplits load_splits(const std::filesystem::path& path, std::uint64_t seed) {
  if (std::filesystem::is_directory(path)) {
    const auto train = path / "train.json";
    const auto valid = path / "valid.json";
    const auto test = path / "test.json";
    if (std::filesystem::exists(train) && std::filesystem::exists(valid) &&
        std::filesystem::exists(test))
      return {load_dataset(train), load_dataset(valid), load_dataset(test)};
    throw std::runtime_error(path.string() + ": expected train.json, valid.json and test.json");
  }
  return split_dataset(load_dataset(path), seed);
}

std::size_t sentence_count(const Dataset& data) {
  std::size_t n = 0;
  for (const auto& g : data) n += g.references.size();
  return n;
}

}  // namespace srnlg
