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

// Benchmark dataset files: an optional block of '#' comment lines followed by
// one JSON array of records, each record an array whose first element is the
// DA string and second element a reference utterance. Further elements
// (e.g. a pre-delexicalized copy) are ignored.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srnlg/dialogue_act.hpp"

namespace srnlg {

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& msg, std::size_t record)
      : std::runtime_error("record " + std::to_string(record) + ": " + msg), record_(record) {}
  std::size_t record() const { return record_; }

 private:
  std::size_t record_;
};

/// All references sharing one exact DA string, in file order.
struct DAGroup {
  std::string da_text;
  DialogueAct da;
  std::vector<std::string> references;
};

using Dataset = std::vector<DAGroup>;

struct DataSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

Dataset parse_dataset(std::string_view content);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

/// Shuffles DA groups with the seed and cuts 3:1:1 (train gets the floor of
/// 3/5, valid the floor of 1/5, test the rest). Groups never straddle splits.
DataSplits split_dataset(Dataset data, std::uint64_t seed);

/// A directory holding train.json, valid.json and test.json is used as-is;
/// a single file is split with split_dataset.
DataSplits load_splits(const std::filesystem::path& path, std::uint64_t seed);

std::size_t sentence_count(const Dataset& data);

}  // namespace srnlg
