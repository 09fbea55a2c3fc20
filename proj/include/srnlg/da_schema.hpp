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
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srnlg/dialogue_act.hpp"
#include "srnlg/matrix.hpp"
#include "srnlg/text.hpp"

namespace srnlg {

class UnknownActError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feature kind "present" marks slot presence; the other kinds are the
/// non-normal value classes ("yes", "no", "dont_care", "none").
struct SlotFeature {
  std::string slot;
  std::string kind;
  auto operator<=>(const SlotFeature&) const = default;
};

/// Conditioning vector: act-type one-hot followed by binary slot features.
struct DAVector {
  Vector z;
  std::size_t unknown_features = 0;
};

class DASchema {
 public:
  static constexpr std::string_view kFormat = "srnlg-schema 1";

  DASchema() = default;
  /// Scans the (training) acts; act types and features come out sorted.
  static DASchema build(std::span<const DialogueAct> acts);

  const std::vector<std::string>& act_types() const { return act_types_; }
  const std::vector<SlotFeature>& features() const { return features_; }
  std::size_t size() const { return act_types_.size() + features_.size(); }

  /// Throws UnknownActError for act types outside the schema. Unknown slot
  /// features contribute nothing and are counted in unknown_features.
  DAVector encode(const DialogueAct& da) const;

  std::string serialize() const;
  static DASchema parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static DASchema load(const std::filesystem::path& path);
  std::uint64_t hash() const { return fnv1a64(serialize()); }

  friend bool operator==(const DASchema&, const DASchema&) = default;

 private:
  std::vector<std::string> act_types_;
  std::vector<SlotFeature> features_;
};

/// Features a single slot raises: presence, plus its value class unless normal.
std::vector<SlotFeature> slot_features(const Slot& slot);

}  // namespace srnlg
