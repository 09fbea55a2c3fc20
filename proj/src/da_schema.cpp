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

#include "srnlg/da_schema.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "srnlg/io.hpp"

namespace srnlg {

std::vector<SlotFeature> slot_features(const Slot& slot) {
  std::vector<SlotFeature> out{{slot.name, "present"}};
  if (slot.value_class != ValueClass::Normal)
    out.push_back({slot.name, std::string(to_string(slot.value_class))});
  return out;
}

DASchema DASchema::build(std::span<const DialogueAct> acts) {
  std::set<std::string> types;
  std::set<SlotFeature> feats;
  for (const auto& da : acts) {
    types.insert(da.act_type);
    for (const auto& s : da.slots)
      for (auto& f : slot_features(s)) feats.insert(std::move(f));
  }
  DASchema schema;
  schema.act_types_.assign(types.begin(), types.end());
  schema.features_.assign(feats.begin(), feats.end());
  return schema;
}

DAVector DASchema::encode(const DialogueAct& da) const {
  DAVector out;
  out.z.assign(size(), 0.0);
  auto act = std::lower_bound(act_types_.begin(), act_types_.end(), da.act_type);
  if (act == act_types_.end() || *act != da.act_type)
    throw UnknownActError("unknown act type: " + da.act_type);
  out.z[static_cast<std::size_t>(act - act_types_.begin())] = 1.0;
  for (const auto& s : da.slots) {
    for (const auto& f : slot_features(s)) {
      auto it = std::lower_bound(features_.begin(), features_.end(), f);
      if (it == features_.end() || *it != f) {
        ++out.unknown_features;
        continue;
      }
      out.z[act_types_.size() + static_cast<std::size_t>(it - features_.begin())] = 1.0;
    }
  }
  return out;
}

std::string DASchema::serialize() const {
  std::string out(kFormat);
  out += '\n';
  for (const auto& a : act_types_) out += "act " + a + '\n';
  for (const auto& f : features_) out += "feature " + f.slot + ' ' + f.kind + '\n';
  return out;
}

DASchema DASchema::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kFormat)
    throw std::runtime_error("schema: missing or unsupported header");
  DASchema s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "act") {
      std::string a;
      ls >> a;
      s.act_types_.push_back(a);
    } else if (tag == "feature") {
      SlotFeature f;
      ls >> f.slot >> f.kind;
      s.features_.push_back(f);
    } else {
      throw std::runtime_error("schema: bad line '" + line + "'");
    }
  }
  if (!std::is_sorted(s.act_types_.begin(), s.act_types_.end()) ||
      !std::is_sorted(s.features_.begin(), s.features_.end()))
    throw std::runtime_error("schema: entries not in canonical order");
  return s;
}

void DASchema::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

DASchema DASchema::load(const std::filesystem::path& path) { return parse(read_file(path)); }

}  // namespace srnlg
