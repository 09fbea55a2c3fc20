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

// Model container, plain text, one directive per line:
//
//   srnlg-model 1
//   kind srgru-context
//   dims <vocab> <embed> <hidden> <da> <bias 0|1>
//   vocab_hash <16 hex digits>
//   schema_hash <16 hex digits>
//   matrix <name> <rows> <cols>
//   <cols hexfloat values>           (repeated <rows> times)
//   ...                              (one matrix block per parameter, name order)
//   end
//
// Values are written with printf's %a so load(save(m)) is bit-exact.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "srnlg/cells.hpp"

namespace srnlg {

struct ModelFile {
  ModelParams params;
  std::uint64_t vocab_hash = 0;
  std::uint64_t schema_hash = 0;
};

std::string serialize_model(const ModelFile& model);
ModelFile parse_model(std::string_view text);
void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace srnlg
