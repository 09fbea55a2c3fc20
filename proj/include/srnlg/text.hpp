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
#include <string>
#include <string_view>
#include <vector>

namespace srnlg {

using Tokens = std::vector<std::string>;

/// Lower-cases, splits on whitespace and detaches trailing . , ? ! as their
/// own tokens ("dogs." -> "dogs", "."). BLEU and delexicalization share it.
Tokens tokenize(std::string_view text);

/// Joins with single spaces; the punctuation tokens . , ? ! attach to the
/// preceding token.
std::string detokenize(const Tokens& tokens);

/// 64-bit FNV-1a, used for artifact fingerprints.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace srnlg
