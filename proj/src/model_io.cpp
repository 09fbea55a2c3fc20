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

#include "srnlg/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "srnlg/io.hpp"
#include "srnlg/text.hpp"

namespace srnlg {
namespace {

constexpr std::string_view kHeader = "srnlg-model 1";

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("model file: " + msg); }

std::string expect_line(std::istream& in, std::string_view tag) {
  std::string line;
  if (!std::getline(in, line)) fail("truncated, expected '" + std::string(tag) + "'");
  if (!line.starts_with(tag)) fail("expected '" + std::string(tag) + "', got '" + line + "'");
  return line.substr(tag.size());
}

std::uint64_t parse_hex(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos, 16);
  if (pos == 0) fail("bad hash '" + s + "'");
  return v;
}

}  // namespace

std::string serialize_model(const ModelFile& model) {
  const auto& p = model.params;
  const auto& d = p.dims();
  std::ostringstream out;
  out << kHeader << '\n'
      << "kind " << to_string(p.kind()) << '\n'
      << "dims " << d.vocab << ' ' << d.embed << ' ' << d.hidden << ' ' << d.da << ' '
      << (d.bias ? 1 : 0) << '\n'
      << "vocab_hash " << hex64(model.vocab_hash) << '\n'
      << "schema_hash " << hex64(model.schema_hash) << '\n';
  char buf[64];
  for (const auto& name : p.store().names()) {
    const Matrix& m = p.weight(name);
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%a", m(r, c));
        if (c) out << ' ';
        out << buf;
      }
      out << '\n';
    }
  }
  out << "end\n";
  return out.str();
}

ModelFile parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader) fail("missing or unsupported header");

  std::string kind_name = expect_line(in, "kind ");
  const CellKind kind = parse_cell_kind(kind_name);
  ModelDims dims;
  {
    std::istringstream ds(expect_line(in, "dims "));
    int bias = 0;
    if (!(ds >> dims.vocab >> dims.embed >> dims.hidden >> dims.da >> bias)) fail("bad dims line");
    dims.bias = bias != 0;
  }
  ModelFile model{ModelParams(kind, dims), 0, 0};
  model.vocab_hash = parse_hex(expect_line(in, "vocab_hash "));
  model.schema_hash = parse_hex(expect_line(in, "schema_hash "));

  std::set<std::string> seen;
  for (;;) {
    if (!std::getline(in, line)) fail("missing 'end'");
    if (line == "end") break;
    std::istringstream hs(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> tag >> name >> rows >> cols) || tag != "matrix") fail("bad matrix header '" + line + "'");
    if (!model.params.has(name)) fail("unexpected matrix " + name + " for " + kind_name);
    Matrix& m = model.params.weight(name);
    if (m.rows() != rows || m.cols() != cols) fail("shape mismatch for " + name);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) fail("truncated matrix " + name);
      const char* s = line.c_str();
      for (std::size_t c = 0; c < cols; ++c) {
        char* endp = nullptr;
        const double v = std::strtod(s, &endp);
        if (endp == s) fail("bad value in " + name);
        m(r, c) = v;
        s = endp;
      }
    }
    seen.insert(name);
  }
  if (seen.size() != model.params.store().size()) fail("missing matrices");
  if (!model.params.store().all_finite()) fail("non-finite weights");
  return model;
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  write_file(path, serialize_model(model));
}

ModelFile load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace srnlg
