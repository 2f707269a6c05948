// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON-lines manifests: one {"id": str, "path": str, "label": int} per line.
// Relative paths resolve against the manifest's directory.

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttakit/error.hpp"
#include "ttakit/metrics.hpp"

namespace ttakit {

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  int label = -1;  // -1 when the manifest has no label

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open manifest " + file.string());
  const auto base = file.parent_path();
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = file.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      if (j.contains("path")) {
        e.path = j.at("path").get<std::string>();
        if (e.path.is_relative()) e.path = base / e.path;
      }
      e.label = j.value("label", -1);
      if (e.id.empty()) throw FormatError(where + ": empty id");
      if (!seen.insert(e.id).second) throw FormatError(where + ": duplicate id '" + e.id + "'");
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(where + ": " + ex.what());
    }
  }
  return out;
}

/// Paths are written relative to `file`'s directory when they live under it.
inline void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot create manifest " + file.string());
  const auto base = file.parent_path();
  for (const auto& e : entries) {
    auto rel = e.path.lexically_relative(base.empty() ? std::filesystem::path(".") : base);
    if (rel.empty() || *rel.begin() == "..") rel = e.path;
    nlohmann::json j{{"id", e.id}, {"path", rel.generic_string()}, {"label", e.label}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + file.string());
}

/// Labels from a manifest-shaped JSON-lines file; entries without a label
/// are skipped.
inline LabelMap read_labels(const std::filesystem::path& file) {
  LabelMap labels;
  for (const auto& e : read_manifest(file)) {
    if (e.label >= 0) labels.emplace(e.id, e.label);
  }
  return labels;
}

}  // namespace ttakit
