// Copyright 2026 The soundnet-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "soundnet/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "soundnet/error.hpp"

namespace soundnet {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return path.string();
  return (base / path).string();
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (!have_header) {
      if (text == "audio,posterior") {
        manifest.kind = ManifestKind::kDistill;
      } else if (text == "audio,label") {
        manifest.kind = ManifestKind::kLabeled;
      } else {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": manifest header must be \"audio,posterior\" or "
                          "\"audio,label\", got \"" +
                          text + "\"");
      }
      have_header = true;
      continue;
    }
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected exactly two comma-separated fields");
    }
    ManifestEntry entry;
    entry.id = trim(text.substr(0, comma));
    const std::string second = trim(text.substr(comma + 1));
    if (entry.id.empty() || second.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty field");
    }
    entry.audio = resolve(base, entry.id);
    entry.second =
        manifest.kind == ManifestKind::kDistill ? resolve(base, second) : second;
    manifest.entries.push_back(std::move(entry));
  }
  if (!have_header) throw ConfigError(path + ": missing manifest header");
  if (manifest.entries.empty()) throw ConfigError(path + ": manifest has no entries");
  return manifest;
}

}  // namespace soundnet
