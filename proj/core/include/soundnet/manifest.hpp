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

#ifndef SOUNDNET_MANIFEST_HPP_
#define SOUNDNET_MANIFEST_HPP_

#include <string>
#include <vector>

namespace soundnet {

// Two-column CSV with a mandatory header, either
//
//   audio,posterior     (distillation: waveform + teacher posterior file)
//   audio,label         (classification: waveform + class label)
//
// Fields may not contain commas; '#' lines and blank lines are skipped.
// Relative paths are resolved against the manifest's directory.
enum class ManifestKind { kDistill, kLabeled };

struct ManifestEntry {
  // Path as written in the manifest; used as the stable clip id.
  std::string id;
  // Resolved audio path.
  std::string audio;
  // Resolved posterior path (kDistill) or the label verbatim (kLabeled).
  std::string second;
};

struct Manifest {
  ManifestKind kind = ManifestKind::kDistill;
  std::vector<ManifestEntry> entries;
};

Manifest load_manifest(const std::string& path);

}  // namespace soundnet

#endif  // SOUNDNET_MANIFEST_HPP_
