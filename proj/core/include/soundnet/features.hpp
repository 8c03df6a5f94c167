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

#ifndef SOUNDNET_FEATURES_HPP_
#define SOUNDNET_FEATURES_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "soundnet/network.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

// Feature dump ("SNDF"):
//
//   magic "SNDF" | u32 version | str layer | u32 dim | u32 count
//   | count x { str id, f32 values[dim] } | u32 crc32
//
// Window ids are "<clip id>#<window index>".
inline constexpr std::uint32_t kFeatureVersion = 1;

struct FeatureSet {
  std::string layer;
  std::int64_t dim = 0;
  std::vector<std::string> ids;
  std::vector<std::vector<Real>> vectors;
};

// Cuts each clip into fixed windows (window_seconds at the pipeline rate,
// fractional overlap), runs an eval-mode forward up to tap `layer` on each
// window, and flattens the (channels, time) activation row-major into one
// vector. All windows share the same dim because the window length is fixed.
// With mean_over_time the activation is averaged over its time axis first,
// so the vector has one entry per channel.
FeatureSet extract_features(
    const NetworkConfig& config, const Parameters& params,
    const std::vector<std::pair<std::string, std::vector<Real>>>& clips,
    const std::string& layer, Real window_seconds, Real overlap,
    bool mean_over_time = false);

void save_features(const std::string& path, const FeatureSet& features);
FeatureSet load_features(const std::string& path);

// Clip id part of "<clip>#<k>" (everything before the last '#').
std::string clip_of(const std::string& window_id);

}  // namespace soundnet

#endif  // SOUNDNET_FEATURES_HPP_
