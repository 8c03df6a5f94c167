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

#include "soundnet/features.hpp"

#include <cmath>

#include "soundnet/audio.hpp"
#include "soundnet/binio.hpp"
#include "soundnet/error.hpp"

namespace soundnet {

namespace {

constexpr const char kMagic[] = "SNDF";

}  // namespace

FeatureSet extract_features(
    const NetworkConfig& config, const Parameters& params,
    const std::vector<std::pair<std::string, std::vector<Real>>>& clips,
    const std::string& layer, Real window_seconds, Real overlap,
    bool mean_over_time) {
  if (!(window_seconds > 0)) throw Error("extract_features: window_seconds must be > 0");
  const std::int64_t window = std::max<std::int64_t>(
      1, std::llround(window_seconds * static_cast<Real>(kTargetSampleRate)));
  const std::int64_t hop = window_hop(window, overlap);

  ForwardOptions options;
  options.mode = BatchNormMode::kEval;
  options.stop_after = layer;

  FeatureSet features;
  features.layer = layer;
  for (const auto& [id, samples] : clips) {
    const std::vector<std::vector<Real>> windows = extract_windows(samples, window, hop);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const ForwardResult fwd = forward(config, params, to_tensor(windows[k]), options);
      const Tensor3& act = fwd.output;
      std::vector<Real> vec;
      if (mean_over_time) {
        vec.resize(static_cast<std::size_t>(act.channels));
        for (std::int64_t c = 0; c < act.channels; ++c) {
          Real sum = 0;
          for (std::int64_t t = 0; t < act.length; ++t) sum += act.at(0, c, t);
          vec[static_cast<std::size_t>(c)] = sum / static_cast<Real>(act.length);
        }
      } else {
        vec.assign(act.values.begin(), act.values.end());
      }
      const std::int64_t dim = static_cast<std::int64_t>(vec.size());
      if (features.dim == 0) {
        features.dim = dim;
      } else if (dim != features.dim) {
        throw ShapeError("extract_features: window feature dim " + std::to_string(dim) +
                         " != " + std::to_string(features.dim));
      }
      features.ids.push_back(id + "#" + std::to_string(k));
      features.vectors.push_back(std::move(vec));
    }
  }
  if (features.vectors.empty()) throw Error("extract_features: no clips");
  return features;
}

void save_features(const std::string& path, const FeatureSet& features) {
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kFeatureVersion);
  w.str(features.layer);
  w.u32(static_cast<std::uint32_t>(features.dim));
  w.u32(static_cast<std::uint32_t>(features.ids.size()));
  for (std::size_t i = 0; i < features.ids.size(); ++i) {
    w.str(features.ids[i]);
    if (features.vectors[i].size() != static_cast<std::size_t>(features.dim)) {
      throw ShapeError("save_features: vector " + features.ids[i] + " has " +
                       std::to_string(features.vectors[i].size()) + " values, dim is " +
                       std::to_string(features.dim));
    }
    for (const Real v : features.vectors[i]) w.f32(static_cast<float>(v));
  }
  w.write_file(path);
}

FeatureSet load_features(const std::string& path) {
  ByteReader r = ByteReader::open(path, kMagic);
  const std::uint32_t version = r.u32();
  if (version != kFeatureVersion) {
    throw FormatError(FormatError::Code::kBadVersion,
                      path + ": feature version " + std::to_string(version) +
                          ", expected " + std::to_string(kFeatureVersion));
  }
  FeatureSet features;
  features.layer = r.str();
  features.dim = r.u32();
  const std::uint32_t count = r.u32();
  if (features.dim < 1 || count < 1) {
    throw FormatError(FormatError::Code::kCorrupt, path + ": empty feature set");
  }
  features.ids.reserve(count);
  features.vectors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    features.ids.push_back(r.str());
    std::vector<Real> vec(static_cast<std::size_t>(features.dim));
    for (Real& v : vec) v = static_cast<Real>(r.f32());
    features.vectors.push_back(std::move(vec));
  }
  r.require_end();
  return features;
}

std::string clip_of(const std::string& window_id) {
  const std::size_t hash = window_id.rfind('#');
  return hash == std::string::npos ? window_id : window_id.substr(0, hash);
}

}  // namespace soundnet
