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

#ifndef SOUNDNET_POSTERIOR_HPP_
#define SOUNDNET_POSTERIOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "soundnet/network.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

// Teacher posterior file ("SNDP"):
//
//   magic "SNDP" | u32 version | u32 clip_count
//   | clip_count x { str id, u32 timesteps, f32 probs[timesteps][classes] }
//   | u32 crc32
//
// classes = HeadSplit::total() (object then scene), timestep-major. At every
// timestep each head block must be a distribution: entries nonnegative and
// sums within kPosteriorSumTolerance of 1.
inline constexpr std::uint32_t kPosteriorVersion = 1;
inline constexpr Real kPosteriorSumTolerance = 1e-3;

struct PosteriorClip {
  std::string id;
  Tensor3 probs;  // (1, classes, timesteps)
};

void save_posteriors(const std::string& path, const std::vector<PosteriorClip>& clips,
                     const HeadSplit& split);

std::vector<PosteriorClip> load_posteriors(const std::string& path, const HeadSplit& split);

// The clip whose id matches, or the sole clip of a single-clip file
// regardless of id. Anything else throws.
const PosteriorClip& posterior_for(const std::vector<PosteriorClip>& clips,
                                   const std::string& id, const std::string& path);

}  // namespace soundnet

#endif  // SOUNDNET_POSTERIOR_HPP_
