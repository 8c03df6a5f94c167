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

#include "soundnet/posterior.hpp"

#include <cmath>

#include "soundnet/binio.hpp"
#include "soundnet/error.hpp"

namespace soundnet {

namespace {

constexpr const char kMagic[] = "SNDP";

void check_distributions(const Tensor3& probs, const HeadSplit& split,
                         const std::string& what) {
  const std::int64_t heads[2][2] = {{0, split.object_classes},
                                    {split.object_classes, split.scene_classes}};
  for (std::int64_t t = 0; t < probs.length; ++t) {
    for (const auto& head : heads) {
      Real sum = 0;
      for (std::int64_t j = 0; j < head[1]; ++j) {
        const Real p = probs.at(0, head[0] + j, t);
        if (!(p >= 0)) {
          throw FormatError(FormatError::Code::kCorrupt,
                            what + ": negative probability at timestep " +
                                std::to_string(t));
        }
        sum += p;
      }
      if (std::abs(sum - Real(1)) > kPosteriorSumTolerance) {
        throw FormatError(FormatError::Code::kCorrupt,
                          what + ": head starting at class " + std::to_string(head[0]) +
                              " sums to " + std::to_string(sum) + " at timestep " +
                              std::to_string(t) + " (|sum - 1| > " +
                              std::to_string(kPosteriorSumTolerance) + ")");
      }
    }
  }
}

}  // namespace

void save_posteriors(const std::string& path, const std::vector<PosteriorClip>& clips,
                     const HeadSplit& split) {
  if (clips.empty()) throw Error("save_posteriors: no clips");
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kPosteriorVersion);
  w.u32(static_cast<std::uint32_t>(clips.size()));
  for (const PosteriorClip& clip : clips) {
    if (clip.probs.batch != 1 || clip.probs.channels != split.total()) {
      throw ShapeError("save_posteriors: clip " + clip.id + " expected shape (1, " +
                       std::to_string(split.total()) + ", T), got " +
                       clip.probs.shape_str());
    }
    check_distributions(clip.probs, split, path + " clip " + clip.id);
    w.str(clip.id);
    w.u32(static_cast<std::uint32_t>(clip.probs.length));
    for (std::int64_t t = 0; t < clip.probs.length; ++t) {
      for (std::int64_t c = 0; c < clip.probs.channels; ++c) {
        w.f32(static_cast<float>(clip.probs.at(0, c, t)));
      }
    }
  }
  w.write_file(path);
}

std::vector<PosteriorClip> load_posteriors(const std::string& path, const HeadSplit& split) {
  ByteReader r = ByteReader::open(path, kMagic);
  const std::uint32_t version = r.u32();
  if (version != kPosteriorVersion) {
    throw FormatError(FormatError::Code::kBadVersion,
                      path + ": posterior version " + std::to_string(version) +
                          ", expected " + std::to_string(kPosteriorVersion));
  }
  const std::uint32_t clip_count = r.u32();
  if (clip_count == 0) {
    throw FormatError(FormatError::Code::kCorrupt, path + ": no clips");
  }
  const std::int64_t classes = split.total();
  std::vector<PosteriorClip> clips;
  clips.reserve(clip_count);
  for (std::uint32_t k = 0; k < clip_count; ++k) {
    PosteriorClip clip;
    clip.id = r.str();
    const std::uint32_t timesteps = r.u32();
    if (timesteps == 0) {
      throw FormatError(FormatError::Code::kCorrupt,
                        path + ": clip " + clip.id + " has zero timesteps");
    }
    clip.probs = Tensor3(1, classes, timesteps);
    for (std::uint32_t t = 0; t < timesteps; ++t) {
      for (std::int64_t c = 0; c < classes; ++c) {
        clip.probs.at(0, c, t) = static_cast<Real>(r.f32());
      }
    }
    check_distributions(clip.probs, split, path + " clip " + clip.id);
    clips.push_back(std::move(clip));
  }
  r.require_end();
  return clips;
}

const PosteriorClip& posterior_for(const std::vector<PosteriorClip>& clips,
                                   const std::string& id, const std::string& path) {
  if (clips.size() == 1) return clips.front();
  for (const PosteriorClip& clip : clips) {
    if (clip.id == id) return clip;
  }
  throw ConfigError(path + ": no posterior clip with id \"" + id + "\"");
}

}  // namespace soundnet
