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

#ifndef SOUNDNET_WAV_HPP_
#define SOUNDNET_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "soundnet/tensor.hpp"

namespace soundnet {

struct WavData {
  std::int64_t sample_rate = 0;
  std::int64_t channels = 0;
  // Interleaved, one frame per sample point; PCM16 scaled by 1/32768 into
  // [-1, 1).
  std::vector<Real> samples;

  std::int64_t frames() const {
    return channels == 0 ? 0 : static_cast<std::int64_t>(samples.size()) / channels;
  }
};

// RIFF/WAVE reader for 16-bit PCM, 1 or 2 channels. Unknown chunks are
// skipped; missing fmt/data chunks, other encodings or channel counts throw
// FormatError.
WavData decode_wav(const std::string& path);

// 16-bit PCM writer (fixtures and round-trip tests). Samples are clamped to
// [-1, 1] and quantized with round(x * 32767).
void write_wav(const std::string& path, std::int64_t sample_rate, std::int64_t channels,
               const std::vector<Real>& samples);

}  // namespace soundnet

#endif  // SOUNDNET_WAV_HPP_
