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

#ifndef SOUNDNET_AUDIO_HPP_
#define SOUNDNET_AUDIO_HPP_

#include <cstdint>
#include <vector>

#include "soundnet/tensor.hpp"
#include "soundnet/wav.hpp"

namespace soundnet {

struct Waveform {
  std::int64_t sample_rate = 0;
  std::vector<Real> samples;  // mono
};

inline constexpr std::int64_t kTargetSampleRate = 22050;
// Decoded waveforms live in [-1, 1); the network consumes them scaled into
// roughly [-256, 256].
inline constexpr Real kWaveformScale = 256.0;

// Mean over channels.
Waveform downmix(const WavData& wav);

// Linear interpolation resampler. Output length floor((n-1) * target /
// source) + 1; output sample i reads source position i * source / target.
// Identity (bit-exact copy) when the rates already match.
Waveform resample_linear(const Waveform& in, std::int64_t target_rate);

// Full pipeline: downmix -> resample to kTargetSampleRate -> scale by
// kWaveformScale. The scale is applied only when the signal still sits in
// [-1, 1], so feeding an already-preprocessed waveform through again cannot
// scale it twice.
Waveform preprocess(const WavData& wav);

// Hop for a given overlap fraction in [0, 1): max(1, round(W * (1 -
// overlap))).
std::int64_t window_hop(std::int64_t window, Real overlap);

// Fixed-length excerpts starting at 0, hop, 2*hop, ... while start + W <= N,
// plus one right-aligned tail window when those do not reach the final
// sample. A signal shorter than W yields a single zero-padded window.
std::vector<std::vector<Real>> extract_windows(const std::vector<Real>& samples,
                                               std::int64_t window, std::int64_t hop);

// (1, 1, L) view of a mono signal.
Tensor3 to_tensor(const std::vector<Real>& mono);

}  // namespace soundnet

#endif  // SOUNDNET_AUDIO_HPP_
