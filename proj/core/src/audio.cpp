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

#include "soundnet/audio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "soundnet/error.hpp"

namespace soundnet {

Waveform downmix(const WavData& wav) {
  if (wav.channels < 1) throw Error("downmix: no channels");
  Waveform out;
  out.sample_rate = wav.sample_rate;
  const std::int64_t frames = wav.frames();
  out.samples.resize(static_cast<std::size_t>(frames));
  for (std::int64_t i = 0; i < frames; ++i) {
    Real acc = 0;
    for (std::int64_t c = 0; c < wav.channels; ++c) {
      acc += wav.samples[static_cast<std::size_t>(i * wav.channels + c)];
    }
    out.samples[static_cast<std::size_t>(i)] = acc / static_cast<Real>(wav.channels);
  }
  return out;
}

Waveform resample_linear(const Waveform& in, std::int64_t target_rate) {
  if (in.sample_rate < 1 || target_rate < 1) {
    throw Error("resample_linear: sample rates must be positive");
  }
  if (in.sample_rate == target_rate) {
    return in;
  }
  Waveform out;
  out.sample_rate = target_rate;
  const std::int64_t n_in = static_cast<std::int64_t>(in.samples.size());
  if (n_in == 0) return out;
  if (n_in == 1) {
    out.samples = in.samples;
    return out;
  }
  const std::int64_t n_out = (n_in - 1) * target_rate / in.sample_rate + 1;
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (std::int64_t i = 0; i < n_out; ++i) {
    // Source position i * source / target, split exactly into integer index
    // and fractional part to keep the mapping deterministic.
    const std::int64_t num = i * in.sample_rate;
    const std::int64_t idx = num / target_rate;
    const Real frac = static_cast<Real>(num % target_rate) / static_cast<Real>(target_rate);
    const Real a = in.samples[static_cast<std::size_t>(idx)];
    const Real b = idx + 1 < n_in ? in.samples[static_cast<std::size_t>(idx + 1)] : a;
    out.samples[static_cast<std::size_t>(i)] = a + (b - a) * frac;
  }
  return out;
}

Waveform preprocess(const WavData& wav) {
  Waveform mono = downmix(wav);
  Waveform resampled = resample_linear(mono, kTargetSampleRate);
  Real peak = 0;
  for (const Real x : resampled.samples) peak = std::max(peak, std::abs(x));
  if (peak <= Real(1)) {
    for (Real& x : resampled.samples) x *= kWaveformScale;
  }
  return resampled;
}

std::int64_t window_hop(std::int64_t window, Real overlap) {
  if (window < 1) throw Error("window_hop: window must be >= 1");
  if (!(overlap >= 0) || overlap >= 1) {
    throw Error("window_hop: overlap must lie in [0, 1), got " + std::to_string(overlap));
  }
  return std::max<std::int64_t>(
      1, std::llround(static_cast<Real>(window) * (Real(1) - overlap)));
}

std::vector<std::vector<Real>> extract_windows(const std::vector<Real>& samples,
                                               std::int64_t window, std::int64_t hop) {
  if (window < 1 || hop < 1) throw Error("extract_windows: window and hop must be >= 1");
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  std::vector<std::vector<Real>> out;
  if (n < window) {
    std::vector<Real> padded(static_cast<std::size_t>(window), Real(0));
    std::copy(samples.begin(), samples.end(), padded.begin());
    out.push_back(std::move(padded));
    return out;
  }
  std::int64_t last_start = -1;
  for (std::int64_t start = 0; start + window <= n; start += hop) {
    out.emplace_back(samples.begin() + start, samples.begin() + start + window);
    last_start = start;
  }
  if (last_start + window < n) {
    const std::int64_t start = n - window;  // right-aligned tail
    out.emplace_back(samples.begin() + start, samples.begin() + start + window);
  }
  return out;
}

Tensor3 to_tensor(const std::vector<Real>& mono) {
  Tensor3 t(1, 1, static_cast<std::int64_t>(mono.size()));
  std::copy(mono.begin(), mono.end(), t.values.begin());
  return t;
}

}  // namespace soundnet
