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

#ifndef SOUNDNET_TENSOR_HPP_
#define SOUNDNET_TENSOR_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "soundnet/error.hpp"

namespace soundnet {

// All math in this library runs in double precision; on-disk formats narrow
// to 32-bit floats where specified.
using Real = double;

// Dense (batch, channels, length) array, row-major in that order. This is
// the carrier for waveforms, activations and gradients alike.
struct Tensor3 {
  std::int64_t batch = 0;
  std::int64_t channels = 0;
  std::int64_t length = 0;
  std::vector<Real> values;

  Tensor3() = default;
  Tensor3(std::int64_t b, std::int64_t c, std::int64_t l)
      : batch(b), channels(c), length(l),
        values(static_cast<std::size_t>(b * c * l), Real(0)) {
    if (b < 0 || c < 0 || l < 0) {
      throw ShapeError("Tensor3: negative dimension (batch=" + std::to_string(b) +
                       " channels=" + std::to_string(c) +
                       " length=" + std::to_string(l) + ")");
    }
  }

  static Tensor3 zeros(std::int64_t b, std::int64_t c, std::int64_t l) {
    return Tensor3(b, c, l);
  }

  std::int64_t numel() const { return batch * channels * length; }

  Real& at(std::int64_t b, std::int64_t c, std::int64_t t) {
    return values[static_cast<std::size_t>((b * channels + c) * length + t)];
  }
  Real at(std::int64_t b, std::int64_t c, std::int64_t t) const {
    return values[static_cast<std::size_t>((b * channels + c) * length + t)];
  }

  // Pointer to the start of one (batch, channel) row of `length` values.
  Real* row(std::int64_t b, std::int64_t c) {
    return values.data() + static_cast<std::size_t>((b * channels + c) * length);
  }
  const Real* row(std::int64_t b, std::int64_t c) const {
    return values.data() + static_cast<std::size_t>((b * channels + c) * length);
  }

  bool same_shape(const Tensor3& o) const {
    return batch == o.batch && channels == o.channels && length == o.length;
  }

  std::string shape_str() const {
    return "(" + std::to_string(batch) + ", " + std::to_string(channels) +
           ", " + std::to_string(length) + ")";
  }

  bool all_finite() const {
    for (Real v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline void check_same_shape(const Tensor3& a, const Tensor3& b,
                             const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() +
                     " vs " + b.shape_str());
  }
}

}  // namespace soundnet

#endif  // SOUNDNET_TENSOR_HPP_
