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

#ifndef SOUNDNET_GRADCHECK_HPP_
#define SOUNDNET_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "soundnet/network.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

struct GradCheckOptions {
  BatchNormMode mode = BatchNormMode::kTrain;
  // Central-difference half width. Small enough that the O(step^2)
  // truncation term stays below tolerance even through batchnorm, whose
  // statistics make the loss strongly curved; large enough that 64-bit
  // round-off (~1e-16 / step) stays negligible.
  Real step = 1e-5;
  Real tolerance = 1e-4;  // max allowed relative error
  // Coordinates sampled per parameter block (all of them when the block is
  // smaller).
  std::int64_t samples_per_block = 8;
  std::uint64_t seed = 7;
};

struct GradCheckEntry {
  std::string block;  // "conv1.weight", "conv1_bn.gamma", ..., or "input"
  Real max_rel_error = 0;
  std::int64_t checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  Real max_rel_error = 0;
  Real tolerance = 0;
  bool pass = false;
};

// Compares backpropagated gradients against central finite differences of
// the scalar loss <r, forward(input)> for a fixed random projection r.
// Relative error uses denominator max(|analytic|, |numeric|, 1e-3); the
// floor keeps dead coordinates (both sides ~0) from amplifying rounding
// noise into spurious failures.
GradCheckReport gradient_check(const NetworkConfig& config, const Parameters& params,
                               const Tensor3& input, const GradCheckOptions& options);

}  // namespace soundnet

#endif  // SOUNDNET_GRADCHECK_HPP_
