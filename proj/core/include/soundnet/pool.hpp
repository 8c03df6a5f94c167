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

#ifndef SOUNDNET_POOL_HPP_
#define SOUNDNET_POOL_HPP_

#include <cstdint>
#include <vector>

#include "soundnet/tensor.hpp"

namespace soundnet {

struct MaxPoolResult {
  Tensor3 output;
  // Argmax input position for every output element, same (b, c, o) layout
  // as output.values. Ties break toward the lowest index.
  std::vector<std::int64_t> argmax;
};

// Output length floor((L - pool_size) / stride) + 1; rejects inputs shorter
// than the pool window.
std::int64_t maxpool1d_output_length(std::int64_t input_length, std::int64_t pool_size,
                                     std::int64_t stride);

MaxPoolResult maxpool1d_forward(const Tensor3& input, std::int64_t pool_size,
                                std::int64_t stride);

// Routes each output gradient to its argmax input position.
Tensor3 maxpool1d_backward(const Tensor3& input, std::int64_t pool_size,
                           std::int64_t stride, const MaxPoolResult& fwd,
                           const Tensor3& grad_out);

}  // namespace soundnet

#endif  // SOUNDNET_POOL_HPP_
