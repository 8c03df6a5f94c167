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

#include "soundnet/pool.hpp"

#include <string>

namespace soundnet {

std::int64_t maxpool1d_output_length(std::int64_t input_length, std::int64_t pool_size,
                                     std::int64_t stride) {
  return (input_length - pool_size) / stride + 1;
}

MaxPoolResult maxpool1d_forward(const Tensor3& input, std::int64_t pool_size,
                                std::int64_t stride) {
  if (pool_size < 1 || stride < 1) {
    throw ShapeError("maxpool1d: pool_size and stride must be >= 1 (got pool=" +
                     std::to_string(pool_size) + " stride=" + std::to_string(stride) + ")");
  }
  if (input.length < pool_size) {
    throw ShapeError("maxpool1d: input length " + std::to_string(input.length) +
                     " < pool size " + std::to_string(pool_size));
  }
  const std::int64_t l_out = maxpool1d_output_length(input.length, pool_size, stride);

  MaxPoolResult res;
  res.output = Tensor3(input.batch, input.channels, l_out);
  res.argmax.resize(static_cast<std::size_t>(res.output.numel()));
  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t c = 0; c < input.channels; ++c) {
      const Real* in_row = input.row(b, c);
      Real* out_row = res.output.row(b, c);
      std::int64_t* arg_row =
          res.argmax.data() + static_cast<std::size_t>((b * input.channels + c) * l_out);
      for (std::int64_t o = 0; o < l_out; ++o) {
        const std::int64_t start = o * stride;
        std::int64_t best = start;
        Real best_val = in_row[start];
        for (std::int64_t i = start + 1; i < start + pool_size; ++i) {
          if (in_row[i] > best_val) {  // strict: ties keep the lowest index
            best_val = in_row[i];
            best = i;
          }
        }
        out_row[o] = best_val;
        arg_row[o] = best;
      }
    }
  }
  return res;
}

Tensor3 maxpool1d_backward(const Tensor3& input, std::int64_t pool_size,
                           std::int64_t stride, const MaxPoolResult& fwd,
                           const Tensor3& grad_out) {
  const std::int64_t l_out = maxpool1d_output_length(input.length, pool_size, stride);
  if (grad_out.batch != input.batch || grad_out.channels != input.channels ||
      grad_out.length != l_out) {
    throw ShapeError("maxpool1d_backward: grad_out shape " + grad_out.shape_str() +
                     " does not match pooled output length " + std::to_string(l_out));
  }
  Tensor3 grad_in(input.batch, input.channels, input.length);
  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t c = 0; c < input.channels; ++c) {
      const Real* gout_row = grad_out.row(b, c);
      Real* gin_row = grad_in.row(b, c);
      const std::int64_t* arg_row =
          fwd.argmax.data() + static_cast<std::size_t>((b * input.channels + c) * l_out);
      for (std::int64_t o = 0; o < l_out; ++o) {
        gin_row[arg_row[o]] += gout_row[o];
      }
    }
  }
  return grad_in;
}

}  // namespace soundnet
