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

#ifndef SOUNDNET_CONV_HPP_
#define SOUNDNET_CONV_HPP_

#include <cstdint>
#include <vector>

#include "soundnet/tensor.hpp"

namespace soundnet {

// Weights and geometry for a 1-D convolution. The convolution is a
// cross-correlation (no kernel flip), with zero padding.
//
// weights is (out_channels, in_channels, kernel_size), row-major.
//
// The same struct drives transposed (fractionally strided) convolutions,
// which are the adjoint map: they consume out_channels and produce
// in_channels. For that use the bias is per transposed-output channel,
// i.e. it has length in_channels instead of out_channels.
struct ConvParams {
  std::int64_t out_channels = 0;
  std::int64_t in_channels = 0;
  std::int64_t kernel_size = 0;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  std::vector<Real> weights;
  std::vector<Real> bias;

  Real& w(std::int64_t oc, std::int64_t ic, std::int64_t k) {
    return weights[static_cast<std::size_t>((oc * in_channels + ic) * kernel_size + k)];
  }
  Real w(std::int64_t oc, std::int64_t ic, std::int64_t k) const {
    return weights[static_cast<std::size_t>((oc * in_channels + ic) * kernel_size + k)];
  }

  // Throws ShapeError when the fields are inconsistent. `transposed` selects
  // which channel count the bias must match.
  void validate(bool transposed = false) const;
};

// Gradients of a conv layer with respect to its parameters.
struct ConvGrads {
  std::vector<Real> weights;  // same layout as ConvParams::weights
  std::vector<Real> bias;
};

// Output length of a strided convolution: floor((L + 2p - k) / s) + 1.
// Negative results are returned as computed; callers decide whether < 1 is
// an error.
std::int64_t conv1d_output_length(std::int64_t input_length, std::int64_t kernel_size,
                                  std::int64_t stride, std::int64_t padding);

// Output length of a transposed convolution: (L - 1) * s - 2p + k.
std::int64_t transposed_conv1d_output_length(std::int64_t input_length,
                                             std::int64_t kernel_size,
                                             std::int64_t stride,
                                             std::int64_t padding);

// out[b][oc][o] = bias[oc] + sum_{ic,k} w[oc][ic][k] * in[b][ic][o*s + k - p],
// out-of-range input positions reading as zero.
Tensor3 conv1d_forward(const Tensor3& input, const ConvParams& params);

// Exact analytic gradients of conv1d_forward. grad_out must have the
// forward output's shape; grad_input comes back with input's shape.
Tensor3 conv1d_backward(const Tensor3& input, const ConvParams& params,
                        const Tensor3& grad_out, ConvGrads* grads);

// Adjoint of conv1d_forward with the same params: maps out_channels ->
// in_channels and upsamples by the stride. Bias (length in_channels) is
// added to the output.
Tensor3 transposed_conv1d_forward(const Tensor3& input, const ConvParams& params);

Tensor3 transposed_conv1d_backward(const Tensor3& input, const ConvParams& params,
                                   const Tensor3& grad_out, ConvGrads* grads);

}  // namespace soundnet

#endif  // SOUNDNET_CONV_HPP_
