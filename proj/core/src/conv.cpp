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

#include "soundnet/conv.hpp"

#include <algorithm>
#include <string>

namespace soundnet {

namespace {

// Integer ceil/floor division for positive denominators and signed numerators.
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : a / b;
}
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

void check_geometry(const ConvParams& p) {
  if (p.kernel_size < 1 || p.out_channels < 1 || p.in_channels < 1) {
    throw ShapeError("conv: kernel_size, in_channels and out_channels must be >= 1 (got k=" +
                     std::to_string(p.kernel_size) + " in=" + std::to_string(p.in_channels) +
                     " out=" + std::to_string(p.out_channels) + ")");
  }
  if (p.stride < 1 || p.padding < 0) {
    throw ShapeError("conv: stride must be >= 1 and padding >= 0 (got stride=" +
                     std::to_string(p.stride) + " padding=" + std::to_string(p.padding) + ")");
  }
  if (static_cast<std::int64_t>(p.weights.size()) !=
      p.out_channels * p.in_channels * p.kernel_size) {
    throw ShapeError("conv: weights size " + std::to_string(p.weights.size()) +
                     " does not match (out=" + std::to_string(p.out_channels) +
                     ", in=" + std::to_string(p.in_channels) +
                     ", k=" + std::to_string(p.kernel_size) + ")");
  }
}

}  // namespace

void ConvParams::validate(bool transposed) const {
  check_geometry(*this);
  const std::int64_t want_bias = transposed ? in_channels : out_channels;
  if (static_cast<std::int64_t>(bias.size()) != want_bias) {
    throw ShapeError("conv: bias length " + std::to_string(bias.size()) +
                     " does not match " + (transposed ? "in_channels " : "out_channels ") +
                     std::to_string(want_bias));
  }
}

std::int64_t conv1d_output_length(std::int64_t input_length, std::int64_t kernel_size,
                                  std::int64_t stride, std::int64_t padding) {
  return floor_div(input_length + 2 * padding - kernel_size, stride) + 1;
}

std::int64_t transposed_conv1d_output_length(std::int64_t input_length,
                                             std::int64_t kernel_size,
                                             std::int64_t stride,
                                             std::int64_t padding) {
  return (input_length - 1) * stride - 2 * padding + kernel_size;
}

Tensor3 conv1d_forward(const Tensor3& input, const ConvParams& params) {
  params.validate(false);
  if (input.channels != params.in_channels) {
    throw ShapeError("conv1d_forward: input channels " + std::to_string(input.channels) +
                     " != conv in_channels " + std::to_string(params.in_channels));
  }
  const std::int64_t l_in = input.length;
  const std::int64_t l_out =
      conv1d_output_length(l_in, params.kernel_size, params.stride, params.padding);
  if (l_out < 1) {
    const std::int64_t min_len = std::max<std::int64_t>(1, params.kernel_size - 2 * params.padding);
    throw ShapeError("conv1d_forward: input too short, length " + std::to_string(l_in) +
                     " < minimum admissible length " + std::to_string(min_len));
  }

  Tensor3 out(input.batch, params.out_channels, l_out);
  const std::int64_t s = params.stride;
  const std::int64_t p = params.padding;
  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t oc = 0; oc < params.out_channels; ++oc) {
      Real* out_row = out.row(b, oc);
      const Real bias = params.bias[static_cast<std::size_t>(oc)];
      for (std::int64_t o = 0; o < l_out; ++o) out_row[o] = bias;
      for (std::int64_t ic = 0; ic < params.in_channels; ++ic) {
        const Real* in_row = input.row(b, ic);
        for (std::int64_t k = 0; k < params.kernel_size; ++k) {
          const Real w = params.w(oc, ic, k);
          if (w == Real(0)) continue;
          // Valid output positions: 0 <= o*s + k - p <= l_in - 1.
          const std::int64_t o_lo = std::max<std::int64_t>(0, ceil_div(p - k, s));
          const std::int64_t o_hi =
              std::min<std::int64_t>(l_out - 1, floor_div(l_in - 1 - k + p, s));
          const Real* in_base = in_row + (o_lo * s + k - p);
          for (std::int64_t o = o_lo; o <= o_hi; ++o) {
            out_row[o] += w * in_base[(o - o_lo) * s];
          }
        }
      }
    }
  }
  return out;
}

Tensor3 conv1d_backward(const Tensor3& input, const ConvParams& params,
                        const Tensor3& grad_out, ConvGrads* grads) {
  params.validate(false);
  if (input.channels != params.in_channels) {
    throw ShapeError("conv1d_backward: input channels " + std::to_string(input.channels) +
                     " != conv in_channels " + std::to_string(params.in_channels));
  }
  const std::int64_t l_in = input.length;
  const std::int64_t l_out =
      conv1d_output_length(l_in, params.kernel_size, params.stride, params.padding);
  if (grad_out.batch != input.batch || grad_out.channels != params.out_channels ||
      grad_out.length != l_out) {
    throw ShapeError("conv1d_backward: grad_out shape " + grad_out.shape_str() +
                     " does not match forward output (" + std::to_string(input.batch) +
                     ", " + std::to_string(params.out_channels) + ", " +
                     std::to_string(l_out) + ")");
  }

  const std::int64_t s = params.stride;
  const std::int64_t p = params.padding;
  Tensor3 grad_in(input.batch, input.channels, l_in);
  if (grads != nullptr) {
    grads->weights.assign(params.weights.size(), Real(0));
    grads->bias.assign(params.bias.size(), Real(0));
  }

  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t oc = 0; oc < params.out_channels; ++oc) {
      const Real* gout_row = grad_out.row(b, oc);
      if (grads != nullptr) {
        Real acc = 0;
        for (std::int64_t o = 0; o < l_out; ++o) acc += gout_row[o];
        grads->bias[static_cast<std::size_t>(oc)] += acc;
      }
      for (std::int64_t ic = 0; ic < params.in_channels; ++ic) {
        const Real* in_row = input.row(b, ic);
        Real* gin_row = grad_in.row(b, ic);
        for (std::int64_t k = 0; k < params.kernel_size; ++k) {
          const std::int64_t o_lo = std::max<std::int64_t>(0, ceil_div(p - k, s));
          const std::int64_t o_hi =
              std::min<std::int64_t>(l_out - 1, floor_div(l_in - 1 - k + p, s));
          if (o_lo > o_hi) continue;
          const std::int64_t base = o_lo * s + k - p;
          const Real w = params.w(oc, ic, k);
          Real wacc = 0;
          for (std::int64_t o = o_lo; o <= o_hi; ++o) {
            const std::int64_t i = base + (o - o_lo) * s;
            wacc += gout_row[o] * in_row[i];
            gin_row[i] += w * gout_row[o];
          }
          if (grads != nullptr) {
            grads->weights[static_cast<std::size_t>(
                (oc * params.in_channels + ic) * params.kernel_size + k)] += wacc;
          }
        }
      }
    }
  }
  return grad_in;
}

Tensor3 transposed_conv1d_forward(const Tensor3& input, const ConvParams& params) {
  params.validate(true);
  if (input.channels != params.out_channels) {
    throw ShapeError("transposed_conv1d_forward: input channels " +
                     std::to_string(input.channels) + " != conv out_channels " +
                     std::to_string(params.out_channels));
  }
  const std::int64_t l_in = input.length;
  const std::int64_t l_out = transposed_conv1d_output_length(
      l_in, params.kernel_size, params.stride, params.padding);
  if (l_out < 1) {
    throw ShapeError("transposed_conv1d_forward: output length " + std::to_string(l_out) +
                     " < 1 for input length " + std::to_string(l_in));
  }

  const std::int64_t s = params.stride;
  const std::int64_t p = params.padding;
  Tensor3 out(input.batch, params.in_channels, l_out);
  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t ic = 0; ic < params.in_channels; ++ic) {
      Real* out_row = out.row(b, ic);
      const Real bias = params.bias[static_cast<std::size_t>(ic)];
      for (std::int64_t j = 0; j < l_out; ++j) out_row[j] = bias;
      for (std::int64_t oc = 0; oc < params.out_channels; ++oc) {
        const Real* in_row = input.row(b, oc);
        for (std::int64_t k = 0; k < params.kernel_size; ++k) {
          const Real w = params.w(oc, ic, k);
          if (w == Real(0)) continue;
          // Scatter: out[o*s + k - p] += w * in[o] for positions in range.
          const std::int64_t o_lo = std::max<std::int64_t>(0, ceil_div(p - k, s));
          const std::int64_t o_hi =
              std::min<std::int64_t>(l_in - 1, floor_div(l_out - 1 - k + p, s));
          Real* out_base = out_row + (o_lo * s + k - p);
          for (std::int64_t o = o_lo; o <= o_hi; ++o) {
            out_base[(o - o_lo) * s] += w * in_row[o];
          }
        }
      }
    }
  }
  return out;
}

Tensor3 transposed_conv1d_backward(const Tensor3& input, const ConvParams& params,
                                   const Tensor3& grad_out, ConvGrads* grads) {
  params.validate(true);
  if (input.channels != params.out_channels) {
    throw ShapeError("transposed_conv1d_backward: input channels " +
                     std::to_string(input.channels) + " != conv out_channels " +
                     std::to_string(params.out_channels));
  }
  const std::int64_t l_in = input.length;
  const std::int64_t l_out = transposed_conv1d_output_length(
      l_in, params.kernel_size, params.stride, params.padding);
  if (grad_out.batch != input.batch || grad_out.channels != params.in_channels ||
      grad_out.length != l_out) {
    throw ShapeError("transposed_conv1d_backward: grad_out shape " + grad_out.shape_str() +
                     " does not match forward output (" + std::to_string(input.batch) +
                     ", " + std::to_string(params.in_channels) + ", " +
                     std::to_string(l_out) + ")");
  }

  const std::int64_t s = params.stride;
  const std::int64_t p = params.padding;
  Tensor3 grad_in(input.batch, input.channels, l_in);
  if (grads != nullptr) {
    grads->weights.assign(params.weights.size(), Real(0));
    grads->bias.assign(params.bias.size(), Real(0));
  }

  for (std::int64_t b = 0; b < input.batch; ++b) {
    for (std::int64_t ic = 0; ic < params.in_channels; ++ic) {
      const Real* gout_row = grad_out.row(b, ic);
      if (grads != nullptr) {
        Real acc = 0;
        for (std::int64_t j = 0; j < l_out; ++j) acc += gout_row[j];
        grads->bias[static_cast<std::size_t>(ic)] += acc;
      }
      for (std::int64_t oc = 0; oc < params.out_channels; ++oc) {
        const Real* in_row = input.row(b, oc);
        Real* gin_row = grad_in.row(b, oc);
        for (std::int64_t k = 0; k < params.kernel_size; ++k) {
          const std::int64_t o_lo = std::max<std::int64_t>(0, ceil_div(p - k, s));
          const std::int64_t o_hi =
              std::min<std::int64_t>(l_in - 1, floor_div(l_out - 1 - k + p, s));
          if (o_lo > o_hi) continue;
          const std::int64_t base = o_lo * s + k - p;
          const Real w = params.w(oc, ic, k);
          Real wacc = 0;
          for (std::int64_t o = o_lo; o <= o_hi; ++o) {
            const std::int64_t j = base + (o - o_lo) * s;
            wacc += in_row[o] * gout_row[j];
            gin_row[o] += w * gout_row[j];
          }
          if (grads != nullptr) {
            grads->weights[static_cast<std::size_t>(
                (oc * params.in_channels + ic) * params.kernel_size + k)] += wacc;
          }
        }
      }
    }
  }
  return grad_in;
}

}  // namespace soundnet
