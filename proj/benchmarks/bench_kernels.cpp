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
//
// Microbenchmarks for the kernels that dominate training time. Shapes mirror
// the first (widest) stages of the 8-layer network on one-second audio.

#include <random>

#include "benchmark/benchmark.h"
#include "soundnet/batchnorm.hpp"
#include "soundnet/conv.hpp"
#include "soundnet/loss.hpp"
#include "soundnet/network.hpp"
#include "soundnet/ops.hpp"
#include "soundnet/pool.hpp"

namespace soundnet {
namespace {

Tensor3 random_tensor(std::int64_t b, std::int64_t c, std::int64_t l, std::uint64_t seed) {
  Tensor3 t(b, c, l);
  std::mt19937_64 gen(seed);
  std::normal_distribution<Real> dist(0.0, 1.0);
  for (Real& v : t.values) v = dist(gen);
  return t;
}

ConvParams conv_params(std::int64_t out, std::int64_t in, std::int64_t kernel,
                       std::int64_t stride, std::int64_t padding, std::uint64_t seed) {
  ConvParams p;
  p.out_channels = out;
  p.in_channels = in;
  p.kernel_size = kernel;
  p.stride = stride;
  p.padding = padding;
  p.weights.resize(static_cast<std::size_t>(out * in * kernel));
  p.bias.assign(static_cast<std::size_t>(out), 0.01);
  std::mt19937_64 gen(seed);
  std::normal_distribution<Real> dist(0.0, 0.1);
  for (Real& v : p.weights) v = dist(gen);
  return p;
}

void BM_Conv1dForwardStem(benchmark::State& state) {
  // conv1 of the 8-layer network on one second of audio.
  const Tensor3 input = random_tensor(1, 1, 22050, 1);
  const ConvParams params = conv_params(16, 1, 64, 2, 32, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv1d_forward(input, params));
  }
}
BENCHMARK(BM_Conv1dForwardStem);

void BM_Conv1dForwardMid(benchmark::State& state) {
  // conv2-like shape: wide channels, shorter sequence.
  const Tensor3 input = random_tensor(1, 16, 1379, 3);
  const ConvParams params = conv_params(32, 16, 32, 2, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv1d_forward(input, params));
  }
}
BENCHMARK(BM_Conv1dForwardMid);

void BM_Conv1dBackward(benchmark::State& state) {
  const Tensor3 input = random_tensor(1, 16, 1379, 5);
  const ConvParams params = conv_params(32, 16, 32, 2, 16, 6);
  const Tensor3 output = conv1d_forward(input, params);
  const Tensor3 grad_out = random_tensor(output.batch, output.channels, output.length, 7);
  for (auto _ : state) {
    ConvGrads grads;
    benchmark::DoNotOptimize(conv1d_backward(input, params, grad_out, &grads));
  }
}
BENCHMARK(BM_Conv1dBackward);

void BM_TransposedConv1dForward(benchmark::State& state) {
  // Decoder-style upsampling: 16x stride from a short code. Transposed
  // layers store the adjoint-oriented block, so out_channels faces the
  // input and the bias spans in_channels.
  const Tensor3 input = random_tensor(1, 32, 128, 8);
  ConvParams params = conv_params(32, 16, 64, 16, 24, 9);
  params.bias.assign(static_cast<std::size_t>(params.in_channels), 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transposed_conv1d_forward(input, params));
  }
}
BENCHMARK(BM_TransposedConv1dForward);

void BM_MaxPoolForward(benchmark::State& state) {
  const Tensor3 input = random_tensor(1, 16, 110250, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(maxpool1d_forward(input, 8, 8));
  }
}
BENCHMARK(BM_MaxPoolForward);

void BM_BatchNormTrainForward(benchmark::State& state) {
  const Tensor3 input = random_tensor(4, 16, 13781, 11);
  BatchNormParams params;
  params.gamma.assign(16, 1.0);
  params.beta.assign(16, 0.0);
  params.running_mean.assign(16, 0.0);
  params.running_var.assign(16, 1.0);
  for (auto _ : state) {
    BatchNormCache cache;
    benchmark::DoNotOptimize(
        batchnorm_forward(input, params, BatchNormMode::kTrain, &cache));
  }
}
BENCHMARK(BM_BatchNormTrainForward);

void BM_DistillLossKl(benchmark::State& state) {
  // Batch of logits at the 1401-way output with a handful of timesteps.
  const Tensor3 logits = random_tensor(8, 1401, 4, 12);
  Tensor3 teacher(8, 1401, 4);
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<Real> dist(0.01, 1.0);
  const HeadSplit split;
  for (std::int64_t b = 0; b < 8; ++b) {
    for (std::int64_t t = 0; t < 4; ++t) {
      Real object_sum = 0;
      Real scene_sum = 0;
      for (std::int64_t c = 0; c < split.total(); ++c) {
        const Real v = dist(gen);
        teacher.at(b, c, t) = v;
        (c < split.object_classes ? object_sum : scene_sum) += v;
      }
      for (std::int64_t c = 0; c < split.total(); ++c) {
        teacher.at(b, c, t) /= c < split.object_classes ? object_sum : scene_sum;
      }
    }
  }
  for (auto _ : state) {
    Tensor3 grad;
    benchmark::DoNotOptimize(
        distill_loss(logits, teacher, split, DistillLoss::kKl, &grad));
  }
}
BENCHMARK(BM_DistillLossKl);

void BM_Soundnet8Forward(benchmark::State& state) {
  // Whole-network train-mode forward at the shortest admissible length.
  const NetworkConfig net = build_soundnet8();
  const Parameters params = init_params(net, 1);
  const Tensor3 input = random_tensor(1, 1, minimum_input_length(net), 14);
  ForwardOptions options;
  options.mode = BatchNormMode::kTrain;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(net, params, input, options));
  }
}
BENCHMARK(BM_Soundnet8Forward)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace soundnet

BENCHMARK_MAIN();
