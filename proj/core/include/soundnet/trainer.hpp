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

#ifndef SOUNDNET_TRAINER_HPP_
#define SOUNDNET_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "soundnet/network.hpp"
#include "soundnet/runconfig.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

struct DistillSample {
  std::string id;
  std::vector<Real> audio;  // preprocessed mono waveform
  Tensor3 teacher;          // (1, classes, timesteps)
};

struct DistillDataset {
  std::vector<DistillSample> samples;
  std::int64_t clip_length = 0;
};

// Decodes and preprocesses every manifest row and loads its teacher
// posterior. All clips must share one length, the network must emit
// split.total() channels, and each teacher's timestep count must match the
// network output length for that clip length.
DistillDataset load_distill_dataset(const std::string& manifest_path,
                                    const NetworkConfig& config, const HeadSplit& split);

struct ClipDataset {
  std::vector<std::pair<std::string, std::vector<Real>>> clips;  // (id, waveform)
  std::int64_t clip_length = 0;
};

// Audio-only loader (either manifest kind; the second column is ignored).
// Clips are cropped to the largest multiple of `length_multiple` so an
// autoencoder reproduces the input length exactly.
ClipDataset load_clip_dataset(const std::string& manifest_path,
                              std::int64_t length_multiple);

struct TrainProgress {
  std::int64_t iteration = 0;  // 1-based
  Real loss = 0;               // batch loss before this iteration's update
  double wall_ms = 0;
};

struct TrainHooks {
  // Called after every iteration (the metrics log is one line per
  // iteration; callers wanting a sparser cadence filter on the iteration).
  std::function<void(const TrainProgress&)> on_iteration;
  // Checked every iteration; returning true ends the run early.
  std::function<bool(const TrainProgress&)> should_stop;
  // Called every checkpoint_every iterations (when > 0).
  std::function<void(const TrainProgress&, const Parameters&)> on_checkpoint;
};

struct TrainResult {
  Real initial_loss = 0;  // batch loss at iteration 1
  Real final_loss = 0;
  std::int64_t iterations = 0;
};

// Adam on the teacher-matching loss (config.loss selects kl or l2).
// Minibatches are drawn uniformly with replacement using config.seed, so a
// run is deterministic for a fixed seed.
TrainResult train_distill(const NetworkConfig& network, Parameters& params,
                          const DistillDataset& data, const TrainConfig& config,
                          const TrainHooks& hooks = {});

// Adam on reconstruction MSE; inputs (and hence targets) are scaled by
// config.input_scale before the forward pass.
TrainResult train_autoencoder(const NetworkConfig& network, Parameters& params,
                              const ClipDataset& data, const TrainConfig& config,
                              const TrainHooks& hooks = {});

}  // namespace soundnet

#endif  // SOUNDNET_TRAINER_HPP_
