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

#ifndef SOUNDNET_RUNCONFIG_HPP_
#define SOUNDNET_RUNCONFIG_HPP_

#include <cstdint>
#include <string>

#include "soundnet/adam.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

// Training run settings. File form is `key = value` lines with '#'
// comments; every key below is accepted and anything else is rejected.
struct TrainConfig {
  Real learning_rate = 0.001;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
  std::int64_t batch_size = 64;
  std::int64_t max_iterations = 100000;
  std::uint64_t seed = 0;
  std::string loss = "kl";  // kl | l2
  std::int64_t checkpoint_every = 0;  // 0: checkpoint only at the end
  std::int64_t log_every = 100;       // stdout progress cadence
  // Autoencoder runs scale inputs by this before the forward pass, bringing
  // the +-256 waveform range back to roughly [-1, 1] for reconstruction.
  Real input_scale = 1.0 / 256.0;

  AdamConfig adam() const;
  void validate() const;
};

TrainConfig parse_run_config(const std::string& text, TrainConfig base = {});
TrainConfig load_run_config(const std::string& path, TrainConfig base = {});

}  // namespace soundnet

#endif  // SOUNDNET_RUNCONFIG_HPP_
