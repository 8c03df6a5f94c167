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

#include "soundnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "soundnet/adam.hpp"
#include "soundnet/audio.hpp"
#include "soundnet/error.hpp"
#include "soundnet/loss.hpp"
#include "soundnet/manifest.hpp"
#include "soundnet/posterior.hpp"
#include "soundnet/wav.hpp"

namespace soundnet {

DistillDataset load_distill_dataset(const std::string& manifest_path,
                                    const NetworkConfig& config, const HeadSplit& split) {
  if (config.output_channels() != split.total()) {
    throw ConfigError("network " + config.id + " emits " +
                      std::to_string(config.output_channels()) +
                      " channels; distillation needs " + std::to_string(split.total()));
  }
  const Manifest manifest = load_manifest(manifest_path);
  if (manifest.kind != ManifestKind::kDistill) {
    throw ConfigError(manifest_path + ": distillation needs an audio,posterior manifest");
  }

  DistillDataset data;
  std::int64_t expected_timesteps = 0;
  for (const ManifestEntry& entry : manifest.entries) {
    DistillSample sample;
    sample.id = entry.id;
    sample.audio = preprocess(decode_wav(entry.audio)).samples;
    const std::int64_t length = static_cast<std::int64_t>(sample.audio.size());
    if (data.samples.empty()) {
      data.clip_length = length;
      expected_timesteps = layer_output_lengths(config, length).back().second;
    } else if (length != data.clip_length) {
      throw ConfigError(entry.audio + ": clip length " + std::to_string(length) +
                        " differs from the first clip's " +
                        std::to_string(data.clip_length) +
                        "; training requires uniform clip lengths");
    }
    sample.teacher = posterior_for(load_posteriors(entry.second, split), entry.id,
                                   entry.second)
                         .probs;
    if (sample.teacher.length != expected_timesteps) {
      throw ConfigError(entry.second + ": " + std::to_string(sample.teacher.length) +
                        " teacher timesteps, but the network emits " +
                        std::to_string(expected_timesteps) + " for this clip length");
    }
    data.samples.push_back(std::move(sample));
  }
  return data;
}

ClipDataset load_clip_dataset(const std::string& manifest_path,
                              std::int64_t length_multiple) {
  if (length_multiple < 1) throw Error("load_clip_dataset: length_multiple must be >= 1");
  const Manifest manifest = load_manifest(manifest_path);
  ClipDataset data;
  for (const ManifestEntry& entry : manifest.entries) {
    std::vector<Real> audio = preprocess(decode_wav(entry.audio)).samples;
    const std::int64_t cropped =
        (static_cast<std::int64_t>(audio.size()) / length_multiple) * length_multiple;
    if (cropped < 1) {
      throw ConfigError(entry.audio + ": clip of " + std::to_string(audio.size()) +
                        " samples is shorter than the required multiple of " +
                        std::to_string(length_multiple));
    }
    audio.resize(static_cast<std::size_t>(cropped));
    if (data.clips.empty()) {
      data.clip_length = cropped;
    } else if (cropped != data.clip_length) {
      throw ConfigError(entry.audio + ": cropped length " + std::to_string(cropped) +
                        " differs from the first clip's " +
                        std::to_string(data.clip_length) +
                        "; training requires uniform clip lengths");
    }
    data.clips.emplace_back(entry.id, std::move(audio));
  }
  return data;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// One gradient step on an assembled batch; returns the batch loss before
// the update.
template <typename LossFn>
Real step_batch(const NetworkConfig& network, Parameters& params, const Tensor3& batch,
                const AdamConfig& adam, AdamState& state, LossFn&& loss_fn) {
  ForwardOptions options;
  options.mode = BatchNormMode::kTrain;
  options.want_trace = true;
  ForwardResult fwd = forward(network, params, batch, options);

  Tensor3 grad_out;
  const Real loss = loss_fn(fwd.output, &grad_out);

  ParamGrads grads;
  backward(network, params, batch, fwd.trace, grad_out, &grads);
  adam_step(network, params, grads, adam, state);
  apply_running_updates(params, fwd);
  return loss;
}

template <typename MakeBatch, typename LossFn>
TrainResult run_loop(const NetworkConfig& network, Parameters& params,
                     std::size_t dataset_size, const TrainConfig& config,
                     const TrainHooks& hooks, MakeBatch&& make_batch, LossFn&& loss_fn) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, dataset_size - 1);
  const AdamConfig adam = config.adam();
  AdamState state;
  const Clock::time_point start = Clock::now();

  TrainResult result;
  std::vector<std::size_t> indices(static_cast<std::size_t>(config.batch_size));
  for (std::int64_t iteration = 1; iteration <= config.max_iterations; ++iteration) {
    for (std::size_t& idx : indices) idx = pick(rng);
    const Tensor3 batch = make_batch(indices);
    const Real loss = step_batch(network, params, batch, adam, state, loss_fn);

    TrainProgress progress;
    progress.iteration = iteration;
    progress.loss = loss;
    progress.wall_ms = ms_since(start);
    if (iteration == 1) result.initial_loss = loss;
    result.final_loss = loss;
    result.iterations = iteration;

    if (hooks.on_iteration) hooks.on_iteration(progress);
    if (hooks.on_checkpoint && config.checkpoint_every > 0 &&
        iteration % config.checkpoint_every == 0) {
      hooks.on_checkpoint(progress, params);
    }
    if (hooks.should_stop && hooks.should_stop(progress)) break;
  }
  return result;
}

}  // namespace

TrainResult train_distill(const NetworkConfig& network, Parameters& params,
                          const DistillDataset& data, const TrainConfig& config,
                          const TrainHooks& hooks) {
  if (data.samples.empty()) throw Error("train_distill: empty dataset");
  const HeadSplit split;
  if (network.output_channels() != split.total()) {
    throw ConfigError("network " + network.id + " emits " +
                      std::to_string(network.output_channels()) +
                      " channels; distillation needs " + std::to_string(split.total()));
  }
  const DistillLoss loss_kind = parse_distill_loss(config.loss);
  const std::int64_t timesteps = data.samples.front().teacher.length;

  auto make_batch = [&](const std::vector<std::size_t>& indices) {
    Tensor3 batch(static_cast<std::int64_t>(indices.size()), 1, data.clip_length);
    for (std::size_t b = 0; b < indices.size(); ++b) {
      std::copy_n(data.samples[indices[b]].audio.begin(), data.clip_length,
                  batch.row(static_cast<std::int64_t>(b), 0));
    }
    return batch;
  };

  // The teacher tensor for the same sampled indices, rebuilt per iteration.
  std::vector<std::size_t> current;
  auto make_batch_recording = [&](const std::vector<std::size_t>& indices) {
    current = indices;
    return make_batch(indices);
  };
  auto loss_fn = [&](const Tensor3& logits, Tensor3* grad) {
    Tensor3 teacher(static_cast<std::int64_t>(current.size()), split.total(), timesteps);
    for (std::size_t b = 0; b < current.size(); ++b) {
      const Tensor3& t = data.samples[current[b]].teacher;
      for (std::int64_t c = 0; c < split.total(); ++c) {
        std::copy_n(t.row(0, c), timesteps, teacher.row(static_cast<std::int64_t>(b), c));
      }
    }
    return distill_loss(logits, teacher, split, loss_kind, grad);
  };

  return run_loop(network, params, data.samples.size(), config, hooks,
                  make_batch_recording, loss_fn);
}

TrainResult train_autoencoder(const NetworkConfig& network, Parameters& params,
                              const ClipDataset& data, const TrainConfig& config,
                              const TrainHooks& hooks) {
  if (data.clips.empty()) throw Error("train_autoencoder: empty dataset");
  if (network.output_channels() != network.input_channels) {
    throw ConfigError("network " + network.id +
                      " is not an autoencoder (output channels != input channels)");
  }

  Tensor3 last_batch;
  auto make_batch = [&](const std::vector<std::size_t>& indices) {
    Tensor3 batch(static_cast<std::int64_t>(indices.size()), 1, data.clip_length);
    for (std::size_t b = 0; b < indices.size(); ++b) {
      const std::vector<Real>& clip = data.clips[indices[b]].second;
      Real* row = batch.row(static_cast<std::int64_t>(b), 0);
      for (std::int64_t t = 0; t < data.clip_length; ++t) {
        row[t] = clip[static_cast<std::size_t>(t)] * config.input_scale;
      }
    }
    last_batch = batch;
    return batch;
  };
  auto loss_fn = [&](const Tensor3& output, Tensor3* grad) {
    return reconstruction_mse(output, last_batch, grad);
  };

  return run_loop(network, params, data.clips.size(), config, hooks, make_batch, loss_fn);
}

}  // namespace soundnet
