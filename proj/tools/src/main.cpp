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
// soundnet command line tool.
//
// Subcommands: train, extract, svm train, svm eval, gradcheck. Exit codes:
// 0 success, 2 for configuration / file / format problems (and command line
// misuse), 1 for internal errors or a failing gradient check.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "soundnet/audio.hpp"
#include "soundnet/checkpoint.hpp"
#include "soundnet/error.hpp"
#include "soundnet/features.hpp"
#include "soundnet/gradcheck.hpp"
#include "soundnet/manifest.hpp"
#include "soundnet/network.hpp"
#include "soundnet/posterior.hpp"
#include "soundnet/runconfig.hpp"
#include "soundnet/svm.hpp"
#include "soundnet/tensor.hpp"
#include "soundnet/trainer.hpp"
#include "soundnet/wav.hpp"

namespace soundnet {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config_path;
  std::string manifest_path;
  std::string arch = "soundnet8";
  std::string checkpoint_path = "checkpoint.sndc";
  std::string metrics_path;  // default: checkpoint path with .metrics.tsv
  std::string loss_override;
  std::int64_t seed_override = -1;
};

std::string default_metrics_path(const std::string& checkpoint_path) {
  std::filesystem::path p(checkpoint_path);
  p.replace_extension(".metrics.tsv");
  return p.string();
}

int cmd_train(const TrainArgs& args) {
  TrainConfig config;
  if (!args.config_path.empty()) config = load_run_config(args.config_path);
  if (!args.loss_override.empty()) config.loss = args.loss_override;
  if (args.seed_override >= 0) config.seed = static_cast<std::uint64_t>(args.seed_override);
  config.validate();

  const NetworkConfig network = network_for_id(args.arch);
  const bool autoencoder = network.id.rfind("autoencoder", 0) == 0;

  // Run header: settings echoed up front so a log identifies its run even
  // when it is cut short.
  std::printf("soundnet train\n");
  std::printf("network=%s\n", network_id(network).c_str());
  std::printf("loss=%s\n", autoencoder ? "mse" : config.loss.c_str());
  std::printf("learning_rate=%g\n", config.learning_rate);
  std::printf("batch_size=%" PRId64 "\n", config.batch_size);
  std::printf("max_iterations=%" PRId64 "\n", config.max_iterations);
  std::printf("seed=%" PRIu64 "\n", config.seed);
  std::fflush(stdout);

  const std::string metrics_path =
      args.metrics_path.empty() ? default_metrics_path(args.checkpoint_path)
                                : args.metrics_path;
  std::ofstream metrics(metrics_path, std::ios::trunc);
  if (!metrics) throw IoError("cannot open " + metrics_path + " for writing");
  metrics << "iteration\twall_ms\tloss\n";

  Parameters params = init_params(network, config.seed);

  TrainHooks hooks;
  hooks.on_iteration = [&](const TrainProgress& p) {
    char line[96];
    std::snprintf(line, sizeof line, "%" PRId64 "\t%.3f\t%.17g\n", p.iteration, p.wall_ms,
                  static_cast<double>(p.loss));
    metrics << line;
    if (p.iteration == 1 || p.iteration == config.max_iterations ||
        p.iteration % config.log_every == 0) {
      std::printf("iter %" PRId64 "/%" PRId64 " loss %.6g\n", p.iteration,
                  config.max_iterations, static_cast<double>(p.loss));
      std::fflush(stdout);
    }
  };
  hooks.on_checkpoint = [&](const TrainProgress& p, const Parameters& snapshot) {
    save_checkpoint(args.checkpoint_path, network, snapshot,
                    static_cast<std::uint64_t>(p.iteration), static_cast<double>(p.loss));
  };

  TrainResult result;
  if (autoencoder) {
    const ClipDataset data = load_clip_dataset(args.manifest_path, kAutoencoderLengthMultiple);
    std::printf("clips=%zu clip_length=%" PRId64 "\n", data.clips.size(), data.clip_length);
    result = train_autoencoder(network, params, data, config, hooks);
  } else {
    const DistillDataset data = load_distill_dataset(args.manifest_path, network, HeadSplit{});
    std::printf("clips=%zu clip_length=%" PRId64 "\n", data.samples.size(), data.clip_length);
    result = train_distill(network, params, data, config, hooks);
  }

  save_checkpoint(args.checkpoint_path, network, params,
                  static_cast<std::uint64_t>(result.iterations),
                  static_cast<double>(result.final_loss));
  metrics.flush();
  if (!metrics) throw IoError("failed writing " + metrics_path);
  std::printf("done: %" PRId64 " iterations, loss %.6g -> %.6g\n", result.iterations,
              static_cast<double>(result.initial_loss),
              static_cast<double>(result.final_loss));
  std::printf("checkpoint=%s\n", args.checkpoint_path.c_str());
  std::printf("metrics=%s\n", metrics_path.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string checkpoint_path;
  std::string layer;
  std::string output_path = "features.sndf";
  std::string manifest_path;
  std::vector<std::string> audio_paths;
  double window_seconds = 1.0;
  double overlap = 0.5;
  bool mean_over_time = false;
};

int cmd_extract(const ExtractArgs& args) {
  const Checkpoint ck = load_checkpoint(args.checkpoint_path);
  const NetworkConfig network = network_for_id(ck.network_id);
  if (std::find(network.taps.begin(), network.taps.end(), args.layer) ==
      network.taps.end()) {
    throw ConfigError("unknown layer \"" + args.layer + "\"; valid taps: " +
                      join(network.taps, ", "));
  }

  std::vector<std::pair<std::string, std::string>> inputs;  // (clip id, path)
  if (!args.manifest_path.empty()) {
    const Manifest manifest = load_manifest(args.manifest_path);
    for (const ManifestEntry& entry : manifest.entries) {
      inputs.emplace_back(entry.id, entry.audio);
    }
  }
  for (const std::string& path : args.audio_paths) inputs.emplace_back(path, path);
  if (inputs.empty()) {
    throw ConfigError("no audio inputs: pass WAV paths or --manifest");
  }

  std::vector<std::pair<std::string, std::vector<Real>>> clips;
  for (const auto& [id, path] : inputs) {
    try {
      Waveform wave = preprocess(decode_wav(path));
      clips.emplace_back(id, std::move(wave.samples));
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping %s: %s\n", path.c_str(), e.what());
    }
  }
  if (clips.empty()) {
    throw IoError("no readable audio inputs (" + std::to_string(inputs.size()) +
                  " failed)");
  }

  const FeatureSet features =
      extract_features(network, ck.params, clips, args.layer,
                       static_cast<Real>(args.window_seconds),
                       static_cast<Real>(args.overlap), args.mean_over_time);
  save_features(args.output_path, features);
  std::printf("wrote %zu windows from %zu clips (layer=%s dim=%" PRId64 ") to %s\n",
              features.ids.size(), clips.size(), features.layer.c_str(), features.dim,
              args.output_path.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// svm train / svm eval

FeatureSet load_feature_dumps(const std::vector<std::string>& paths) {
  FeatureSet merged = load_features(paths.front());
  for (std::size_t i = 1; i < paths.size(); ++i) {
    FeatureSet next = load_features(paths[i]);
    if (next.layer != merged.layer || next.dim != merged.dim) {
      throw ConfigError("feature dump " + paths[i] + " (layer=" + next.layer + " dim=" +
                        std::to_string(next.dim) + ") does not match " + paths.front() +
                        " (layer=" + merged.layer + " dim=" + std::to_string(merged.dim) +
                        ")");
    }
    merged.ids.insert(merged.ids.end(), std::make_move_iterator(next.ids.begin()),
                      std::make_move_iterator(next.ids.end()));
    merged.vectors.insert(merged.vectors.end(),
                          std::make_move_iterator(next.vectors.begin()),
                          std::make_move_iterator(next.vectors.end()));
  }
  return merged;
}

std::map<std::string, std::string> labels_from_manifest(const std::string& path) {
  const Manifest manifest = load_manifest(path);
  if (manifest.kind != ManifestKind::kLabeled) {
    throw ConfigError(path + ": expected a labeled manifest (audio,label header)");
  }
  std::map<std::string, std::string> labels;
  for (const ManifestEntry& entry : manifest.entries) labels[entry.id] = entry.second;
  return labels;
}

struct SvmTrainArgs {
  std::vector<std::string> feature_paths;
  std::string manifest_path;
  std::string model_path = "svm.snds";
  std::int64_t folds = 5;
  std::int64_t seed = 1;
};

int cmd_svm_train(const SvmTrainArgs& args) {
  const FeatureSet features = load_feature_dumps(args.feature_paths);
  const std::map<std::string, std::string> labels = labels_from_manifest(args.manifest_path);

  std::vector<std::string> window_labels;
  window_labels.reserve(features.ids.size());
  for (const std::string& id : features.ids) {
    const auto it = labels.find(clip_of(id));
    if (it == labels.end()) {
      throw ConfigError("no label for clip \"" + clip_of(id) + "\" in " +
                        args.manifest_path);
    }
    window_labels.push_back(it->second);
  }

  SvmTrainOptions options;
  options.folds = args.folds;
  options.seed = static_cast<std::uint64_t>(args.seed);
  const SvmModel model = svm_train(features, window_labels, options);
  save_svm(args.model_path, model);
  std::printf("trained %zu-class model on %zu windows (dim=%" PRId64 ", C=%g)\n",
              model.classes.size(), features.ids.size(), model.dim,
              static_cast<double>(model.cost));
  std::printf("model=%s\n", args.model_path.c_str());
  return kExitOk;
}

struct SvmEvalArgs {
  std::vector<std::string> feature_paths;
  std::string manifest_path;
  std::string model_path;
};

int cmd_svm_eval(const SvmEvalArgs& args) {
  const SvmModel model = load_svm(args.model_path);
  const FeatureSet features = load_feature_dumps(args.feature_paths);
  const std::map<std::string, std::string> labels = labels_from_manifest(args.manifest_path);
  const SvmEvalResult result = svm_eval(model, features, labels);

  // Row/column label set: model classes plus any extra labels in the test
  // manifest, so every clip lands in some confusion row.
  std::set<std::string> label_set(model.classes.begin(), model.classes.end());
  for (const ClipPrediction& p : result.predictions) label_set.insert(p.actual);
  const std::vector<std::string> rows(label_set.begin(), label_set.end());

  std::map<std::string, std::map<std::string, std::int64_t>> confusion;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_class;  // correct, total
  for (const ClipPrediction& p : result.predictions) {
    ++confusion[p.actual][p.predicted];
    auto& [correct, total] = per_class[p.actual];
    ++total;
    if (p.predicted == p.actual) ++correct;
  }

  std::printf("accuracy=%.4f (%" PRId64 "/%" PRId64 ")\n",
              static_cast<double>(result.accuracy), result.correct, result.total);
  std::printf("class,correct,total,accuracy\n");
  for (const std::string& label : rows) {
    const auto [correct, total] = per_class[label];
    std::printf("%s,%" PRId64 ",%" PRId64 ",%.4f\n", label.c_str(), correct, total,
                total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0);
  }
  std::printf("confusion,%s\n", join(rows, ",").c_str());
  for (const std::string& actual : rows) {
    std::printf("%s", actual.c_str());
    for (const std::string& predicted : rows) {
      std::printf(",%" PRId64 "", confusion[actual][predicted]);
    }
    std::printf("\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradCheckArgs {
  std::string arch;  // empty: built-in toy network
  std::int64_t cases = 5;
  std::int64_t samples = 8;
  std::uint64_t seed = 7;
  double step = GradCheckOptions{}.step;
};

// Small network touching every differentiable kernel: two conv blocks with
// batchnorm + relu, a max-pool between them, and a transposed conv head.
constexpr const char kToyArch[] =
    "conv name=conv1 out=4 kernel=8 stride=2 pad=3 bn relu;"
    "pool name=pool1 size=2 stride=2;"
    "conv name=conv2 out=6 kernel=4 stride=2 pad=1 bn relu;"
    "tconv name=up1 out=3 kernel=4 stride=2 pad=1";

// Smallest power-of-two multiple of `start` that survives a train-mode
// forward pass. The shape-law minimum can leave a batchnorm with a single
// spatial point, which train mode rejects, so probe instead of assuming.
std::int64_t train_safe_length(const NetworkConfig& network, const Parameters& params,
                               std::int64_t start) {
  ForwardOptions options;
  options.mode = BatchNormMode::kTrain;
  for (std::int64_t length = start; length <= (std::int64_t{1} << 22); length *= 2) {
    try {
      forward(network, params, Tensor3(1, network.input_channels, length), options);
      return length;
    } catch (const Error&) {
    }
  }
  throw Error("gradcheck: no train-safe input length found");
}

int cmd_gradcheck(const GradCheckArgs& args) {
  const NetworkConfig network =
      args.arch.empty() ? network_for_id("custom:" + std::string(kToyArch))
                        : network_for_id(args.arch);
  const std::int64_t min_length =
      train_safe_length(network, init_params(network, args.seed, 0.5),
                        minimum_input_length(network));

  GradCheckOptions options;
  options.samples_per_block = args.samples;
  options.step = static_cast<Real>(args.step);

  // Aggregate per-block maxima over several randomized (params, input)
  // cases. Weights are drawn wider than the training init so gradients sit
  // well above the relative-error floor.
  std::map<std::string, GradCheckEntry> worst;
  Real max_rel_error = 0;
  for (std::int64_t k = 0; k < args.cases; ++k) {
    const Parameters params = init_params(network, args.seed + static_cast<std::uint64_t>(k),
                                          0.5);
    const std::int64_t length = min_length + 3 + 2 * k;
    Tensor3 input(1, network.input_channels, length);
    std::mt19937_64 rng(args.seed * 1000003 + static_cast<std::uint64_t>(k));
    std::normal_distribution<Real> dist(0.0, 1.0);
    for (Real& v : input.values) v = dist(rng);
    options.seed = args.seed + 17 * static_cast<std::uint64_t>(k);

    const GradCheckReport report = gradient_check(network, params, input, options);
    for (const GradCheckEntry& entry : report.entries) {
      GradCheckEntry& agg = worst[entry.block];
      agg.block = entry.block;
      agg.max_rel_error = std::max(agg.max_rel_error, entry.max_rel_error);
      agg.checked += entry.checked;
    }
    max_rel_error = std::max(max_rel_error, report.max_rel_error);
  }

  std::printf("gradcheck network=%s cases=%" PRId64 " input>=%" PRId64 "\n",
              network.id.c_str(), args.cases, min_length);
  std::printf("block,max_rel_error,coords_checked\n");
  for (const auto& [block, entry] : worst) {
    std::printf("%s,%.3e,%" PRId64 "\n", block.c_str(),
                static_cast<double>(entry.max_rel_error), entry.checked);
  }
  const bool pass = max_rel_error <= GradCheckOptions{}.tolerance;
  std::printf("max_rel_error=%.3e tolerance=%.0e %s\n",
              static_cast<double>(max_rel_error),
              static_cast<double>(GradCheckOptions{}.tolerance), pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitInternal;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"SoundNet-style 1-D convolutional audio networks"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a network from a manifest");
  train->add_option("--config", train_args.config_path, "key=value run configuration file");
  train->add_option("--manifest", train_args.manifest_path, "audio,posterior or audio,label CSV")
      ->required();
  train->add_option("--arch", train_args.arch,
                    "soundnet8 | soundnet5 | autoencoder4 | custom:<layers>")
      ->capture_default_str();
  train->add_option("--checkpoint", train_args.checkpoint_path, "output checkpoint path")
      ->capture_default_str();
  train->add_option("--metrics", train_args.metrics_path,
                    "metrics log path (default: checkpoint with .metrics.tsv)");
  train->add_option("--loss", train_args.loss_override, "override the distillation loss")
      ->check(CLI::IsMember({"kl", "l2"}));
  train->add_option("--seed", train_args.seed_override, "override the run seed");

  ExtractArgs extract_args;
  CLI::App* extract = app.add_subcommand("extract", "Extract features from audio windows");
  extract->add_option("--checkpoint", extract_args.checkpoint_path, "trained checkpoint")
      ->required();
  extract->add_option("--layer", extract_args.layer, "network tap to read features from")
      ->required();
  extract->add_option("--output,-o", extract_args.output_path, "feature dump path")
      ->capture_default_str();
  extract->add_option("--manifest", extract_args.manifest_path,
                      "take audio paths (and clip ids) from a manifest");
  extract->add_option("--window-seconds", extract_args.window_seconds,
                      "window length in seconds")
      ->capture_default_str();
  extract->add_option("--overlap", extract_args.overlap, "fractional window overlap [0,1)")
      ->capture_default_str();
  extract->add_flag("--mean-over-time", extract_args.mean_over_time,
                    "average activations over time (one value per channel)");
  extract->add_option("audio", extract_args.audio_paths, "WAV files");

  CLI::App* svm = app.add_subcommand("svm", "One-vs-all linear SVM over features");
  svm->require_subcommand(1);

  SvmTrainArgs svm_train_args;
  CLI::App* svm_train_cmd = svm->add_subcommand("train", "Fit an SVM on labeled features");
  svm_train_cmd->add_option("--features", svm_train_args.feature_paths, "feature dump(s)")
      ->required();
  svm_train_cmd->add_option("--manifest", svm_train_args.manifest_path,
                            "audio,label CSV supplying clip labels")
      ->required();
  svm_train_cmd->add_option("--model", svm_train_args.model_path, "output model path")
      ->capture_default_str();
  svm_train_cmd->add_option("--folds", svm_train_args.folds, "cross-validation folds")
      ->capture_default_str();
  svm_train_cmd->add_option("--seed", svm_train_args.seed, "shuffling seed")
      ->capture_default_str();

  SvmEvalArgs svm_eval_args;
  CLI::App* svm_eval_cmd = svm->add_subcommand("eval", "Evaluate an SVM on labeled features");
  svm_eval_cmd->add_option("--features", svm_eval_args.feature_paths, "feature dump(s)")
      ->required();
  svm_eval_cmd->add_option("--manifest", svm_eval_args.manifest_path,
                           "audio,label CSV supplying clip labels")
      ->required();
  svm_eval_cmd->add_option("--model", svm_eval_args.model_path, "trained model")->required();

  GradCheckArgs gradcheck_args;
  CLI::App* gradcheck = app.add_subcommand("gradcheck",
                                           "Check gradients against finite differences");
  gradcheck->add_option("--arch", gradcheck_args.arch,
                        "network to check (default: built-in toy network)");
  gradcheck->add_option("--cases", gradcheck_args.cases, "randomized cases to run")
      ->capture_default_str();
  gradcheck->add_option("--samples", gradcheck_args.samples, "coordinates per block")
      ->capture_default_str();
  gradcheck->add_option("--seed", gradcheck_args.seed, "base seed")->capture_default_str();
  gradcheck->add_option("--step", gradcheck_args.step, "finite-difference half width")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (extract->parsed()) return cmd_extract(extract_args);
    if (svm->parsed() && svm_train_cmd->parsed()) return cmd_svm_train(svm_train_args);
    if (svm->parsed() && svm_eval_cmd->parsed()) return cmd_svm_eval(svm_eval_args);
    if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace soundnet

int main(int argc, char** argv) { return soundnet::run(argc, argv); }
