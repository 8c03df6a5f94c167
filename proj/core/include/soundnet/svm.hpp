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

#ifndef SOUNDNET_SVM_HPP_
#define SOUNDNET_SVM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soundnet/features.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

inline constexpr std::uint32_t kSvmModelVersion = 1;

struct SvmTrainOptions {
  std::vector<Real> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  std::int64_t folds = 5;
  // Stop when the duality gap drops to gap_tolerance * max(1, |primal|).
  Real gap_tolerance = 1e-4;
  std::int64_t max_epochs = 1000;
  std::uint64_t seed = 1;
};

// One-vs-all linear SVM over standardized features ("SNDS" on disk, f64).
struct SvmModel {
  std::vector<std::string> classes;        // sorted label set
  std::int64_t dim = 0;
  Real cost = 1.0;                         // selected C
  std::vector<Real> mean;                  // standardization, fit on train
  std::vector<Real> scale;                 // 1 / stddev (floored)
  std::vector<std::vector<Real>> weights;  // per class, dim + 1 (bias last)

  // Per-class decision values for one raw feature vector.
  std::vector<Real> decision(const std::vector<Real>& x) const;
};

struct BinarySvmResult {
  std::vector<Real> w;  // same width as the input vectors
  std::int64_t epochs = 0;
  Real gap = 0;
};

// Dual coordinate descent for the L2-regularized L1-hinge binary SVM
//   min_w 1/2 ||w||^2 + (C / N) * sum_i max(0, 1 - y_i w.x_i),
// labels y in {+1, -1}. The per-sample cost C/N makes the solution
// invariant under duplicating the whole dataset. The bias, if wanted, must
// be an explicit constant feature in x.
BinarySvmResult svm_solve_binary(const std::vector<std::vector<Real>>& x,
                                 const std::vector<int>& y, Real cost, Real gap_tolerance,
                                 std::int64_t max_epochs, std::uint64_t seed);

// Trains one-vs-all classifiers with C chosen by stratified k-fold cross
// validation over the c_grid (ties prefer the smaller C), then refits on the
// full set. labels run parallel to features.vectors.
SvmModel svm_train(const FeatureSet& features, const std::vector<std::string>& labels,
                   const SvmTrainOptions& options);

struct ClipPrediction {
  std::string clip;
  std::string predicted;
  std::string actual;
};

struct SvmEvalResult {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  Real accuracy = 0;
  std::vector<ClipPrediction> predictions;
};

// Window-averaged evaluation: per-class decision values are averaged over
// every window of a clip, the argmax wins, and accuracy counts clips.
SvmEvalResult svm_eval(const SvmModel& model, const FeatureSet& features,
                       const std::map<std::string, std::string>& labels_by_clip);

void save_svm(const std::string& path, const SvmModel& model);
SvmModel load_svm(const std::string& path);

}  // namespace soundnet

#endif  // SOUNDNET_SVM_HPP_
