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

#include "soundnet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "soundnet/binio.hpp"
#include "soundnet/error.hpp"

namespace soundnet {

namespace {

constexpr const char kMagic[] = "SNDS";

struct Standardizer {
  std::vector<Real> mean;
  std::vector<Real> scale;
};

Standardizer fit_standardizer(const std::vector<std::vector<Real>>& x,
                              const std::vector<std::size_t>& rows, std::size_t dim) {
  Standardizer s;
  s.mean.assign(dim, Real(0));
  s.scale.assign(dim, Real(1));
  const Real n = static_cast<Real>(rows.size());
  for (const std::size_t r : rows) {
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] += x[r][j];
  }
  for (std::size_t j = 0; j < dim; ++j) s.mean[j] /= n;
  std::vector<Real> var(dim, Real(0));
  for (const std::size_t r : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const Real d = x[r][j] - s.mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const Real sd = std::sqrt(var[j] / n);
    s.scale[j] = sd > Real(1e-10) ? Real(1) / sd : Real(1);
  }
  return s;
}

// Standardized rows with the constant bias feature appended.
std::vector<std::vector<Real>> standardize(const std::vector<std::vector<Real>>& x,
                                           const std::vector<std::size_t>& rows,
                                           const Standardizer& s) {
  std::vector<std::vector<Real>> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) {
    std::vector<Real> z(s.mean.size() + 1);
    for (std::size_t j = 0; j < s.mean.size(); ++j) {
      z[j] = (x[r][j] - s.mean[j]) * s.scale[j];
    }
    z.back() = Real(1);
    out.push_back(std::move(z));
  }
  return out;
}

Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

BinarySvmResult svm_solve_binary(const std::vector<std::vector<Real>>& x,
                                 const std::vector<int>& y, Real cost, Real gap_tolerance,
                                 std::int64_t max_epochs, std::uint64_t seed) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n) throw Error("svm_solve_binary: bad problem size");
  if (!(cost > 0)) throw Error("svm_solve_binary: cost must be > 0");
  const std::size_t dim = x[0].size();
  const Real c_i = cost / static_cast<Real>(n);  // per-sample cost

  std::vector<Real> q_ii(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != dim) throw ShapeError("svm_solve_binary: ragged feature rows");
    q_ii[i] = dot(x[i], x[i]);
  }

  BinarySvmResult result;
  result.w.assign(dim, Real(0));
  std::vector<Real> alpha(n, Real(0));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);

  for (std::int64_t epoch = 1; epoch <= max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const std::size_t i : order) {
      const Real g = static_cast<Real>(y[i]) * dot(result.w, x[i]) - Real(1);
      Real a_new;
      if (q_ii[i] > 0) {
        a_new = std::clamp(alpha[i] - g / q_ii[i], Real(0), c_i);
      } else {
        a_new = g < 0 ? c_i : Real(0);
      }
      const Real delta = a_new - alpha[i];
      if (delta != 0) {
        for (std::size_t j = 0; j < dim; ++j) {
          result.w[j] += delta * static_cast<Real>(y[i]) * x[i][j];
        }
        alpha[i] = a_new;
      }
    }

    const Real w_norm2 = dot(result.w, result.w);
    Real hinge = 0;
    for (std::size_t i = 0; i < n; ++i) {
      hinge += std::max(Real(0), Real(1) - static_cast<Real>(y[i]) * dot(result.w, x[i]));
    }
    const Real primal = Real(0.5) * w_norm2 + c_i * hinge;
    const Real dual =
        std::accumulate(alpha.begin(), alpha.end(), Real(0)) - Real(0.5) * w_norm2;
    result.gap = primal - dual;
    result.epochs = epoch;
    if (result.gap <= gap_tolerance * std::max(Real(1), std::abs(primal))) break;
  }
  return result;
}

namespace {

std::vector<std::vector<Real>> train_ova(const std::vector<std::vector<Real>>& z,
                                         const std::vector<std::string>& labels,
                                         const std::vector<std::size_t>& rows,
                                         const std::vector<std::string>& classes, Real cost,
                                         const SvmTrainOptions& options) {
  std::vector<std::vector<Real>> weights;
  weights.reserve(classes.size());
  for (const std::string& cls : classes) {
    std::vector<int> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      y[i] = labels[rows[i]] == cls ? 1 : -1;
    }
    weights.push_back(svm_solve_binary(z, y, cost, options.gap_tolerance,
                                       options.max_epochs, options.seed)
                          .w);
  }
  return weights;
}

// Round-robin fold assignment per class after a seeded shuffle.
std::vector<int> stratified_folds(const std::vector<std::string>& labels,
                                  const std::vector<std::string>& classes,
                                  std::int64_t folds, std::mt19937_64& rng) {
  std::vector<int> fold_of(labels.size(), 0);
  for (const std::string& cls : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold_of[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

}  // namespace

std::vector<Real> SvmModel::decision(const std::vector<Real>& x) const {
  if (static_cast<std::int64_t>(x.size()) != dim) {
    throw ShapeError("svm decision: feature dim " + std::to_string(x.size()) +
                     " != model dim " + std::to_string(dim));
  }
  std::vector<Real> scores(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Real acc = weights[c][static_cast<std::size_t>(dim)];  // bias
    for (std::int64_t j = 0; j < dim; ++j) {
      acc += weights[c][static_cast<std::size_t>(j)] * (x[static_cast<std::size_t>(j)] -
                                                        mean[static_cast<std::size_t>(j)]) *
             scale[static_cast<std::size_t>(j)];
    }
    scores[c] = acc;
  }
  return scores;
}

SvmModel svm_train(const FeatureSet& features, const std::vector<std::string>& labels,
                   const SvmTrainOptions& options) {
  const std::size_t n = features.vectors.size();
  if (n == 0 || labels.size() != n) {
    throw Error("svm_train: features and labels must be nonempty and parallel");
  }
  if (options.folds < 2) throw Error("svm_train: folds must be >= 2");
  if (options.c_grid.empty()) throw Error("svm_train: empty C grid");

  const std::set<std::string> unique(labels.begin(), labels.end());
  const std::vector<std::string> classes(unique.begin(), unique.end());
  const std::size_t dim = static_cast<std::size_t>(features.dim);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::mt19937_64 rng(options.seed);
  const std::vector<int> fold_of = stratified_folds(labels, classes, options.folds, rng);

  Real best_cost = options.c_grid.front();
  std::int64_t best_correct = -1;
  for (const Real cost : options.c_grid) {
    std::int64_t correct = 0;
    for (int fold = 0; fold < options.folds; ++fold) {
      std::vector<std::size_t> train_rows;
      std::vector<std::size_t> val_rows;
      for (std::size_t i = 0; i < n; ++i) {
        (fold_of[i] == fold ? val_rows : train_rows).push_back(i);
      }
      if (train_rows.empty() || val_rows.empty()) continue;
      const Standardizer s = fit_standardizer(features.vectors, train_rows, dim);
      const std::vector<std::vector<Real>> z =
          standardize(features.vectors, train_rows, s);
      const std::vector<std::vector<Real>> weights =
          train_ova(z, labels, train_rows, classes, cost, options);
      const std::vector<std::vector<Real>> zv = standardize(features.vectors, val_rows, s);
      for (std::size_t v = 0; v < val_rows.size(); ++v) {
        std::size_t best_class = 0;
        Real best_score = dot(weights[0], zv[v]);
        for (std::size_t c = 1; c < classes.size(); ++c) {
          const Real score = dot(weights[c], zv[v]);
          if (score > best_score) {
            best_score = score;
            best_class = c;
          }
        }
        if (classes[best_class] == labels[val_rows[v]]) ++correct;
      }
    }
    // Strict improvement keeps the smallest C on ties.
    if (correct > best_correct) {
      best_correct = correct;
      best_cost = cost;
    }
  }

  const Standardizer s = fit_standardizer(features.vectors, all, dim);
  const std::vector<std::vector<Real>> z = standardize(features.vectors, all, s);

  SvmModel model;
  model.classes = classes;
  model.dim = features.dim;
  model.cost = best_cost;
  model.mean = s.mean;
  model.scale = s.scale;
  model.weights = train_ova(z, labels, all, classes, best_cost, options);
  return model;
}

SvmEvalResult svm_eval(const SvmModel& model, const FeatureSet& features,
                       const std::map<std::string, std::string>& labels_by_clip) {
  if (features.dim != model.dim) {
    throw ShapeError("svm_eval: feature dim " + std::to_string(features.dim) +
                     " != model dim " + std::to_string(model.dim));
  }
  // Clip -> summed per-class scores over its windows, in first-seen order.
  std::vector<std::string> clip_order;
  std::map<std::string, std::vector<Real>> sums;
  std::map<std::string, std::int64_t> counts;
  for (std::size_t i = 0; i < features.ids.size(); ++i) {
    const std::string clip = clip_of(features.ids[i]);
    const std::vector<Real> scores = model.decision(features.vectors[i]);
    auto it = sums.find(clip);
    if (it == sums.end()) {
      clip_order.push_back(clip);
      sums.emplace(clip, scores);
      counts.emplace(clip, 1);
    } else {
      for (std::size_t c = 0; c < scores.size(); ++c) it->second[c] += scores[c];
      counts[clip] += 1;
    }
  }

  SvmEvalResult result;
  for (const std::string& clip : clip_order) {
    const auto label_it = labels_by_clip.find(clip);
    if (label_it == labels_by_clip.end()) {
      throw ConfigError("svm_eval: no label for clip \"" + clip + "\"");
    }
    const std::vector<Real>& score = sums[clip];
    std::size_t best = 0;
    for (std::size_t c = 1; c < score.size(); ++c) {
      if (score[c] > score[best]) best = c;
    }
    ClipPrediction pred;
    pred.clip = clip;
    pred.predicted = model.classes[best];
    pred.actual = label_it->second;
    if (pred.predicted == pred.actual) ++result.correct;
    ++result.total;
    result.predictions.push_back(std::move(pred));
  }
  result.accuracy =
      result.total == 0 ? Real(0) : static_cast<Real>(result.correct) / result.total;
  return result;
}

void save_svm(const std::string& path, const SvmModel& model) {
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kSvmModelVersion);
  w.u32(static_cast<std::uint32_t>(model.classes.size()));
  for (const std::string& cls : model.classes) w.str(cls);
  w.u32(static_cast<std::uint32_t>(model.dim));
  w.f64(model.cost);
  for (const Real v : model.mean) w.f64(v);
  for (const Real v : model.scale) w.f64(v);
  for (const std::vector<Real>& wc : model.weights) {
    if (wc.size() != static_cast<std::size_t>(model.dim) + 1) {
      throw ShapeError("save_svm: weight vector width mismatch");
    }
    for (const Real v : wc) w.f64(v);
  }
  w.write_file(path);
}

SvmModel load_svm(const std::string& path) {
  ByteReader r = ByteReader::open(path, kMagic);
  const std::uint32_t version = r.u32();
  if (version != kSvmModelVersion) {
    throw FormatError(FormatError::Code::kBadVersion,
                      path + ": model version " + std::to_string(version) + ", expected " +
                          std::to_string(kSvmModelVersion));
  }
  SvmModel model;
  const std::uint32_t n_classes = r.u32();
  if (n_classes < 1) throw FormatError(FormatError::Code::kCorrupt, path + ": no classes");
  for (std::uint32_t c = 0; c < n_classes; ++c) model.classes.push_back(r.str());
  model.dim = r.u32();
  if (model.dim < 1) throw FormatError(FormatError::Code::kCorrupt, path + ": zero dim");
  model.cost = r.f64();
  model.mean.resize(static_cast<std::size_t>(model.dim));
  for (Real& v : model.mean) v = r.f64();
  model.scale.resize(static_cast<std::size_t>(model.dim));
  for (Real& v : model.scale) v = r.f64();
  model.weights.resize(n_classes);
  for (std::vector<Real>& wc : model.weights) {
    wc.resize(static_cast<std::size_t>(model.dim) + 1);
    for (Real& v : wc) v = r.f64();
  }
  r.require_end();
  return model;
}

}  // namespace soundnet
