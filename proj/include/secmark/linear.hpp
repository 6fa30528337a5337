// Copyright 2026 Secmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/rng.hpp"
#include "secmark/sparse.hpp"

namespace secmark {

enum class LinearKind { LogisticRegression, Svm };

struct LogRegConfig {
  double l2 = 0.1;
  double lr = 0.1;
  int epochs = 100;
  int batch = 64;
  uint64_t seed = 42;
};

struct SvmConfig {
  double c = 0.1;  // inverse regularization, lambda = 1 / (c * n)
  int epochs = 100;
  uint64_t seed = 42;
};

// Six-way linear scorer: weights are L rows of (D weights + bias).
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(LinearKind kind, int dims)
      : kind_(kind), dims_(dims),
        weights_(static_cast<size_t>(kLabelCount) * (dims + 1), 0.0) {}

  double score(int label, const SparseVec& x) const {
    const double* row = &weights_[static_cast<size_t>(label) * (dims_ + 1)];
    check_dims(x);
    return x.dot_dense(row) + row[dims_];
  }

  std::vector<double> scores(const SparseVec& x) const {
    std::vector<double> out(kLabelCount);
    for (int y = 0; y < kLabelCount; ++y) out[y] = score(y, x);
    return out;
  }

  // Argmax with ties going to the lower enum value.
  SectionLabel predict(const SparseVec& x) const {
    const std::vector<double> s = scores(x);
    int best = 0;
    for (int y = 1; y < kLabelCount; ++y)
      if (s[y] > s[best]) best = y;
    return static_cast<SectionLabel>(best);
  }

  std::vector<double> probabilities(const SparseVec& x) const {
    std::vector<double> s = scores(x);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& v : s) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : s) v /= z;
    return s;
  }

  LinearKind kind() const { return kind_; }
  int dims() const { return dims_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>* mutable_weights() { return &weights_; }

  double* row(int label) {
    return &weights_[static_cast<size_t>(label) * (dims_ + 1)];
  }
  const double* row(int label) const {
    return &weights_[static_cast<size_t>(label) * (dims_ + 1)];
  }

  double weight_norm() const {
    double s = 0.0;
    for (double w : weights_) s += w * w;
    return std::sqrt(s);
  }

 private:
  void check_dims(const SparseVec& x) const {
    if (!x.entries().empty() && x.entries().back().first >= dims_)
      throw DataError("feature index " +
                      std::to_string(x.entries().back().first) +
                      " exceeds model dimension " + std::to_string(dims_));
  }

  LinearKind kind_ = LinearKind::LogisticRegression;
  int dims_ = 0;
  std::vector<double> weights_;
};

// Multinomial softmax trained by mini-batch gradient descent on
// cross-entropy with L2 on non-bias weights.
inline LinearModel train_logreg(const std::vector<SparseVec>& xs,
                                const std::vector<SectionLabel>& ys, int dims,
                                const LogRegConfig& config) {
  if (xs.empty()) throw DataError("empty training set");
  if (xs.size() != ys.size()) throw DataError("vector/label count mismatch");
  if (dims < 1) throw DataError("empty feature space");
  LinearModel model(LinearKind::LogisticRegression, dims);
  const int n = static_cast<int>(xs.size());
  const int batch = std::max(1, std::min(config.batch, n));
  Rng rng(config.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.weights().size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(&order);
    for (int start = 0; start < n; start += batch) {
      const int end = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (int bi = start; bi < end; ++bi) {
        const int i = order[bi];
        std::vector<double> p = model.probabilities(xs[i]);
        p[static_cast<int>(ys[i])] -= 1.0;
        for (int y = 0; y < kLabelCount; ++y) {
          double* g = &grad[static_cast<size_t>(y) * (dims + 1)];
          for (const auto& [d, v] : xs[i].entries()) g[d] += p[y] * v;
          g[dims] += p[y];
        }
      }
      const double scale = 1.0 / (end - start);
      std::vector<double>& w = *model.mutable_weights();
      for (int y = 0; y < kLabelCount; ++y) {
        double* wy = &w[static_cast<size_t>(y) * (dims + 1)];
        const double* gy = &grad[static_cast<size_t>(y) * (dims + 1)];
        for (int d = 0; d < dims; ++d)
          wy[d] -= config.lr * (gy[d] * scale + config.l2 * wy[d]);
        wy[dims] -= config.lr * gy[dims] * scale;  // bias unregularized
      }
    }
  }
  return model;
}

// One-vs-rest linear SVM by primal subgradient descent with the 1/(lambda t)
// step schedule. Bias is unregularized.
inline LinearModel train_svm(const std::vector<SparseVec>& xs,
                             const std::vector<SectionLabel>& ys, int dims,
                             const SvmConfig& config) {
  if (xs.empty()) throw DataError("empty training set");
  if (xs.size() != ys.size()) throw DataError("vector/label count mismatch");
  if (dims < 1) throw DataError("empty feature space");
  LinearModel model(LinearKind::Svm, dims);
  const int n = static_cast<int>(xs.size());
  const double lambda = 1.0 / (config.c * n);
  Rng rng(config.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // w is kept as scale * v so the per-step shrink stays O(nnz).
  std::vector<double> v(dims);
  for (int y = 0; y < kLabelCount; ++y) {
    std::fill(v.begin(), v.end(), 0.0);
    double scale = 1.0;
    double bias = 0.0;
    long long t = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      rng.shuffle(&order);
      for (int i : order) {
        ++t;
        const double eta = 1.0 / (lambda * t);
        const double target = ys[i] == static_cast<SectionLabel>(y) ? 1.0
                                                                    : -1.0;
        const double margin =
            target * (scale * xs[i].dot_dense(v.data()) + bias);
        const double shrink = 1.0 - eta * lambda;
        if (shrink <= 0.0) {
          scale = 1.0;
          std::fill(v.begin(), v.end(), 0.0);
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * target / scale;
          for (const auto& [d, val] : xs[i].entries()) v[d] += step * val;
          bias += eta * target;
        }
      }
    }
    double* w = model.row(y);
    for (int d = 0; d < dims; ++d) w[d] = scale * v[d];
    w[dims] = bias;
  }
  return model;
}

}  // namespace secmark
