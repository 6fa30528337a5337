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

#include <cmath>
#include <string>
#include <vector>

#include "secmark/errors.hpp"
#include "secmark/rng.hpp"
#include "secmark/vocab.hpp"

namespace secmark {

struct Doc2VecConfig {
  int dim = 40;
  int negatives = 5;
  int epochs = 20;
  double lr = 0.025;
  double min_lr = 0.0001;
  int min_count = 1;
  uint64_t seed = 42;
};

// PV-DBOW: each training sentence owns a vector that predicts its words via
// negative sampling. Inference freezes the word side and fits a fresh doc
// vector by the same objective.
class Doc2VecModel {
 public:
  Doc2VecModel() = default;

  void train(const std::vector<std::vector<std::string>>& sentences,
             const Doc2VecConfig& config) {
    if (config.dim < 2) throw ConfigError("doc2vec dimension must be >= 2");
    config_ = config;
    vocab_ = build_vocabulary(sentences, config.min_count);
    word_out_.assign(static_cast<size_t>(vocab_.size()) * config.dim, 0.0);
    if (vocab_.size() == 0) return;

    std::vector<std::vector<int>> ids(sentences.size());
    long long total_tokens = 0;
    for (size_t d = 0; d < sentences.size(); ++d)
      for (const auto& w : sentences[d]) {
        int id = vocab_.lookup(w);
        if (id >= 0) {
          ids[d].push_back(id);
          ++total_tokens;
        }
      }
    if (total_tokens == 0) return;

    Rng rng(config_.seed);
    std::vector<double> doc_vecs(sentences.size() *
                                 static_cast<size_t>(config_.dim));
    for (double& v : doc_vecs)
      v = (rng.uniform() - 0.5) / config_.dim;

    NoiseSampler noise(vocab_);
    const long long schedule = static_cast<long long>(config_.epochs) *
                               total_tokens;
    long long processed = 0;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      for (size_t d = 0; d < ids.size(); ++d) {
        double* dv = &doc_vecs[d * config_.dim];
        for (int w : ids[d]) {
          const double lr = decayed_lr(processed++, schedule);
          sgns_update(dv, w, lr, &noise, &rng);
        }
      }
    }
    doc_vecs_ = std::move(doc_vecs);
  }

  // Fits a vector for an unseen token list against the frozen word side.
  std::vector<double> infer(const std::vector<std::string>& tokens,
                            uint64_t seed) const {
    std::vector<double> vec(config_.dim, 0.0);
    std::vector<int> ids;
    for (const auto& w : tokens) {
      int id = vocab_.lookup(w);
      if (id >= 0) ids.push_back(id);
    }
    if (ids.empty()) return vec;
    Rng rng(seed);
    for (double& v : vec) v = (rng.uniform() - 0.5) / config_.dim;
    NoiseSampler noise(vocab_);
    const long long schedule =
        static_cast<long long>(config_.epochs) * ids.size();
    long long processed = 0;
    auto frozen_pair = [&](int word, double target, double lr) {
      const double* wv = &word_out_[static_cast<size_t>(word) * config_.dim];
      double dot = 0.0;
      for (int i = 0; i < config_.dim; ++i) dot += vec[i] * wv[i];
      const double g = (target - stable_sigmoid(dot)) * lr;
      for (int i = 0; i < config_.dim; ++i) vec[i] += g * wv[i];
    };
    for (int epoch = 0; epoch < config_.epochs; ++epoch)
      for (int w : ids) {
        const double lr = decayed_lr(processed++, schedule);
        frozen_pair(w, 1.0, lr);
        for (int n = 0; n < config_.negatives; ++n) {
          int neg = noise.sample(&rng);
          if (neg == w) continue;
          frozen_pair(neg, 0.0, lr);
        }
      }
    return vec;
  }

  const Doc2VecConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<double>& word_out() const { return word_out_; }
  const std::vector<double>& doc_vectors() const { return doc_vecs_; }

  static Doc2VecModel from_state(Doc2VecConfig config, Vocabulary vocab,
                                 std::vector<double> word_out) {
    Doc2VecModel m;
    m.config_ = config;
    m.vocab_ = std::move(vocab);
    m.word_out_ = std::move(word_out);
    if (m.word_out_.size() !=
        static_cast<size_t>(m.vocab_.size()) * config.dim)
      throw DataError("doc2vec word table size mismatch");
    return m;
  }

 private:
  double decayed_lr(long long processed, long long schedule) const {
    double frac = schedule > 0
                      ? static_cast<double>(processed) / schedule
                      : 0.0;
    return std::max(config_.min_lr, config_.lr * (1.0 - frac));
  }

  // One positive + k negative updates; gradients flow to both sides.
  void sgns_update(double* dv, int word, double lr, const NoiseSampler* noise,
                   Rng* rng) {
    apply_pair(dv, word, 1.0, lr);
    for (int n = 0; n < config_.negatives; ++n) {
      int neg = noise->sample(rng);
      if (neg == word) continue;
      apply_pair(dv, neg, 0.0, lr);
    }
  }

  void apply_pair(double* dv, int word, double target, double lr) {
    double* wv = &word_out_[static_cast<size_t>(word) * config_.dim];
    double dot = 0.0;
    for (int i = 0; i < config_.dim; ++i) dot += dv[i] * wv[i];
    const double g = (target - stable_sigmoid(dot)) * lr;
    for (int i = 0; i < config_.dim; ++i) {
      const double dv_i = dv[i];
      dv[i] += g * wv[i];
      wv[i] += g * dv_i;
    }
  }

  Doc2VecConfig config_;
  Vocabulary vocab_;
  std::vector<double> word_out_;  // [V * dim]
  std::vector<double> doc_vecs_;  // training doc vectors, [D * dim]
};

}  // namespace secmark
