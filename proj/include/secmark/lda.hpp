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

#include <map>
#include <string>
#include <vector>

#include "secmark/errors.hpp"
#include "secmark/rng.hpp"

namespace secmark {

struct LdaConfig {
  int topics = 40;
  double alpha = -1.0;  // negative means 50 / topics
  double beta = 0.01;
  int train_iters = 500;
  int infer_iters = 50;
  uint64_t seed = 42;

  double resolved_alpha() const {
    return alpha >= 0 ? alpha : 50.0 / topics;
  }
};

// Topic model trained by collapsed Gibbs sampling. Inference folds a new
// document in against the frozen topic-word counts.
class LdaModel {
 public:
  LdaModel() = default;

  void train(const std::vector<std::vector<std::string>>& docs,
             const LdaConfig& config) {
    if (config.topics < 1) throw ConfigError("topic count must be positive");
    config_ = config;
    vocab_.clear();
    words_.clear();
    for (const auto& doc : docs)
      for (const auto& w : doc)
        if (!vocab_.count(w)) {
          int id = static_cast<int>(words_.size());
          vocab_.emplace(w, id);
          words_.push_back(w);
        }
    const int K = config_.topics;
    const int V = static_cast<int>(words_.size());
    const double alpha = config_.resolved_alpha();
    const double beta = config_.beta;

    std::vector<std::vector<int>> ids(docs.size());
    for (size_t d = 0; d < docs.size(); ++d)
      for (const auto& w : docs[d]) ids[d].push_back(vocab_.at(w));

    topic_word_.assign(static_cast<size_t>(K) * V, 0);
    topic_total_.assign(K, 0);
    std::vector<std::vector<int>> doc_topic(docs.size(),
                                            std::vector<int>(K, 0));
    std::vector<std::vector<int>> z(docs.size());

    Rng rng(config_.seed);
    for (size_t d = 0; d < ids.size(); ++d) {
      z[d].resize(ids[d].size());
      for (size_t n = 0; n < ids[d].size(); ++n) {
        int t = static_cast<int>(rng.uniform_below(K));
        z[d][n] = t;
        doc_topic[d][t]++;
        topic_word_[static_cast<size_t>(t) * V + ids[d][n]]++;
        topic_total_[t]++;
      }
    }

    std::vector<double> probs(K);
    for (int iter = 0; iter < config_.train_iters; ++iter) {
      for (size_t d = 0; d < ids.size(); ++d) {
        for (size_t n = 0; n < ids[d].size(); ++n) {
          const int w = ids[d][n];
          const int old = z[d][n];
          doc_topic[d][old]--;
          topic_word_[static_cast<size_t>(old) * V + w]--;
          topic_total_[old]--;
          for (int k = 0; k < K; ++k) {
            probs[k] = (doc_topic[d][k] + alpha) *
                       (topic_word_[static_cast<size_t>(k) * V + w] + beta) /
                       (topic_total_[k] + beta * V);
          }
          const int t = static_cast<int>(rng.sample_discrete(probs));
          z[d][n] = t;
          doc_topic[d][t]++;
          topic_word_[static_cast<size_t>(t) * V + w]++;
          topic_total_[t]++;
        }
      }
    }
  }

  // Topic distribution for a token list. Unknown words are skipped; a
  // document with no known words gets the uniform distribution.
  std::vector<double> infer(const std::vector<std::string>& tokens,
                            uint64_t seed) const {
    const int K = config_.topics;
    const int V = static_cast<int>(words_.size());
    const double alpha = config_.resolved_alpha();
    const double beta = config_.beta;
    std::vector<int> ids;
    for (const auto& w : tokens) {
      auto it = vocab_.find(w);
      if (it != vocab_.end()) ids.push_back(it->second);
    }
    std::vector<double> theta(K, 1.0 / K);
    if (ids.empty()) return theta;

    Rng rng(seed);
    std::vector<int> doc_topic(K, 0);
    std::vector<int> z(ids.size());
    for (size_t n = 0; n < ids.size(); ++n) {
      int t = static_cast<int>(rng.uniform_below(K));
      z[n] = t;
      doc_topic[t]++;
    }
    std::vector<double> probs(K);
    for (int iter = 0; iter < config_.infer_iters; ++iter) {
      for (size_t n = 0; n < ids.size(); ++n) {
        const int w = ids[n];
        doc_topic[z[n]]--;
        for (int k = 0; k < K; ++k) {
          probs[k] = (doc_topic[k] + alpha) *
                     (topic_word_[static_cast<size_t>(k) * V + w] + beta) /
                     (topic_total_[k] + beta * V);
        }
        z[n] = static_cast<int>(rng.sample_discrete(probs));
        doc_topic[z[n]]++;
      }
    }
    double denom = static_cast<double>(ids.size()) + K * alpha;
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      theta[k] = (doc_topic[k] + alpha) / denom;
      sum += theta[k];
    }
    // Exact unit mass regardless of rounding.
    for (double& t : theta) t /= sum;
    return theta;
  }

  int topics() const { return config_.topics; }
  const LdaConfig& config() const { return config_; }
  const std::vector<std::string>& vocabulary() const { return words_; }
  const std::vector<long long>& topic_word_counts() const {
    return topic_word_;
  }
  const std::vector<long long>& topic_totals() const { return topic_total_; }

  // Rebuilds a model from serialized state.
  static LdaModel from_state(LdaConfig config, std::vector<std::string> words,
                             std::vector<long long> topic_word,
                             std::vector<long long> topic_total) {
    LdaModel m;
    m.config_ = config;
    m.words_ = std::move(words);
    for (size_t i = 0; i < m.words_.size(); ++i)
      m.vocab_.emplace(m.words_[i], static_cast<int>(i));
    m.topic_word_ = std::move(topic_word);
    m.topic_total_ = std::move(topic_total);
    if (m.topic_word_.size() !=
        static_cast<size_t>(config.topics) * m.words_.size())
      throw DataError("topic-word table size mismatch");
    return m;
  }

 private:
  LdaConfig config_;
  std::map<std::string, int> vocab_;
  std::vector<std::string> words_;
  std::vector<long long> topic_word_;   // [K * V]
  std::vector<long long> topic_total_;  // [K]
};

}  // namespace secmark
