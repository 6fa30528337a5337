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
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "secmark/errors.hpp"
#include "secmark/rng.hpp"
#include "secmark/vocab.hpp"

namespace secmark {

// Word vector table. Row 0 is the all-zero padding row; real words occupy
// ids 1..V.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(int dim) : dim_(dim), data_(dim, 0.0) {}

  int add_word(const std::string& word) {
    auto it = index_.find(word);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(words_.size()) + 1;
    words_.push_back(word);
    index_.emplace(word, id);
    data_.resize(data_.size() + dim_, 0.0);
    return id;
  }

  // 0 (the padding id) for unknown words.
  int word_id(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? 0 : it->second;
  }

  double* row(int id) {
    check_id(id);
    return &data_[static_cast<size_t>(id) * dim_];
  }
  const double* row(int id) const {
    check_id(id);
    return &data_[static_cast<size_t>(id) * dim_];
  }

  int dim() const { return dim_; }
  int word_count() const { return static_cast<int>(words_.size()); }
  int rows() const { return word_count() + 1; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>* mutable_data() { return &data_; }

  bool trainable = true;

 private:
  void check_id(int id) const {
    if (id < 0 || id >= rows())
      throw DataError("embedding row " + std::to_string(id) +
                      " out of range (rows " + std::to_string(rows()) + ")");
  }

  int dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  std::vector<double> data_;  // [(V+1) * dim], row 0 zero
};

struct EmbeddingConfig {
  int dim = 200;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  double min_lr = 0.0001;
  int min_count = 1;
  uint64_t seed = 42;
};

// Skip-gram with negative sampling over tokenized sentences.
inline EmbeddingTable train_word_embeddings(
    const std::vector<std::vector<std::string>>& sentences,
    const EmbeddingConfig& config) {
  if (config.dim < 2) throw ConfigError("embedding dimension must be >= 2");
  Vocabulary vocab = build_vocabulary(sentences, config.min_count);
  if (vocab.size() == 0) throw DataError("empty corpus for embedding training");

  EmbeddingTable table(config.dim);
  for (int i = 0; i < vocab.size(); ++i) table.add_word(vocab.word(i));

  Rng rng(config.seed);
  for (int id = 1; id < table.rows(); ++id) {
    double* r = table.row(id);
    for (int j = 0; j < config.dim; ++j)
      r[j] = (rng.uniform() - 0.5) / config.dim;
  }
  std::vector<double> out(static_cast<size_t>(vocab.size()) * config.dim, 0.0);

  std::vector<std::vector<int>> ids(sentences.size());
  long long total_tokens = 0;
  for (size_t s = 0; s < sentences.size(); ++s)
    for (const auto& w : sentences[s]) {
      int v = vocab.lookup(w);
      if (v >= 0) {
        ids[s].push_back(v);
        ++total_tokens;
      }
    }

  NoiseSampler noise(vocab);
  const long long schedule =
      static_cast<long long>(config.epochs) * std::max<long long>(
                                                  total_tokens, 1);
  long long processed = 0;
  const int D = config.dim;
  std::vector<double> grad_center(D);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sent : ids) {
      for (size_t c = 0; c < sent.size(); ++c) {
        const double lr = std::max(
            config.min_lr,
            config.lr * (1.0 - static_cast<double>(processed++) / schedule));
        const int center = sent[c];
        double* cv = table.row(center + 1);
        const size_t lo = c >= static_cast<size_t>(config.window)
                              ? c - config.window
                              : 0;
        const size_t hi = std::min(sent.size(), c + config.window + 1);
        for (size_t t = lo; t < hi; ++t) {
          if (t == c) continue;
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          auto pair_update = [&](int word, double target) {
            double* wv = &out[static_cast<size_t>(word) * D];
            double dot = 0.0;
            for (int j = 0; j < D; ++j) dot += cv[j] * wv[j];
            const double g = (target - stable_sigmoid(dot)) * lr;
            for (int j = 0; j < D; ++j) {
              grad_center[j] += g * wv[j];
              wv[j] += g * cv[j];
            }
          };
          pair_update(sent[t], 1.0);
          for (int n = 0; n < config.negatives; ++n) {
            int neg = noise.sample(&rng);
            if (neg == sent[t]) continue;
            pair_update(neg, 0.0);
          }
          for (int j = 0; j < D; ++j) cv[j] += grad_center[j];
        }
      }
    }
  }
  return table;
}

// Text format: header "V E", then one "word v1 ... vE" line per word.
inline void save_embeddings(const EmbeddingTable& table, std::ostream& os) {
  os << table.word_count() << ' ' << table.dim() << '\n';
  os.precision(17);
  for (int id = 1; id <= table.word_count(); ++id) {
    os << table.words()[id - 1];
    const double* r = table.row(id);
    for (int j = 0; j < table.dim(); ++j) os << ' ' << r[j];
    os << '\n';
  }
}

inline void save_embeddings(const EmbeddingTable& table,
                            const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write embedding file '" + path + "'");
  save_embeddings(table, os);
}

inline EmbeddingTable load_embeddings(std::istream& is) {
  int v = 0, e = 0;
  if (!(is >> v >> e) || v < 0 || e < 1)
    throw DataError("bad embedding file header");
  EmbeddingTable table(e);
  for (int i = 0; i < v; ++i) {
    std::string word;
    if (!(is >> word))
      throw DataError("embedding file truncated at word " + std::to_string(i));
    int id = table.add_word(word);
    double* r = table.row(id);
    for (int j = 0; j < e; ++j)
      if (!(is >> r[j]))
        throw DataError("embedding file truncated in vector for '" + word +
                        "'");
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open embedding file '" + path + "'");
  return load_embeddings(is);
}

}  // namespace secmark
