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
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "secmark/errors.hpp"
#include "secmark/rng.hpp"

namespace secmark {

// Word list ordered by (frequency desc, word asc) with an index lookup.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<long long> counts)
      : words_(std::move(words)), counts_(std::move(counts)) {
    for (size_t i = 0; i < words_.size(); ++i)
      index_.emplace(words_[i], static_cast<int>(i));
  }

  int lookup(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
  }

  bool contains(const std::string& word) const { return lookup(word) >= 0; }
  const std::string& word(int id) const { return words_.at(id); }
  long long count(int id) const { return counts_.at(id); }
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<long long>& counts() const { return counts_; }

 private:
  std::vector<std::string> words_;
  std::vector<long long> counts_;
  std::unordered_map<std::string, int> index_;
};

inline Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& token_lists, int min_count) {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  std::map<std::string, long long> freq;
  for (const auto& tokens : token_lists)
    for (const auto& w : tokens) freq[w]++;
  std::vector<std::pair<std::string, long long>> items(freq.begin(),
                                                       freq.end());
  std::erase_if(items, [&](const auto& p) { return p.second < min_count; });
  std::stable_sort(items.begin(), items.end(), [](const auto& a,
                                                  const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<long long> counts;
  for (auto& [w, c] : items) {
    words.push_back(std::move(w));
    counts.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

// Unigram^0.75 noise distribution for negative sampling, drawn via a cached
// cumulative table with binary search.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocabulary& vocab) {
    cdf_.reserve(vocab.size());
    double total = 0.0;
    for (int i = 0; i < vocab.size(); ++i) {
      total += std::pow(static_cast<double>(vocab.count(i)), 0.75);
      cdf_.push_back(total);
    }
  }

  int sample(Rng* rng) const {
    if (cdf_.empty()) throw NumericError("noise sampler over empty vocabulary");
    double r = rng->uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace secmark
