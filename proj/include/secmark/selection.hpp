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
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/sparse.hpp"

namespace secmark {

struct FeatureScore {
  std::string name;
  double ig = 0.0;
};

namespace detail {

inline double entropy_bits(const std::vector<long long>& counts,
                           long long total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

// Information gain of each feature against the label, with features
// binarized to present (value > 0) / absent. Entropies in bits.
inline std::vector<FeatureScore> information_gain(
    const std::vector<SparseVec>& vectors,
    const std::vector<SectionLabel>& labels, const FeatureSpace& space) {
  if (vectors.empty()) throw DataError("no vectors for information gain");
  if (vectors.size() != labels.size())
    throw DataError("vector count " + std::to_string(vectors.size()) +
                    " does not match label count " +
                    std::to_string(labels.size()));
  const int D = space.size();
  const long long N = static_cast<long long>(vectors.size());

  std::vector<long long> label_total(kLabelCount, 0);
  for (SectionLabel l : labels) label_total[static_cast<int>(l)]++;
  const double h_y = detail::entropy_bits(label_total, N);

  // present_count[d * kLabelCount + y] counts sentences of label y where
  // feature d is present.
  std::vector<long long> present(static_cast<size_t>(D) * kLabelCount, 0);
  std::vector<long long> present_total(D, 0);
  for (size_t i = 0; i < vectors.size(); ++i) {
    const int y = static_cast<int>(labels[i]);
    for (const auto& [d, v] : vectors[i].entries()) {
      if (v > 0) {
        present[static_cast<size_t>(d) * kLabelCount + y]++;
        present_total[d]++;
      }
    }
  }

  std::vector<FeatureScore> out(D);
  std::vector<long long> on(kLabelCount), off(kLabelCount);
  for (int d = 0; d < D; ++d) {
    const long long n_on = present_total[d];
    const long long n_off = N - n_on;
    for (int y = 0; y < kLabelCount; ++y) {
      on[y] = present[static_cast<size_t>(d) * kLabelCount + y];
      off[y] = label_total[y] - on[y];
    }
    const double cond =
        (static_cast<double>(n_on) / N) * detail::entropy_bits(on, n_on) +
        (static_cast<double>(n_off) / N) * detail::entropy_bits(off, n_off);
    out[d].name = space.name(d);
    out[d].ig = std::max(0.0, h_y - cond);
  }
  return out;
}

// Surviving dimensions after thresholding, in original order, plus the
// old-index -> new-index map for projection.
struct Selection {
  FeatureSpace space;
  std::unordered_map<int, int> projection;
  std::vector<int> kept;  // original indices in order
};

inline Selection select_features(const std::vector<FeatureScore>& scores,
                                 const FeatureSpace& space, double threshold) {
  if (threshold < 0) throw ConfigError("selection threshold must be >= 0");
  if (static_cast<int>(scores.size()) != space.size())
    throw DataError("score count does not match feature space size");
  Selection sel;
  for (int d = 0; d < space.size(); ++d) {
    if (scores[d].ig >= threshold) {
      int nd = sel.space.intern(space.name(d));
      sel.projection.emplace(d, nd);
      sel.kept.push_back(d);
    }
  }
  return sel;
}

inline SparseVec project(const SparseVec& vec, const Selection& sel) {
  return vec.project(sel.projection);
}

// TSV dump sorted by score descending; ties keep original dimension order.
inline void dump_scores(const std::vector<FeatureScore>& scores,
                        std::ostream& os) {
  std::vector<int> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[a].ig > scores[b].ig;
  });
  os.precision(17);
  for (int i : order) os << scores[i].name << '\t' << scores[i].ig << '\n';
}

}  // namespace secmark
