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
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/lbfgs.hpp"
#include "secmark/sparse.hpp"

namespace secmark {

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generic linear-chain inference over unary scores state[T][L] and pairwise
// scores trans[L][L] (trans[prev][next]). Label count comes from the table.

inline double chain_log_partition(
    const std::vector<std::vector<double>>& state,
    const std::vector<std::vector<double>>& trans) {
  if (state.empty()) throw DataError("empty chain");
  const int L = static_cast<int>(state[0].size());
  std::vector<double> alpha = state[0];
  std::vector<double> next(L), terms(L);
  for (size_t t = 1; t < state.size(); ++t) {
    for (int y = 0; y < L; ++y) {
      for (int yp = 0; yp < L; ++yp)
        terms[yp] = alpha[yp] + trans[yp][y];
      next[y] = detail::log_sum_exp(terms) + state[t][y];
    }
    alpha = next;
  }
  return detail::log_sum_exp(alpha);
}

// Best-scoring label sequence; score ties prefer the lower label value at
// every decision.
inline std::vector<int> chain_viterbi(
    const std::vector<std::vector<double>>& state,
    const std::vector<std::vector<double>>& trans,
    double* path_score = nullptr) {
  if (state.empty()) throw DataError("empty chain");
  const int T = static_cast<int>(state.size());
  const int L = static_cast<int>(state[0].size());
  std::vector<std::vector<double>> best(T, std::vector<double>(L));
  std::vector<std::vector<int>> back(T, std::vector<int>(L, 0));
  best[0] = state[0];
  for (int t = 1; t < T; ++t) {
    for (int y = 0; y < L; ++y) {
      int arg = 0;
      double mx = best[t - 1][0] + trans[0][y];
      for (int yp = 1; yp < L; ++yp) {
        const double v = best[t - 1][yp] + trans[yp][y];
        if (v > mx) {
          mx = v;
          arg = yp;
        }
      }
      best[t][y] = mx + state[t][y];
      back[t][y] = arg;
    }
  }
  int arg = 0;
  for (int y = 1; y < L; ++y)
    if (best[T - 1][y] > best[T - 1][arg]) arg = y;
  if (path_score != nullptr) *path_score = best[T - 1][arg];
  std::vector<int> path(T);
  path[T - 1] = arg;
  for (int t = T - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
  return path;
}

struct ChainMarginals {
  double log_z = 0.0;
  std::vector<std::vector<double>> node;               // [T][L]
  std::vector<std::vector<std::vector<double>>> edge;  // [T-1][L][L]
};

// Forward-backward in log space.
inline ChainMarginals chain_marginals(
    const std::vector<std::vector<double>>& state,
    const std::vector<std::vector<double>>& trans) {
  if (state.empty()) throw DataError("empty chain");
  const int T = static_cast<int>(state.size());
  const int L = static_cast<int>(state[0].size());
  std::vector<std::vector<double>> alpha(T, std::vector<double>(L));
  std::vector<std::vector<double>> beta(T, std::vector<double>(L, 0.0));
  std::vector<double> terms(L);
  alpha[0] = state[0];
  for (int t = 1; t < T; ++t)
    for (int y = 0; y < L; ++y) {
      for (int yp = 0; yp < L; ++yp)
        terms[yp] = alpha[t - 1][yp] + trans[yp][y];
      alpha[t][y] = detail::log_sum_exp(terms) + state[t][y];
    }
  for (int t = T - 2; t >= 0; --t)
    for (int y = 0; y < L; ++y) {
      for (int yn = 0; yn < L; ++yn)
        terms[yn] = trans[y][yn] + state[t + 1][yn] + beta[t + 1][yn];
      beta[t][y] = detail::log_sum_exp(terms);
    }
  ChainMarginals m;
  m.log_z = detail::log_sum_exp(alpha[T - 1]);
  m.node.assign(T, std::vector<double>(L));
  for (int t = 0; t < T; ++t)
    for (int y = 0; y < L; ++y)
      m.node[t][y] = std::exp(alpha[t][y] + beta[t][y] - m.log_z);
  m.edge.assign(T - 1, std::vector<std::vector<double>>(
                           L, std::vector<double>(L)));
  for (int t = 0; t + 1 < T; ++t)
    for (int yp = 0; yp < L; ++yp)
      for (int y = 0; y < L; ++y)
        m.edge[t][yp][y] =
            std::exp(alpha[t][yp] + trans[yp][y] + state[t + 1][y] +
                     beta[t + 1][y] - m.log_z);
  return m;
}

// ---------------------------------------------------------------------------
// Six-label CRF over sentence feature vectors with a window template.

struct CrfTemplate {
  std::vector<int> offsets = {-2, -1, 0, 1, 2};

  void validate() const {
    if (offsets.empty()) throw ConfigError("template has no offsets");
    if (!std::is_sorted(offsets.begin(), offsets.end()))
      throw ConfigError("template offsets must be sorted");
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
      throw ConfigError("template offsets must be unique");
    if (!std::binary_search(offsets.begin(), offsets.end(), 0))
      throw ConfigError("template offsets must contain 0");
  }

  static CrfTemplate window(int radius) {
    CrfTemplate t;
    t.offsets.clear();
    for (int o = -radius; o <= radius; ++o) t.offsets.push_back(o);
    return t;
  }
};

struct CrfConfig {
  CrfTemplate tmpl;
  double l2 = 1.0;
  LbfgsConfig optimizer;
  uint64_t seed = 42;  // accepted for interface symmetry; training is exact
};

// Parameters: state weights [L][O][D] then transitions [L][L], flattened.
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(int dims, CrfTemplate tmpl) : dims_(dims), tmpl_(std::move(tmpl)) {
    tmpl_.validate();
    weights_.assign(param_count(), 0.0);
  }

  size_t param_count() const {
    return static_cast<size_t>(kLabelCount) * tmpl_.offsets.size() * dims_ +
           static_cast<size_t>(kLabelCount) * kLabelCount;
  }

  size_t state_index(int label, int offset_idx, int dim) const {
    return (static_cast<size_t>(label) * tmpl_.offsets.size() + offset_idx) *
               dims_ +
           dim;
  }

  size_t trans_index(int prev, int next) const {
    return static_cast<size_t>(kLabelCount) * tmpl_.offsets.size() * dims_ +
           static_cast<size_t>(prev) * kLabelCount + next;
  }

  // State scores for a document; out-of-range offsets contribute nothing.
  std::vector<std::vector<double>> score_table(
      const std::vector<SparseVec>& doc) const {
    const int T = static_cast<int>(doc.size());
    std::vector<std::vector<double>> state(
        T, std::vector<double>(kLabelCount, 0.0));
    for (int t = 0; t < T; ++t)
      for (size_t oi = 0; oi < tmpl_.offsets.size(); ++oi) {
        const int src = t + tmpl_.offsets[oi];
        if (src < 0 || src >= T) continue;
        for (const auto& [d, v] : doc[src].entries()) {
          if (d >= dims_)
            throw DataError("feature index " + std::to_string(d) +
                            " exceeds model dimension " +
                            std::to_string(dims_));
          for (int y = 0; y < kLabelCount; ++y)
            state[t][y] += weights_[state_index(y, oi, d)] * v;
        }
      }
    return state;
  }

  std::vector<std::vector<double>> transition_table() const {
    std::vector<std::vector<double>> trans(
        kLabelCount, std::vector<double>(kLabelCount));
    for (int a = 0; a < kLabelCount; ++a)
      for (int b = 0; b < kLabelCount; ++b)
        trans[a][b] = weights_[trans_index(a, b)];
    return trans;
  }

  double log_partition(const std::vector<SparseVec>& doc) const {
    return chain_log_partition(score_table(doc), transition_table());
  }

  std::vector<SectionLabel> predict(const std::vector<SparseVec>& doc,
                                    double* path_score = nullptr) const {
    const std::vector<int> path =
        chain_viterbi(score_table(doc), transition_table(), path_score);
    std::vector<SectionLabel> out(path.size());
    for (size_t t = 0; t < path.size(); ++t)
      out[t] = static_cast<SectionLabel>(path[t]);
    return out;
  }

  double sequence_score(const std::vector<SparseVec>& doc,
                        const std::vector<SectionLabel>& labels) const {
    const auto state = score_table(doc);
    const auto trans = transition_table();
    double s = 0.0;
    for (size_t t = 0; t < doc.size(); ++t) {
      s += state[t][static_cast<int>(labels[t])];
      if (t > 0)
        s += trans[static_cast<int>(labels[t - 1])]
                  [static_cast<int>(labels[t])];
    }
    return s;
  }

  // Per-document negative log-likelihood and its gradient (no L2 here),
  // accumulated into grad which must have param_count() entries.
  double nll_gradient(const std::vector<SparseVec>& doc,
                      const std::vector<SectionLabel>& labels,
                      std::vector<double>* grad) const {
    if (doc.size() != labels.size())
      throw DataError("document vectors and labels differ in length");
    const int T = static_cast<int>(doc.size());
    const auto state = score_table(doc);
    const auto trans = transition_table();
    const ChainMarginals marg = chain_marginals(state, trans);

    double gold = 0.0;
    for (int t = 0; t < T; ++t) {
      gold += state[t][static_cast<int>(labels[t])];
      if (t > 0)
        gold += trans[static_cast<int>(labels[t - 1])]
                     [static_cast<int>(labels[t])];
    }
    if (grad != nullptr) {
      for (int t = 0; t < T; ++t) {
        for (size_t oi = 0; oi < tmpl_.offsets.size(); ++oi) {
          const int src = t + tmpl_.offsets[oi];
          if (src < 0 || src >= T) continue;
          for (const auto& [d, v] : doc[src].entries())
            for (int y = 0; y < kLabelCount; ++y) {
              double g = marg.node[t][y] * v;
              if (y == static_cast<int>(labels[t])) g -= v;
              (*grad)[state_index(y, oi, d)] += g;
            }
        }
        if (t > 0)
          for (int a = 0; a < kLabelCount; ++a)
            for (int b = 0; b < kLabelCount; ++b) {
              double g = marg.edge[t - 1][a][b];
              if (a == static_cast<int>(labels[t - 1]) &&
                  b == static_cast<int>(labels[t]))
                g -= 1.0;
              (*grad)[trans_index(a, b)] += g;
            }
      }
    }
    return marg.log_z - gold;
  }

  int dims() const { return dims_; }
  const CrfTemplate& tmpl() const { return tmpl_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>* mutable_weights() { return &weights_; }

 private:
  int dims_ = 0;
  CrfTemplate tmpl_;
  std::vector<double> weights_;
};

// Batch training: L-BFGS on total NLL plus (l2/2)||w||^2.
inline CrfModel crf_train(
    const std::vector<std::vector<SparseVec>>& docs,
    const std::vector<std::vector<SectionLabel>>& labels, int dims,
    const CrfConfig& config) {
  if (docs.empty()) throw DataError("empty training corpus");
  if (docs.size() != labels.size())
    throw DataError("document/label count mismatch");
  if (dims < 1) throw DataError("empty feature space");
  CrfModel model(dims, config.tmpl);
  auto objective = [&](const std::vector<double>& w,
                       std::vector<double>* grad) {
    *model.mutable_weights() = w;
    std::fill(grad->begin(), grad->end(), 0.0);
    double f = 0.0;
    for (size_t i = 0; i < docs.size(); ++i)
      f += model.nll_gradient(docs[i], labels[i], grad);
    for (size_t j = 0; j < w.size(); ++j) {
      f += 0.5 * config.l2 * w[j] * w[j];
      (*grad)[j] += config.l2 * w[j];
    }
    return f;
  };
  LbfgsResult result = lbfgs_minimize(
      objective, std::vector<double>(model.param_count(), 0.0),
      config.optimizer);
  *model.mutable_weights() = std::move(result.x);
  return model;
}

// Audit dump of nonzero weights as `label,offset,feature,weight` lines,
// transitions as `label,trans:<next>,-,weight`.
inline void dump_crf_weights(const CrfModel& model, const FeatureSpace& space,
                             std::ostream& os) {
  os.precision(17);
  for (int y = 0; y < kLabelCount; ++y)
    for (size_t oi = 0; oi < model.tmpl().offsets.size(); ++oi)
      for (int d = 0; d < model.dims(); ++d) {
        const double w = model.weights()[model.state_index(y, oi, d)];
        if (w != 0.0)
          os << kLabelNames[y] << ',' << model.tmpl().offsets[oi] << ','
             << space.name(d) << ',' << w << '\n';
      }
  for (int a = 0; a < kLabelCount; ++a)
    for (int b = 0; b < kLabelCount; ++b) {
      const double w = model.weights()[model.trans_index(a, b)];
      if (w != 0.0)
        os << kLabelNames[a] << ",trans:" << kLabelNames[b] << ",-," << w
           << '\n';
    }
}

}  // namespace secmark
