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
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/rng.hpp"

namespace secmark {

struct ConfusionCounts {
  std::array<long long, kLabelCount> tp{};
  std::array<long long, kLabelCount> predicted{};
  std::array<long long, kLabelCount> gold{};

  void observe(SectionLabel pred, SectionLabel truth) {
    predicted[static_cast<int>(pred)]++;
    gold[static_cast<int>(truth)]++;
    if (pred == truth) tp[static_cast<int>(pred)]++;
  }

  void merge(const ConfusionCounts& o) {
    for (int y = 0; y < kLabelCount; ++y) {
      tp[y] += o.tp[y];
      predicted[y] += o.predicted[y];
      gold[y] += o.gold[y];
    }
  }
};

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::array<LabelMetrics, kLabelCount> per_label;
  ConfusionCounts counts;

  // Unweighted mean F1 over a label subset.
  double macro_f1(const std::vector<SectionLabel>& labels) const {
    if (labels.empty()) return 0.0;
    double s = 0.0;
    for (SectionLabel l : labels) s += per_label[static_cast<int>(l)].f1;
    return s / labels.size();
  }

  double macro_f1_targets() const {
    return macro_f1(
        {SectionLabel::Subject, SectionLabel::Method, SectionLabel::Result});
  }
};

inline double f1_score(double p, double r) {
  return (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline EvalReport report_from_counts(const ConfusionCounts& counts) {
  EvalReport report;
  report.counts = counts;
  for (int y = 0; y < kLabelCount; ++y) {
    LabelMetrics& m = report.per_label[y];
    m.precision = counts.predicted[y] > 0
                      ? static_cast<double>(counts.tp[y]) / counts.predicted[y]
                      : 0.0;
    m.recall = counts.gold[y] > 0
                   ? static_cast<double>(counts.tp[y]) / counts.gold[y]
                   : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
  }
  return report;
}

inline EvalReport precision_recall_f1(
    const std::vector<SectionLabel>& predicted,
    const std::vector<SectionLabel>& gold) {
  if (predicted.size() != gold.size())
    throw DataError("predicted length " + std::to_string(predicted.size()) +
                    " does not match gold length " +
                    std::to_string(gold.size()));
  ConfusionCounts counts;
  for (size_t i = 0; i < predicted.size(); ++i)
    counts.observe(predicted[i], gold[i]);
  return report_from_counts(counts);
}

// ---------------------------------------------------------------------------
// Document-level k-fold split.

struct FoldSplit {
  std::vector<std::vector<int>> test_docs;  // document indices per fold

  std::vector<int> train_docs(int fold) const {
    std::vector<int> out;
    for (size_t f = 0; f < test_docs.size(); ++f)
      if (static_cast<int>(f) != fold)
        out.insert(out.end(), test_docs[f].begin(), test_docs[f].end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline FoldSplit kfold_split(int doc_count, int k, uint64_t seed) {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (k > doc_count)
    throw ConfigError("k=" + std::to_string(k) + " exceeds document count " +
                      std::to_string(doc_count));
  std::vector<int> order(doc_count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(&order);
  FoldSplit split;
  split.test_docs.resize(k);
  // First (doc_count % k) folds take the extra document.
  const int base = doc_count / k;
  const int extra = doc_count % k;
  int at = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) split.test_docs[f].push_back(order[at++]);
    std::sort(split.test_docs[f].begin(), split.test_docs[f].end());
  }
  return split;
}

// ---------------------------------------------------------------------------
// Paired t-test with a self-contained Student-t CDF.

namespace detail {

// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const bool swap = x >= (a + 1.0) / (a + b + 2.0);
  if (swap) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  const double tiny = 1e-30;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(ln_front) * h / a;
}

}  // namespace detail

// Two-sided tail probability P(|T_df| >= |t|).
inline double student_t_two_sided_p(double t, double df) {
  if (df <= 0) throw NumericError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return detail::incomplete_beta(df / 2.0, 0.5, x);
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool degenerate = false;  // zero variance with nonzero mean
};

inline TTestResult paired_ttest(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DataError("paired samples have different lengths");
  const int k = static_cast<int>(a.size());
  if (k < 2) throw DataError("paired t-test needs at least 2 pairs");
  std::vector<double> diff(k);
  for (int i = 0; i < k; ++i) diff[i] = a[i] - b[i];
  double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / k;
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double var = ss / (k - 1);
  TTestResult r;
  if (var == 0.0) {
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.t = mean / std::sqrt(var / k);
  r.p = student_t_two_sided_p(r.t, k - 1);
  return r;
}

// Paper-style markers: *** p<0.01, ** p<0.05, * p<0.1.
inline std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace secmark
