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

#include "secmark/selection.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "secmark/rng.hpp"

namespace sm = secmark;
using L = sm::SectionLabel;

namespace {

// Brute-force information gain for one dimension: H(Y) minus the
// presence-weighted conditional entropy, everything in bits.
double naive_ig(const std::vector<sm::SparseVec>& xs,
                const std::vector<L>& ys, int dim) {
  const long long n = static_cast<long long>(xs.size());
  auto entropy = [](const std::vector<long long>& c, long long total) {
    double h = 0.0;
    for (long long v : c) {
      if (v == 0) continue;
      double p = static_cast<double>(v) / total;
      h -= p * std::log2(p);
    }
    return h;
  };
  std::vector<long long> all(sm::kLabelCount, 0), on(sm::kLabelCount, 0),
      off(sm::kLabelCount, 0);
  long long n_on = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    all[static_cast<int>(ys[i])]++;
    if (xs[i].get(dim) > 0) {
      on[static_cast<int>(ys[i])]++;
      ++n_on;
    } else {
      off[static_cast<int>(ys[i])]++;
    }
  }
  const long long n_off = n - n_on;
  double cond = 0.0;
  if (n_on > 0)
    cond += static_cast<double>(n_on) / n * entropy(on, n_on);
  if (n_off > 0)
    cond += static_cast<double>(n_off) / n * entropy(off, n_off);
  return entropy(all, n) - cond;
}

}  // namespace

TEST_CASE("perfectly predictive feature gains one bit", "[selection]") {
  sm::FeatureSpace space;
  space.intern("f0");
  std::vector<sm::SparseVec> xs(4);
  std::vector<L> ys = {L::Subject, L::Subject, L::Method, L::Method};
  xs[0].set(0, 1.0);
  xs[1].set(0, 2.0);
  auto scores = sm::information_gain(xs, ys, space);
  REQUIRE(scores.size() == 1);
  CHECK(scores[0].name == "f0");
  CHECK(scores[0].ig == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("constant and independent features gain nothing", "[selection]") {
  sm::FeatureSpace space;
  space.intern("always");
  space.intern("independent");
  std::vector<sm::SparseVec> xs(4);
  std::vector<L> ys = {L::Subject, L::Subject, L::Method, L::Method};
  for (auto& x : xs) x.set(0, 1.0);
  xs[0].set(1, 1.0);  // one of each class
  xs[2].set(1, 1.0);
  auto scores = sm::information_gain(xs, ys, space);
  CHECK(scores[0].ig == Catch::Approx(0.0).margin(1e-12));
  CHECK(scores[1].ig == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("information gain matches the naive counter", "[selection]") {
  const int D = 12, N = 200;
  sm::FeatureSpace space;
  for (int d = 0; d < D; ++d) space.intern("f" + std::to_string(d));
  sm::Rng rng(99);
  std::vector<sm::SparseVec> xs(N);
  std::vector<L> ys(N);
  for (int i = 0; i < N; ++i) {
    ys[i] = static_cast<L>(rng.uniform_below(sm::kLabelCount));
    for (int d = 0; d < D; ++d) {
      const double bias = (d % 3 == 0) ? 0.2 * static_cast<int>(ys[i]) : 0.0;
      if (rng.uniform() < 0.3 + 0.08 * bias) xs[i].set(d, 1.0);
    }
  }
  auto scores = sm::information_gain(xs, ys, space);
  REQUIRE(static_cast<int>(scores.size()) == D);
  for (int d = 0; d < D; ++d)
    CHECK(scores[d].ig == Catch::Approx(naive_ig(xs, ys, d)).margin(1e-10));
}

TEST_CASE("information gain validates shapes", "[selection]") {
  sm::FeatureSpace space;
  space.intern("f0");
  std::vector<sm::SparseVec> xs(2);
  CHECK_THROWS_AS(sm::information_gain({}, {}, space), sm::DataError);
  CHECK_THROWS_AS(sm::information_gain(xs, {L::Pre}, space), sm::DataError);
}

TEST_CASE("rising thresholds keep nested feature sets", "[selection]") {
  sm::FeatureSpace space;
  std::vector<sm::FeatureScore> scores;
  const std::vector<double> igs = {0.9, 0.0, 0.4, 0.02, 0.7, 0.1};
  for (size_t d = 0; d < igs.size(); ++d) {
    space.intern("f" + std::to_string(d));
    scores.push_back({"f" + std::to_string(d), igs[d]});
  }
  std::set<int> prev_kept;
  bool first = true;
  for (double t : {0.0, 0.01, 0.1, 0.5, 1.0}) {
    sm::Selection sel = sm::select_features(scores, space, t);
    std::set<int> kept(sel.kept.begin(), sel.kept.end());
    for (int d : kept) CHECK(igs[d] >= t);
    if (!first)
      for (int d : kept) CHECK(prev_kept.count(d) == 1);
    prev_kept = kept;
    first = false;
  }
  // Threshold zero keeps everything.
  sm::Selection all = sm::select_features(scores, space, 0.0);
  CHECK(all.kept.size() == igs.size());
  CHECK_THROWS_AS(sm::select_features(scores, space, -0.1), sm::ConfigError);
}

TEST_CASE("projection preserves surviving values and names", "[selection]") {
  sm::FeatureSpace space;
  std::vector<sm::FeatureScore> scores;
  space.intern("a");
  scores.push_back({"a", 0.5});
  space.intern("b");
  scores.push_back({"b", 0.05});
  space.intern("c");
  scores.push_back({"c", 0.8});
  sm::Selection sel = sm::select_features(scores, space, 0.1);
  REQUIRE(sel.kept == std::vector<int>{0, 2});
  CHECK(sel.space.names() == std::vector<std::string>{"a", "c"});

  sm::SparseVec v;
  v.set(0, 1.5);
  v.set(1, 2.5);
  v.set(2, 3.5);
  sm::SparseVec p = sm::project(v, sel);
  CHECK(p.nnz() == 2);
  CHECK(p.get(sel.projection.at(0)) == 1.5);
  CHECK(p.get(sel.projection.at(2)) == 3.5);
  // Dropped dimension is gone entirely.
  for (const auto& [idx, val] : p.entries()) CHECK(val != 2.5);
}

TEST_CASE("score dump sorts descending with stable ties", "[selection]") {
  std::vector<sm::FeatureScore> scores = {
      {"low", 0.1}, {"high", 0.9}, {"mid_a", 0.5}, {"mid_b", 0.5}};
  std::ostringstream os;
  sm::dump_scores(scores, os);
  std::istringstream is(os.str());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line))
    names.push_back(line.substr(0, line.find('\t')));
  CHECK(names == std::vector<std::string>{"high", "mid_a", "mid_b", "low"});
}
