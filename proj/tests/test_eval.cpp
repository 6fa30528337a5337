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

#include "secmark/eval.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>
#include <vector>

namespace sm = secmark;
using L = sm::SectionLabel;

TEST_CASE("f1 is the harmonic mean of precision and recall", "[eval]") {
  CHECK(sm::f1_score(1.0, 1.0) == Catch::Approx(1.0));
  CHECK(sm::f1_score(0.5, 0.5) == Catch::Approx(0.5));
  CHECK(sm::f1_score(0.890, 0.861) == Catch::Approx(0.87526).margin(1e-5));
  CHECK(sm::f1_score(0.0, 0.0) == 0.0);
  CHECK(sm::f1_score(1.0, 0.0) == 0.0);
}

TEST_CASE("report divides tp by predicted and gold", "[eval]") {
  std::vector<L> pred = {L::Subject, L::Subject, L::Method, L::Method,
                         L::Method, L::Result};
  std::vector<L> gold = {L::Subject, L::Method, L::Method, L::Method,
                         L::Result, L::Result};
  sm::EvalReport r = sm::precision_recall_f1(pred, gold);
  const auto& subj = r.per_label[static_cast<int>(L::Subject)];
  CHECK(subj.precision == Catch::Approx(0.5));  // 1 of 2 predicted
  CHECK(subj.recall == Catch::Approx(1.0));     // the only gold subject
  const auto& meth = r.per_label[static_cast<int>(L::Method)];
  CHECK(meth.precision == Catch::Approx(2.0 / 3.0));
  CHECK(meth.recall == Catch::Approx(2.0 / 3.0));
  const auto& res = r.per_label[static_cast<int>(L::Result)];
  CHECK(res.precision == Catch::Approx(1.0));
  CHECK(res.recall == Catch::Approx(0.5));

  const double expect_macro =
      (sm::f1_score(0.5, 1.0) + sm::f1_score(2.0 / 3.0, 2.0 / 3.0) +
       sm::f1_score(1.0, 0.5)) /
      3.0;
  CHECK(r.macro_f1_targets() == Catch::Approx(expect_macro));
}

TEST_CASE("absent labels contribute zero without dividing by zero", "[eval]") {
  std::vector<L> pred = {L::Pre, L::Pre};
  std::vector<L> gold = {L::Pre, L::Subject};
  sm::EvalReport r = sm::precision_recall_f1(pred, gold);
  const auto& subj = r.per_label[static_cast<int>(L::Subject)];
  CHECK(subj.precision == 0.0);  // nothing predicted
  CHECK(subj.recall == 0.0);
  CHECK(subj.f1 == 0.0);
  const auto& meth = r.per_label[static_cast<int>(L::Method)];
  CHECK(meth.precision == 0.0);  // nothing predicted, nothing gold
  CHECK(meth.recall == 0.0);
  CHECK(sm::precision_recall_f1({}, {}).macro_f1_targets() == 0.0);
  CHECK_THROWS_AS(sm::precision_recall_f1({L::Pre}, {}), sm::DataError);
}

TEST_CASE("confusion counts merge additively", "[eval]") {
  sm::ConfusionCounts a, b;
  a.observe(L::Subject, L::Subject);
  b.observe(L::Subject, L::Method);
  b.observe(L::Method, L::Method);
  a.merge(b);
  CHECK(a.tp[static_cast<int>(L::Subject)] == 1);
  CHECK(a.predicted[static_cast<int>(L::Subject)] == 2);
  CHECK(a.gold[static_cast<int>(L::Method)] == 2);
}

TEST_CASE("kfold split covers every document once", "[eval]") {
  sm::FoldSplit split = sm::kfold_split(371, 10, 7);
  REQUIRE(split.test_docs.size() == 10);
  std::vector<int> sizes;
  std::set<int> seen;
  for (const auto& fold : split.test_docs) {
    sizes.push_back(static_cast<int>(fold.size()));
    for (int d : fold) {
      CHECK(d >= 0);
      CHECK(d < 371);
      CHECK(seen.insert(d).second);  // no document tested twice
    }
  }
  CHECK(seen.size() == 371);
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes.front() == 37);
  CHECK(sizes.back() == 38);
  CHECK(std::count(sizes.begin(), sizes.end(), 37) == 9);

  // Train side is the complement.
  const std::vector<int> train0 = split.train_docs(0);
  CHECK(train0.size() == 371 - split.test_docs[0].size());
  for (int d : train0)
    CHECK(std::find(split.test_docs[0].begin(), split.test_docs[0].end(), d) ==
          split.test_docs[0].end());
}

TEST_CASE("kfold split is seed-deterministic and seed-sensitive", "[eval]") {
  sm::FoldSplit a = sm::kfold_split(50, 5, 11);
  sm::FoldSplit b = sm::kfold_split(50, 5, 11);
  CHECK(a.test_docs == b.test_docs);
  sm::FoldSplit c = sm::kfold_split(50, 5, 12);
  CHECK(a.test_docs != c.test_docs);
}

TEST_CASE("kfold split rejects bad shapes", "[eval]") {
  CHECK_THROWS_AS(sm::kfold_split(10, 1, 0), sm::ConfigError);
  CHECK_THROWS_AS(sm::kfold_split(3, 4, 0), sm::ConfigError);
}

TEST_CASE("paired t-test matches the textbook numbers", "[eval]") {
  // Differences 1..5: mean 3, sample sd sqrt(2.5).
  std::vector<double> a = {2, 4, 6, 8, 10};
  std::vector<double> b = {1, 2, 3, 4, 5};
  sm::TTestResult r = sm::paired_ttest(a, b);
  CHECK(r.t == Catch::Approx(4.242640687).margin(1e-6));
  CHECK(r.p == Catch::Approx(0.0132).margin(1e-3));
  CHECK_FALSE(r.degenerate);

  // Order flips the sign, not the p-value.
  sm::TTestResult s = sm::paired_ttest(b, a);
  CHECK(s.t == Catch::Approx(-r.t));
  CHECK(s.p == Catch::Approx(r.p));
}

TEST_CASE("paired t-test conventions on degenerate input", "[eval]") {
  sm::TTestResult zero = sm::paired_ttest({1, 2, 3}, {1, 2, 3});
  CHECK(zero.t == 0.0);
  CHECK(zero.p == 1.0);

  sm::TTestResult shift = sm::paired_ttest({2, 3, 4}, {1, 2, 3});
  CHECK(std::isinf(shift.t));
  CHECK(shift.p == 0.0);
  CHECK(shift.degenerate);

  CHECK_THROWS_AS(sm::paired_ttest({1}, {2}), sm::DataError);
  CHECK_THROWS_AS(sm::paired_ttest({1, 2}, {1}), sm::DataError);
}

TEST_CASE("student t tail probabilities", "[eval]") {
  // Two-sided p for t with df degrees of freedom, reference values from
  // the regularized incomplete beta identity.
  CHECK(sm::student_t_two_sided_p(0.0, 5) == Catch::Approx(1.0));
  CHECK(sm::student_t_two_sided_p(12.706, 1) == Catch::Approx(0.05).margin(1e-4));
  CHECK(sm::student_t_two_sided_p(2.776, 4) == Catch::Approx(0.05).margin(1e-3));
  CHECK(sm::student_t_two_sided_p(2.262, 9) == Catch::Approx(0.05).margin(1e-3));
  CHECK(sm::student_t_two_sided_p(3.250, 9) == Catch::Approx(0.01).margin(1e-3));
  CHECK_THROWS_AS(sm::student_t_two_sided_p(1.0, 0), sm::NumericError);
}

TEST_CASE("significance stars follow the reporting convention", "[eval]") {
  CHECK(sm::significance_stars(0.005) == "***");
  CHECK(sm::significance_stars(0.03) == "**");
  CHECK(sm::significance_stars(0.07) == "*");
  CHECK(sm::significance_stars(0.2) == "");
}
