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
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/crf.hpp"
#include "secmark/embedding.hpp"
#include "secmark/errors.hpp"
#include "secmark/eval.hpp"
#include "secmark/features.hpp"
#include "secmark/linear.hpp"
#include "secmark/rng.hpp"
#include "secmark/selection.hpp"
#include "secmark/slstm.hpp"

namespace secmark {

enum class ModelKind { Lr, Svm, Crf, Blstm, Clstm, Slstm };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Lr:
      return "lr";
    case ModelKind::Svm:
      return "svm";
    case ModelKind::Crf:
      return "crf";
    case ModelKind::Blstm:
      return "blstm";
    case ModelKind::Clstm:
      return "clstm";
    case ModelKind::Slstm:
      return "slstm";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::Lr, ModelKind::Svm, ModelKind::Crf,
                      ModelKind::Blstm, ModelKind::Clstm, ModelKind::Slstm})
    if (s == model_kind_name(k)) return k;
  throw ConfigError("unknown model '" + s +
                    "' (expected lr|svm|crf|blstm|clstm|slstm)");
}

inline bool is_neural(ModelKind k) {
  return k == ModelKind::Blstm || k == ModelKind::Clstm ||
         k == ModelKind::Slstm;
}

struct ExperimentConfig {
  std::vector<ModelKind> models;
  FeatureConfig features;
  double ig_threshold = 0.0;
  bool global_selection = false;  // fit featurizer + selection on all docs
  int folds = 10;
  uint64_t seed = 42;
  int jobs = 1;
  LogRegConfig logreg;
  SvmConfig svm;
  CrfConfig crf;
  SlstmConfig slstm;
  EmbeddingConfig embedding;
};

inline Corpus make_subcorpus(const Corpus& corpus,
                             const std::vector<int>& doc_indices) {
  Corpus out;
  out.documents.reserve(doc_indices.size());
  for (int d : doc_indices) out.documents.push_back(corpus.documents.at(d));
  refresh_labeled_flag(&out);
  return out;
}

namespace detail {

// Runs tasks 0..n-1 on up to `jobs` threads; each task writes only its own
// output slot, so results do not depend on the thread count.
inline void parallel_for(int n, int jobs,
                         const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&, w]() {
      try {
        for (int i = next++; i < n; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void flatten_labeled(
    const Corpus& corpus, const std::vector<std::vector<SparseVec>>& vecs,
    std::vector<SparseVec>* xs, std::vector<SectionLabel>* ys) {
  for (size_t d = 0; d < corpus.documents.size(); ++d)
    for (size_t i = 0; i < corpus.documents[d].sentences.size(); ++i) {
      const auto& s = corpus.documents[d].sentences[i];
      if (!s.gold_label) throw DataError("corpus is not fully labeled");
      xs->push_back(vecs[d][i]);
      ys->push_back(*s.gold_label);
    }
}

inline std::vector<std::vector<SparseVec>> project_all(
    const std::vector<std::vector<SparseVec>>& vecs, const Selection& sel) {
  std::vector<std::vector<SparseVec>> out(vecs.size());
  for (size_t d = 0; d < vecs.size(); ++d) {
    out[d].reserve(vecs[d].size());
    for (const auto& v : vecs[d]) out[d].push_back(project(v, sel));
  }
  return out;
}

// Shared per-fold state for the feature-based models: one featurizer and
// one selected feature set serve lr, svm, and crf alike.
struct ClassicFold {
  FeatureExtractor fx;
  std::vector<FeatureScore> scores;
};

inline ClassicFold fit_classic(const Corpus& train, FeatureConfig fc) {
  ClassicFold out;
  out.fx.fit(train, fc);
  std::vector<std::vector<SparseVec>> vecs = out.fx.transform(train);
  std::vector<SparseVec> xs;
  std::vector<SectionLabel> ys;
  flatten_labeled(train, vecs, &xs, &ys);
  out.scores = information_gain(xs, ys, out.fx.space());
  return out;
}

inline EvalReport eval_classic(ModelKind kind, const ExperimentConfig& cfg,
                               const ClassicFold& prep, const Corpus& train,
                               const Corpus& test, uint64_t model_seed) {
  Selection sel =
      select_features(prep.scores, prep.fx.space(), cfg.ig_threshold);
  if (sel.space.size() == 0)
    throw DataError("selection threshold removed every feature");
  const auto train_vecs = project_all(prep.fx.transform(train), sel);
  const auto test_vecs = project_all(prep.fx.transform(test), sel);
  const int dims = sel.space.size();

  ConfusionCounts counts;
  if (kind == ModelKind::Crf) {
    std::vector<std::vector<SectionLabel>> label_seqs;
    for (const auto& doc : train.documents) {
      std::vector<SectionLabel> seq;
      for (const auto& s : doc.sentences) seq.push_back(*s.gold_label);
      label_seqs.push_back(std::move(seq));
    }
    CrfConfig cc = cfg.crf;
    cc.seed = model_seed;
    CrfModel model = crf_train(train_vecs, label_seqs, dims, cc);
    for (size_t d = 0; d < test.documents.size(); ++d) {
      const auto pred = model.predict(test_vecs[d]);
      for (size_t i = 0; i < pred.size(); ++i)
        counts.observe(pred[i], *test.documents[d].sentences[i].gold_label);
    }
  } else {
    std::vector<SparseVec> xs;
    std::vector<SectionLabel> ys;
    flatten_labeled(train, train_vecs, &xs, &ys);
    LinearModel model;
    if (kind == ModelKind::Lr) {
      LogRegConfig lc = cfg.logreg;
      lc.seed = model_seed;
      model = train_logreg(xs, ys, dims, lc);
    } else {
      SvmConfig sc = cfg.svm;
      sc.seed = model_seed;
      model = train_svm(xs, ys, dims, sc);
    }
    for (size_t d = 0; d < test.documents.size(); ++d)
      for (size_t i = 0; i < test.documents[d].sentences.size(); ++i)
        counts.observe(model.predict(test_vecs[d][i]),
                       *test.documents[d].sentences[i].gold_label);
  }
  return report_from_counts(counts);
}

// blstm/clstm are the configured slstm with the sentence window and/or
// heading branch switched off.
inline SlstmConfig variant_config(ModelKind kind, SlstmConfig base) {
  if (kind == ModelKind::Clstm) base.heading_branch = false;
  if (kind == ModelKind::Blstm) {
    base.heading_branch = false;
    base.window = 0;
  }
  return base;
}

inline EvalReport eval_neural(ModelKind kind, const ExperimentConfig& cfg,
                              const EmbeddingTable& pretrained,
                              const Corpus& train, const Corpus& test,
                              uint64_t model_seed) {
  SlstmConfig sc = variant_config(kind, cfg.slstm);
  sc.seed = model_seed;
  SlstmModel model = train_slstm(train, pretrained, sc);
  ConfusionCounts counts;
  for (const auto& doc : test.documents) {
    const NeuralDoc enc = model.encode_document(doc);
    const auto pred = model.predict(enc);
    for (size_t i = 0; i < pred.size(); ++i)
      counts.observe(pred[i].first, *doc.sentences[i].gold_label);
  }
  return report_from_counts(counts);
}

inline std::vector<std::vector<std::string>> corpus_token_lists(
    const Corpus& corpus) {
  std::vector<std::vector<std::string>> out;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences) out.push_back(token_words(s.tokens));
  return out;
}

}  // namespace detail

struct MetricRow {
  std::string model;
  std::string label;   // one of the six labels or "macro_smr"
  std::string metric;  // precision | recall | f1
  double mean = 0;
  double stddev = 0;
  std::vector<double> folds;
};

struct PairwiseTest {
  std::string model_a;
  std::string model_b;
  std::string label;
  std::string metric;
  TTestResult test;
};

struct ExperimentReport {
  std::vector<std::string> models;
  int folds = 0;
  std::vector<std::vector<EvalReport>> reports;  // [model][fold]
  std::vector<MetricRow> rows;
  std::vector<PairwiseTest> tests;
};

namespace detail {

inline double fetch_metric(const EvalReport& r, const std::string& label,
                           const std::string& metric) {
  if (label == "macro_smr") return r.macro_f1_targets();
  for (int l = 0; l < kLabelCount; ++l)
    if (kLabelNames[l] == label) {
      const LabelMetrics& m = r.per_label[l];
      if (metric == "precision") return m.precision;
      if (metric == "recall") return m.recall;
      return m.f1;
    }
  throw ConfigError("unknown label '" + label + "'");
}

inline std::vector<std::pair<std::string, std::string>> report_cells() {
  std::vector<std::pair<std::string, std::string>> cells;
  for (int l = 0; l < kLabelCount; ++l)
    for (const char* metric : {"precision", "recall", "f1"})
      cells.emplace_back(kLabelNames[l], metric);
  cells.emplace_back("macro_smr", "f1");
  return cells;
}

}  // namespace detail

// Per-fold train/evaluate for every requested model over a shared document
// split, aggregated to mean/std and pairwise significance tests.
inline ExperimentReport run_experiment(const Corpus& corpus,
                                       const ExperimentConfig& cfg) {
  if (!corpus.labeled) throw DataError("experiment needs a labeled corpus");
  if (cfg.models.empty()) throw ConfigError("no models requested");
  const FoldSplit split = kfold_split(static_cast<int>(corpus.documents.size()), cfg.folds,
                                      derive_seed(cfg.seed, 11));
  const int k = static_cast<int>(split.test_docs.size());
  const bool any_classic =
      std::any_of(cfg.models.begin(), cfg.models.end(),
                  [](ModelKind m) { return !is_neural(m); });
  const bool any_neural =
      std::any_of(cfg.models.begin(), cfg.models.end(),
                  [](ModelKind m) { return is_neural(m); });

  // Global mode fits the featurizer and scores once on every document.
  detail::ClassicFold global_prep;
  if (any_classic && cfg.global_selection) {
    FeatureConfig fc = cfg.features;
    fc.seed = derive_seed(cfg.seed, 19);
    global_prep = detail::fit_classic(corpus, fc);
  }

  ExperimentReport out;
  for (ModelKind m : cfg.models) out.models.push_back(model_kind_name(m));
  out.folds = k;
  out.reports.assign(cfg.models.size(), std::vector<EvalReport>(k));

  detail::parallel_for(k, cfg.jobs, [&](int fold) {
    const Corpus train = make_subcorpus(corpus, split.train_docs(fold));
    const Corpus test = make_subcorpus(corpus, split.test_docs[fold]);

    detail::ClassicFold local_prep;
    const detail::ClassicFold* prep = &global_prep;
    if (any_classic && !cfg.global_selection) {
      FeatureConfig fc = cfg.features;
      fc.seed = derive_seed(cfg.seed, 20 + fold);
      local_prep = detail::fit_classic(train, fc);
      prep = &local_prep;
    }

    EmbeddingTable pretrained;
    if (any_neural) {
      EmbeddingConfig ec = cfg.embedding;
      ec.seed = derive_seed(cfg.seed, 500 + fold);
      pretrained =
          train_word_embeddings(detail::corpus_token_lists(train), ec);
    }

    for (size_t mi = 0; mi < cfg.models.size(); ++mi) {
      const ModelKind kind = cfg.models[mi];
      const uint64_t model_seed =
          derive_seed(cfg.seed, 1000 + 10 * fold + static_cast<int>(kind));
      out.reports[mi][fold] =
          is_neural(kind)
              ? detail::eval_neural(kind, cfg, pretrained, train, test,
                                    model_seed)
              : detail::eval_classic(kind, cfg, *prep, train, test,
                                     model_seed);
    }
  });

  const auto cells = detail::report_cells();
  for (size_t mi = 0; mi < cfg.models.size(); ++mi)
    for (const auto& [label, metric] : cells) {
      MetricRow row;
      row.model = out.models[mi];
      row.label = label;
      row.metric = metric;
      for (int f = 0; f < k; ++f)
        row.folds.push_back(
            detail::fetch_metric(out.reports[mi][f], label, metric));
      double sum = 0;
      for (double v : row.folds) sum += v;
      row.mean = sum / k;
      double ss = 0;
      for (double v : row.folds) ss += (v - row.mean) * (v - row.mean);
      row.stddev = k > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
      out.rows.push_back(std::move(row));
    }

  for (size_t a = 0; a + 1 < cfg.models.size(); ++a)
    for (size_t b = a + 1; b < cfg.models.size(); ++b)
      for (const auto& [label, metric] : cells) {
        std::vector<double> va, vb;
        for (int f = 0; f < k; ++f) {
          va.push_back(detail::fetch_metric(out.reports[a][f], label, metric));
          vb.push_back(detail::fetch_metric(out.reports[b][f], label, metric));
        }
        out.tests.push_back(
            {out.models[a], out.models[b], label, metric, paired_ttest(va, vb)});
      }
  return out;
}

inline void write_experiment_csv(const ExperimentReport& report,
                                 std::ostream& os) {
  os << "model,label,metric,mean,std";
  for (int f = 0; f < report.folds; ++f) os << ",fold_" << f;
  os << '\n';
  os.precision(17);
  for (const auto& row : report.rows) {
    os << row.model << ',' << row.label << ',' << row.metric << ','
       << row.mean << ',' << row.stddev;
    for (double v : row.folds) os << ',' << v;
    os << '\n';
  }
}

inline void write_ttest_csv(const ExperimentReport& report,
                            std::ostream& os) {
  os << "model_a,model_b,label,metric,t,p,stars\n";
  os.precision(17);
  for (const auto& pt : report.tests)
    os << pt.model_a << ',' << pt.model_b << ',' << pt.label << ','
       << pt.metric << ',' << pt.test.t << ',' << pt.test.p << ','
       << significance_stars(pt.test.p) << '\n';
}

// Text table: one row per model, P/R/F1 columns for the three target
// labels; stars mark models significantly below the best mean in a column.
inline void render_experiment_table(const ExperimentReport& report,
                                    std::ostream& os) {
  const std::vector<std::string> labels = {"subject", "method", "result"};
  const std::vector<std::string> metrics = {"precision", "recall", "f1"};
  auto row_of = [&](const std::string& model, const std::string& label,
                    const std::string& metric) -> const MetricRow& {
    for (const auto& r : report.rows)
      if (r.model == model && r.label == label && r.metric == metric)
        return r;
    throw DataError("missing metric row");
  };
  auto pvalue = [&](const std::string& a, const std::string& b,
                    const std::string& label,
                    const std::string& metric) -> double {
    for (const auto& pt : report.tests)
      if (pt.label == label && pt.metric == metric &&
          ((pt.model_a == a && pt.model_b == b) ||
           (pt.model_a == b && pt.model_b == a)))
        return pt.test.p;
    return 1.0;
  };

  os << "Model     ";
  for (const auto& label : labels) {
    std::string name = label;
    name[0] = static_cast<char>(std::toupper(name[0]));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%-30s", name.c_str());
    os << buf;
  }
  os << "\n          ";
  for (size_t i = 0; i < labels.size(); ++i)
    os << "P(%)      R(%)      F1(%)     ";
  os << '\n';

  for (const auto& model : report.models) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-10s", model.c_str());
    os << buf;
    for (const auto& label : labels)
      for (const auto& metric : metrics) {
        const MetricRow& row = row_of(model, label, metric);
        std::string best = report.models.front();
        for (const auto& other : report.models)
          if (row_of(other, label, metric).mean >
              row_of(best, label, metric).mean)
            best = other;
        std::string stars;
        if (best != model)
          stars = significance_stars(pvalue(model, best, label, metric));
        char cell[32];
        std::snprintf(cell, sizeof cell, "%.1f%s", 100.0 * row.mean,
                      stars.c_str());
        std::snprintf(buf, sizeof buf, "%-10s", cell);
        os << buf;
      }
    os << '\n';
  }
  os << "(stars vs the best mean in each column: ***<0.01; **<0.05; *<0.1)\n";
}

inline std::vector<double> default_threshold_grid() {
  return {0.001, 0.003, 0.005, 0.007, 0.009, 0.01, 0.012, 0.015, 0.02};
}

struct SweepRow {
  double threshold = 0;
  std::string model;
  std::string label;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Select -> train -> evaluate per threshold.  The featurizer and scores
// are threshold independent, so each fold fits them once.
inline std::vector<SweepRow> sweep_thresholds(
    const Corpus& corpus, const ExperimentConfig& cfg,
    const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigError("no thresholds given");
  for (ModelKind m : cfg.models)
    if (is_neural(m))
      throw ConfigError("threshold sweep applies to feature-based models");
  if (!corpus.labeled) throw DataError("sweep needs a labeled corpus");
  const FoldSplit split = kfold_split(static_cast<int>(corpus.documents.size()), cfg.folds,
                                      derive_seed(cfg.seed, 11));
  const int k = static_cast<int>(split.test_docs.size());

  detail::ClassicFold global_prep;
  if (cfg.global_selection) {
    FeatureConfig fc = cfg.features;
    fc.seed = derive_seed(cfg.seed, 19);
    global_prep = detail::fit_classic(corpus, fc);
  }

  // reports[threshold][model][fold]
  std::vector<std::vector<std::vector<EvalReport>>> reports(
      thresholds.size(),
      std::vector<std::vector<EvalReport>>(cfg.models.size(),
                                           std::vector<EvalReport>(k)));
  detail::parallel_for(k, cfg.jobs, [&](int fold) {
    const Corpus train = make_subcorpus(corpus, split.train_docs(fold));
    const Corpus test = make_subcorpus(corpus, split.test_docs[fold]);
    detail::ClassicFold local_prep;
    const detail::ClassicFold* prep = &global_prep;
    if (!cfg.global_selection) {
      FeatureConfig fc = cfg.features;
      fc.seed = derive_seed(cfg.seed, 20 + fold);
      local_prep = detail::fit_classic(train, fc);
      prep = &local_prep;
    }
    for (size_t ti = 0; ti < thresholds.size(); ++ti) {
      ExperimentConfig tc = cfg;
      tc.ig_threshold = thresholds[ti];
      for (size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const uint64_t model_seed = derive_seed(
            cfg.seed, 1000 + 10 * fold + static_cast<int>(cfg.models[mi]));
        reports[ti][mi][fold] = detail::eval_classic(
            cfg.models[mi], tc, *prep, train, test, model_seed);
      }
    }
  });

  std::vector<SweepRow> out;
  std::vector<std::string> labels(std::begin(kLabelNames),
                                  std::end(kLabelNames));
  labels.push_back("macro_smr");
  for (size_t ti = 0; ti < thresholds.size(); ++ti)
    for (size_t mi = 0; mi < cfg.models.size(); ++mi)
      for (const auto& label : labels) {
        SweepRow row;
        row.threshold = thresholds[ti];
        row.model = model_kind_name(cfg.models[mi]);
        row.label = label;
        double p = 0, r = 0, f = 0;
        for (int fold = 0; fold < k; ++fold) {
          const EvalReport& rep = reports[ti][mi][fold];
          if (label == "macro_smr") {
            f += rep.macro_f1_targets();
          } else {
            p += detail::fetch_metric(rep, label, "precision");
            r += detail::fetch_metric(rep, label, "recall");
            f += detail::fetch_metric(rep, label, "f1");
          }
        }
        row.precision = p / k;
        row.recall = r / k;
        row.f1 = f / k;
        out.push_back(std::move(row));
      }
  return out;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            std::ostream& os) {
  os << "threshold,model,label,precision,recall,f1\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.threshold << ',' << r.model << ',' << r.label << ','
       << r.precision << ',' << r.recall << ',' << r.f1 << '\n';
}

}  // namespace secmark
