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

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secmark/cluster.hpp"
#include "secmark/config.hpp"
#include "secmark/corpus.hpp"
#include "secmark/downstream.hpp"
#include "secmark/embedding.hpp"
#include "secmark/errors.hpp"
#include "secmark/experiment.hpp"
#include "secmark/segmentation.hpp"
#include "secmark/serialize.hpp"
#include "secmark/slstm.hpp"
#include "secmark/synthetic.hpp"

namespace {

using namespace secmark;

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  bool paper_defaults = false;
  bool no_timestamp = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--config", c->config_path, "key/value config file");
  cmd->add_option("--seed", c->seed, "global random seed");
  cmd->add_flag("--paper-defaults", c->paper_defaults,
                "published hyperparameter setting");
  cmd->add_flag("--no-timestamp", c->no_timestamp,
                "omit timestamp lines from text reports");
  cmd->add_option("--jobs", c->jobs, "worker threads for fold parallelism");
}

ExperimentConfig make_experiment(const CommonOpts& c) {
  ExperimentConfig cfg =
      c.paper_defaults ? paper_default_experiment() : ExperimentConfig{};
  if (!c.config_path.empty())
    apply_config(RunConfig::load(c.config_path), &cfg);
  cfg.seed = resolve_seed(c.seed);
  cfg.jobs = c.jobs;
  return cfg;
}

void stamp(std::ostream& os, const CommonOpts& c) {
  if (c.no_timestamp) return;
  std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S",
                std::localtime(&now));
  os << "# generated " << buf << '\n';
}

void require_tokens(const Corpus& corpus) {
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences)
      if (!s.tokens.empty()) return;
  throw DataError("corpus has no tokens; run `secmark segment` first");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write '" + path + "'");
  return os;
}

std::vector<std::vector<SectionLabel>> predict_with_bundle(
    const ModelReader& file, const Corpus& corpus) {
  const std::string kind = bundle_kind(file);
  std::vector<std::vector<SectionLabel>> out;
  if (kind == "slstm") {
    const SlstmModel model = load_slstm_bundle(file);
    for (const auto& doc : corpus.documents) {
      std::vector<SectionLabel> labels;
      for (const auto& pr : model.predict(model.encode_document(doc)))
        labels.push_back(pr.first);
      out.push_back(std::move(labels));
    }
    return out;
  }
  const ClassicBundle bundle = load_classic_bundle(file);
  for (const auto& doc : corpus.documents) {
    std::vector<SparseVec> vecs;
    for (auto& v : bundle.featurizer.transform_document(doc))
      vecs.push_back(project(v, bundle.selection));
    std::vector<SectionLabel> labels;
    if (bundle.model_kind == "crf") {
      labels = bundle.crf.predict(vecs);
    } else {
      for (const auto& v : vecs) labels.push_back(bundle.linear.predict(v));
    }
    out.push_back(std::move(labels));
  }
  return out;
}

// Per-document kept sentences for the co-occurrence study.
std::vector<std::vector<Sentence>> kept_sentences(const Corpus& corpus,
                                                  bool all_sentences) {
  std::vector<std::vector<Sentence>> papers;
  for (const auto& doc : corpus.documents)
    papers.push_back(all_sentences ? doc.sentences : filter_sentences(doc));
  return papers;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"section labeling pipeline for Chinese medical papers"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "split raw paragraph documents into sentences");
  std::string in_path, out_path;
  ingest->add_option("--input", in_path, "raw corpus JSONL")->required();
  ingest->add_option("--output", out_path, "sentence corpus JSONL")
      ->required();
  ingest->callback([&]() {
    const Corpus corpus = load_corpus(in_path);
    save_corpus(corpus, out_path);
  });

  // segment
  auto* segment_cmd = app.add_subcommand(
      "segment", "tokenize sentences and detect section headings");
  std::string seg_in, seg_out, seg_lex;
  segment_cmd->add_option("--input", seg_in, "corpus JSONL")->required();
  segment_cmd->add_option("--lexicon", seg_lex, "word<TAB>pos<TAB>freq TSV")
      ->required();
  segment_cmd->add_option("--output", seg_out, "tokenized corpus JSONL")
      ->required();
  segment_cmd->callback([&]() {
    Corpus corpus = load_corpus(seg_in);
    const Lexicon lex = load_lexicon(seg_lex);
    segment_corpus(&corpus, lex);
    save_corpus(corpus, seg_out);
  });

  // featurize
  auto* featurize = app.add_subcommand(
      "featurize", "fit the feature pipeline and store it");
  CommonOpts feat_common;
  std::string feat_in, feat_out, feat_space;
  add_common(featurize, &feat_common);
  featurize->add_option("--input", feat_in, "tokenized corpus JSONL")
      ->required();
  featurize->add_option("--output", feat_out, "featurizer model file")
      ->required();
  featurize->add_option("--space", feat_space,
                        "also write feature names, one per line");
  featurize->callback([&]() {
    const Corpus corpus = load_corpus(feat_in);
    require_tokens(corpus);
    ExperimentConfig cfg = make_experiment(feat_common);
    cfg.features.seed = cfg.seed;
    FeatureExtractor fx;
    fx.fit(corpus, cfg.features);
    ModelWriter out;
    ByteWriter w;
    write_extractor(fx, &w);
    out.add("featurizer", w.take());
    out.save(feat_out);
    if (!feat_space.empty()) {
      auto os = open_out(feat_space);
      export_feature_space(fx.space(), os);
    }
  });

  // select
  auto* select_cmd = app.add_subcommand(
      "select", "score features by information gain");
  std::string sel_in, sel_fx, sel_out, sel_space;
  double sel_threshold = -1.0;
  select_cmd->add_option("--input", sel_in, "labeled tokenized corpus JSONL")
      ->required();
  select_cmd->add_option("--featurizer", sel_fx, "featurizer model file")
      ->required();
  select_cmd->add_option("--output", sel_out, "score TSV (feature<TAB>ig)")
      ->required();
  select_cmd->add_option("--threshold", sel_threshold,
                         "also apply this threshold");
  select_cmd->add_option("--space", sel_space,
                         "write surviving feature names, one per line");
  select_cmd->callback([&]() {
    const Corpus corpus = load_corpus(sel_in);
    const ModelReader file = ModelReader::load(sel_fx);
    ByteReader r(file.section("featurizer"));
    const FeatureExtractor fx = read_extractor(&r);
    std::vector<SparseVec> xs;
    std::vector<SectionLabel> ys;
    detail::flatten_labeled(corpus, fx.transform(corpus), &xs, &ys);
    const auto scores = information_gain(xs, ys, fx.space());
    {
      auto os = open_out(sel_out);
      dump_scores(scores, os);
    }
    if (!sel_space.empty()) {
      if (sel_threshold < 0)
        throw ConfigError("--space needs --threshold");
      const Selection sel =
          select_features(scores, fx.space(), sel_threshold);
      auto os = open_out(sel_space);
      export_feature_space(sel.space, os);
    }
  });

  // train
  auto* train = app.add_subcommand("train", "train one model on a corpus");
  CommonOpts train_common;
  std::string train_in, train_out, train_model = "crf", train_emb, train_log;
  double train_threshold = -1.0;
  add_common(train, &train_common);
  train->add_option("--input", train_in, "labeled tokenized corpus JSONL")
      ->required();
  train->add_option("--model", train_model,
                    "lr|svm|crf|blstm|clstm|slstm");
  train->add_option("--output", train_out, "model bundle file")->required();
  train->add_option("--threshold", train_threshold,
                    "information-gain selection threshold");
  train->add_option("--embeddings", train_emb,
                    "pretrained embedding file for the neural models");
  train->add_option("--log", train_log, "training log CSV");
  train->callback([&]() {
    const ModelKind kind = parse_model_kind(train_model);
    const Corpus corpus = load_corpus(train_in);
    require_tokens(corpus);
    if (!corpus.labeled) throw DataError("training needs a labeled corpus");
    ExperimentConfig cfg = make_experiment(train_common);
    if (train_threshold >= 0) cfg.ig_threshold = train_threshold;

    if (is_neural(kind)) {
      EmbeddingTable pretrained;
      if (!train_emb.empty()) {
        pretrained = load_embeddings(train_emb);
      } else {
        EmbeddingConfig ec = cfg.embedding;
        ec.seed = derive_seed(cfg.seed, 500);
        pretrained =
            train_word_embeddings(detail::corpus_token_lists(corpus), ec);
      }
      SlstmConfig sc = detail::variant_config(kind, cfg.slstm);
      sc.seed = derive_seed(cfg.seed, 1000 + static_cast<int>(kind));
      std::vector<TrainLogRow> log;
      const SlstmModel model =
          train_slstm(corpus, pretrained, sc, &log);
      save_slstm_bundle(model, train_out);
      if (!train_log.empty()) {
        auto os = open_out(train_log);
        write_training_log(log, os);
      }
      return;
    }

    FeatureConfig fc = cfg.features;
    fc.seed = derive_seed(cfg.seed, 19);
    detail::ClassicFold prep = detail::fit_classic(corpus, fc);
    ClassicBundle bundle;
    bundle.model_kind = model_kind_name(kind);
    bundle.selection =
        select_features(prep.scores, prep.fx.space(), cfg.ig_threshold);
    if (bundle.selection.space.size() == 0)
      throw DataError("selection threshold removed every feature");
    const auto vecs =
        detail::project_all(prep.fx.transform(corpus), bundle.selection);
    const int dims = bundle.selection.space.size();
    const uint64_t model_seed =
        derive_seed(cfg.seed, 1000 + static_cast<int>(kind));
    if (kind == ModelKind::Crf) {
      std::vector<std::vector<SectionLabel>> labels;
      for (const auto& doc : corpus.documents) {
        std::vector<SectionLabel> seq;
        for (const auto& s : doc.sentences) seq.push_back(*s.gold_label);
        labels.push_back(std::move(seq));
      }
      CrfConfig cc = cfg.crf;
      cc.seed = model_seed;
      bundle.crf = crf_train(vecs, labels, dims, cc);
    } else {
      std::vector<SparseVec> xs;
      std::vector<SectionLabel> ys;
      detail::flatten_labeled(corpus, vecs, &xs, &ys);
      if (kind == ModelKind::Lr) {
        LogRegConfig lc = cfg.logreg;
        lc.seed = model_seed;
        bundle.linear = train_logreg(xs, ys, dims, lc);
      } else {
        SvmConfig sc = cfg.svm;
        sc.seed = model_seed;
        bundle.linear = train_svm(xs, ys, dims, sc);
      }
    }
    bundle.featurizer = std::move(prep.fx);
    save_classic_bundle(bundle, train_out);
  });

  // predict
  auto* predict = app.add_subcommand(
      "predict", "label a corpus with a trained model");
  std::string pred_in, pred_model, pred_out;
  predict->add_option("--input", pred_in, "tokenized corpus JSONL")
      ->required();
  predict->add_option("--model", pred_model, "model bundle file")->required();
  predict->add_option("--output", pred_out, "labeled corpus JSONL")
      ->required();
  predict->callback([&]() {
    Corpus corpus = load_corpus(pred_in);
    require_tokens(corpus);
    const ModelReader file = ModelReader::load(pred_model);
    const auto labels = predict_with_bundle(file, corpus);
    for (size_t d = 0; d < corpus.documents.size(); ++d)
      for (size_t i = 0; i < corpus.documents[d].sentences.size(); ++i)
        corpus.documents[d].sentences[i].gold_label = labels[d][i];
    refresh_labeled_flag(&corpus);
    save_corpus(corpus, pred_out);
  });

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "k-fold cross-validated comparison of models");
  CommonOpts eval_common;
  std::string eval_in, eval_models = "lr,svm,crf", eval_dir = ".";
  int eval_k = 0;
  double eval_threshold = -1.0;
  bool eval_paper_mode = false;
  add_common(evaluate, &eval_common);
  evaluate->add_option("--input", eval_in, "labeled tokenized corpus JSONL")
      ->required();
  evaluate->add_option("--models", eval_models,
                       "comma list of lr|svm|crf|blstm|clstm|slstm");
  evaluate->add_option("--k", eval_k, "fold count");
  evaluate->add_option("--threshold", eval_threshold,
                       "information-gain selection threshold");
  evaluate->add_flag("--paper-mode", eval_paper_mode,
                     "fit features and selection once on all documents");
  evaluate->add_option("--output-dir", eval_dir, "report directory");
  evaluate->callback([&]() {
    const std::vector<ModelKind> models = parse_model_list(eval_models);
    const Corpus corpus = load_corpus(eval_in);
    require_tokens(corpus);
    ExperimentConfig cfg = make_experiment(eval_common);
    cfg.models = models;
    if (eval_k > 0) cfg.folds = eval_k;
    if (eval_threshold >= 0) cfg.ig_threshold = eval_threshold;
    if (eval_paper_mode) cfg.global_selection = true;
    const ExperimentReport report = run_experiment(corpus, cfg);
    std::filesystem::create_directories(eval_dir);
    {
      auto os = open_out(eval_dir + "/report.csv");
      write_experiment_csv(report, os);
    }
    {
      auto os = open_out(eval_dir + "/ttests.csv");
      write_ttest_csv(report, os);
    }
    {
      auto os = open_out(eval_dir + "/table.txt");
      stamp(os, eval_common);
      render_experiment_table(report, os);
    }
    render_experiment_table(report, std::cout);
  });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "selection-threshold sweep for the feature-based models");
  CommonOpts sweep_common;
  std::string sweep_in, sweep_models = "crf", sweep_out,
              sweep_thresholds_csv;
  int sweep_k = 0;
  bool sweep_paper_mode = false;
  add_common(sweep, &sweep_common);
  sweep->add_option("--input", sweep_in, "labeled tokenized corpus JSONL")
      ->required();
  sweep->add_option("--models", sweep_models, "comma list of lr|svm|crf");
  sweep->add_option("--k", sweep_k, "fold count");
  sweep->add_option("--thresholds", sweep_thresholds_csv,
                    "comma list of thresholds");
  sweep->add_flag("--paper-mode", sweep_paper_mode,
                  "fit features and selection once on all documents");
  sweep->add_option("--output", sweep_out, "sweep CSV")->required();
  sweep->callback([&]() {
    const std::vector<ModelKind> models = parse_model_list(sweep_models);
    const Corpus corpus = load_corpus(sweep_in);
    require_tokens(corpus);
    ExperimentConfig cfg = make_experiment(sweep_common);
    cfg.models = models;
    if (sweep_k > 0) cfg.folds = sweep_k;
    if (sweep_paper_mode) cfg.global_selection = true;
    std::vector<double> grid = default_threshold_grid();
    if (!sweep_thresholds_csv.empty()) {
      grid.clear();
      size_t start = 0;
      while (start <= sweep_thresholds_csv.size()) {
        size_t comma = sweep_thresholds_csv.find(',', start);
        if (comma == std::string::npos) comma = sweep_thresholds_csv.size();
        const std::string item = utf8::trim(
            sweep_thresholds_csv.substr(start, comma - start));
        if (!item.empty()) {
          try {
            grid.push_back(std::stod(item));
          } catch (const std::exception&) {
            throw ConfigError("bad threshold '" + item + "'");
          }
        }
        start = comma + 1;
      }
    }
    const auto rows = sweep_thresholds(corpus, cfg, grid);
    auto os = open_out(sweep_out);
    write_sweep_csv(rows, os);
  });

  // embed
  auto* embed = app.add_subcommand(
      "embed", "train word embeddings on an unlabeled corpus");
  CommonOpts embed_common;
  std::string embed_in, embed_out;
  add_common(embed, &embed_common);
  embed->add_option("--input", embed_in, "tokenized corpus JSONL")
      ->required();
  embed->add_option("--output", embed_out, "embedding text file")->required();
  embed->callback([&]() {
    const Corpus corpus = load_corpus(embed_in);
    require_tokens(corpus);
    ExperimentConfig cfg = make_experiment(embed_common);
    EmbeddingConfig ec = cfg.embedding;
    ec.seed = derive_seed(cfg.seed, 500);
    const EmbeddingTable table =
        train_word_embeddings(detail::corpus_token_lists(corpus), ec);
    save_embeddings(table, embed_out);
  });

  // cluster
  auto* cluster_cmd = app.add_subcommand(
      "cluster", "k-means plus 2-D projection of word embeddings");
  CommonOpts cluster_common;
  std::string cluster_emb, cluster_out;
  int cluster_k = 5;
  add_common(cluster_cmd, &cluster_common);
  cluster_cmd->add_option("--embeddings", cluster_emb, "embedding text file")
      ->required();
  cluster_cmd->add_option("--k", cluster_k, "cluster count");
  cluster_cmd->add_option("--output", cluster_out,
                          "CSV word,cluster,pc1,pc2")
      ->required();
  cluster_cmd->callback([&]() {
    const EmbeddingTable table = load_embeddings(cluster_emb);
    std::vector<std::vector<double>> vectors;
    for (int id = 1; id <= table.word_count(); ++id) {
      const double* r = table.row(id);
      vectors.emplace_back(r, r + table.dim());
    }
    const uint64_t seed = resolve_seed(cluster_common.seed);
    const ClusterResult result =
        cluster_embeddings(vectors, cluster_k, seed);
    auto os = open_out(cluster_out);
    os << "word,cluster,pc1,pc2\n";
    os.precision(17);
    for (size_t i = 0; i < vectors.size(); ++i)
      os << table.words()[i] << ',' << result.assignment[i] << ','
         << result.projection[i][0] << ',' << result.projection[i][1]
         << '\n';
  });

  // extract
  auto* extract = app.add_subcommand(
      "extract", "dictionary entities per paper from kept sections");
  std::string ext_in, ext_dict, ext_out;
  bool ext_all = false;
  extract->add_option("--input", ext_in, "labeled corpus JSONL")->required();
  extract->add_option("--dict", ext_dict, "surface<TAB>category TSV")
      ->required();
  extract->add_option("--output", ext_out, "CSV doc_id,entity,category")
      ->required();
  extract->add_flag("--all-sentences", ext_all,
                    "skip the Subject/Method/Result filter");
  extract->callback([&]() {
    const Corpus corpus = load_corpus(ext_in);
    const EntityDictionary dict = load_entity_dictionary(ext_dict);
    const auto papers = kept_sentences(corpus, ext_all);
    auto os = open_out(ext_out);
    os << "doc_id,entity,category\n";
    for (size_t d = 0; d < corpus.documents.size(); ++d)
      for (const auto& e : extract_entities(papers[d], dict))
        os << corpus.documents[d].id << ',' << e.surface << ','
           << e.category << '\n';
  });

  // cooccur
  auto* cooccur = app.add_subcommand(
      "cooccur", "within-paper entity co-occurrence network");
  std::string co_in, co_dict, co_out, co_overlap, co_thresholds = "0,2,5,10,20";
  long long co_min = 0;
  bool co_all = false, co_sentence = false;
  cooccur->add_option("--input", co_in, "labeled corpus JSONL")->required();
  cooccur->add_option("--dict", co_dict, "surface<TAB>category TSV")
      ->required();
  cooccur->add_option("--output", co_out, "edge list CSV")->required();
  cooccur->add_option("--min-count", co_min,
                      "keep pairs with count strictly above this");
  cooccur->add_flag("--all-sentences", co_all,
                    "count over every sentence instead of kept sections");
  cooccur->add_flag("--sentence-level", co_sentence,
                    "pairs must share a sentence, counted per sentence");
  cooccur->add_option("--overlap", co_overlap,
                      "also write filtered-vs-unfiltered overlap CSV");
  cooccur->add_option("--thresholds", co_thresholds,
                      "comma list of overlap thresholds");
  cooccur->callback([&]() {
    const Corpus corpus = load_corpus(co_in);
    const EntityDictionary dict = load_entity_dictionary(co_dict);
    const CooccurrenceTable table = build_cooccurrence(
        kept_sentences(corpus, co_all), dict, co_sentence);
    {
      auto os = open_out(co_out);
      export_edges(table, co_min, os);
    }
    if (!co_overlap.empty()) {
      const CooccurrenceTable unfiltered = build_cooccurrence(
          kept_sentences(corpus, true), dict, co_sentence);
      const CooccurrenceTable filtered = build_cooccurrence(
          kept_sentences(corpus, false), dict, co_sentence);
      std::vector<long long> ts;
      size_t start = 0;
      while (start <= co_thresholds.size()) {
        size_t comma = co_thresholds.find(',', start);
        if (comma == std::string::npos) comma = co_thresholds.size();
        const std::string item =
            utf8::trim(co_thresholds.substr(start, comma - start));
        if (!item.empty()) {
          try {
            ts.push_back(std::stoll(item));
          } catch (const std::exception&) {
            throw ConfigError("bad threshold '" + item + "'");
          }
        }
        start = comma + 1;
      }
      const auto rows = threshold_overlap_stats(unfiltered, filtered, ts);
      auto os = open_out(co_overlap);
      write_overlap_report(rows, os);
    }
  });

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate the synthetic evaluation corpus");
  CommonOpts synth_common;
  std::string synth_out;
  int synth_docs = 0;
  double synth_ambiguous = -1.0, synth_heading = -1.0, synth_noise = -1.0;
  add_common(synth, &synth_common);
  synth->add_option("--output", synth_out, "corpus JSONL")->required();
  synth->add_option("--docs", synth_docs, "document count");
  synth->add_option("--ambiguous-prob", synth_ambiguous,
                    "chance a sentence wears another label's vocabulary");
  synth->add_option("--heading-prob", synth_heading,
                    "chance a label block opens with a heading");
  synth->add_option("--noise-token-prob", synth_noise,
                    "chance a token comes from the shared noise pool");
  synth->callback([&]() {
    SynthesisConfig cfg;
    if (!synth_common.config_path.empty())
      apply_config(RunConfig::load(synth_common.config_path), &cfg);
    cfg.seed = resolve_seed(synth_common.seed);
    if (synth_docs > 0) cfg.n_docs = synth_docs;
    if (synth_ambiguous >= 0) cfg.ambiguous_prob = synth_ambiguous;
    if (synth_heading >= 0) cfg.heading_prob = synth_heading;
    if (synth_noise >= 0) cfg.noise_token_prob = synth_noise;
    const Corpus corpus = generate_synthetic_corpus(cfg);
    save_corpus(corpus, synth_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: usage: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ShapeError& e) {
    std::cerr << "error: numeric: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 3;
  }
}
