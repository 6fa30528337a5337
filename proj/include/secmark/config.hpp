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

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secmark/errors.hpp"
#include "secmark/experiment.hpp"
#include "secmark/synthetic.hpp"
#include "secmark/utf8.hpp"

namespace secmark {

// Sectioned key/value text config.  Keys are stored as "section.key";
// later assignments win.
class RunConfig {
 public:
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_str(const std::string& key,
                      const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      size_t used = 0;
      long long v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + it->second +
                        "' is not an integer");
    }
  }

  double get_real(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + it->second +
                        "' is not a number");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': '" + v +
                      "' is not a boolean");
  }

  uint64_t get_seed(const std::string& key, uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      size_t used = 0;
      uint64_t v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + it->second +
                        "' is not a seed");
    }
  }

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  static RunConfig parse(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string t = utf8::trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']' || t.size() < 3)
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header");
        section = utf8::trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": empty section name");
        continue;
      }
      const size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      std::string key = utf8::trim(t.substr(0, eq));
      std::string value = utf8::trim(t.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
  }

 private:
  std::map<std::string, std::string> entries_;
};

inline std::vector<ModelKind> parse_model_list(const std::string& csv) {
  std::vector<ModelKind> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    std::string name = utf8::trim(csv.substr(start, comma - start));
    if (!name.empty()) out.push_back(parse_model_kind(name));
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty model list");
  return out;
}

// Global seed resolution order: explicit value, then SECMARK_SEED, then 42.
inline uint64_t resolve_seed(std::optional<uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("SECMARK_SEED")) {
    try {
      size_t used = 0;
      const std::string s(env);
      uint64_t v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("SECMARK_SEED is not a valid seed");
    }
  }
  return 42;
}

// Published hyperparameter setting: selection threshold 0.009, 10 folds,
// LDA/doc2vec at 40, 200-dim embeddings, the 0.001/0.2/128/200/3 network
// schedule.  Most values coincide with the struct defaults.
inline ExperimentConfig paper_default_experiment() {
  ExperimentConfig cfg;
  cfg.ig_threshold = 0.009;
  cfg.folds = 10;
  return cfg;
}

inline void apply_config(const RunConfig& rc, ExperimentConfig* cfg) {
  if (rc.has("experiment.models"))
    cfg->models = parse_model_list(rc.get_str("experiment.models", ""));
  cfg->ig_threshold =
      rc.get_real("experiment.ig_threshold", cfg->ig_threshold);
  cfg->global_selection =
      rc.get_bool("experiment.global_selection", cfg->global_selection);
  cfg->folds = static_cast<int>(rc.get_int("experiment.folds", cfg->folds));
  cfg->seed = rc.get_seed("experiment.seed", cfg->seed);
  cfg->jobs = static_cast<int>(rc.get_int("experiment.jobs", cfg->jobs));

  FeatureFamilies& fam = cfg->features.families;
  fam.bow = rc.get_bool("features.bow", fam.bow);
  fam.pos = rc.get_bool("features.pos", fam.pos);
  fam.lda = rc.get_bool("features.lda", fam.lda);
  fam.d2v = rc.get_bool("features.d2v", fam.d2v);
  fam.head = rc.get_bool("features.head", fam.head);
  fam.loc = rc.get_bool("features.loc", fam.loc);
  fam.len = rc.get_bool("features.len", fam.len);
  cfg->features.min_count = static_cast<int>(
      rc.get_int("features.min_count", cfg->features.min_count));

  LdaConfig& lda = cfg->features.lda;
  lda.topics = static_cast<int>(rc.get_int("lda.topics", lda.topics));
  lda.alpha = rc.get_real("lda.alpha", lda.alpha);
  lda.beta = rc.get_real("lda.beta", lda.beta);
  lda.train_iters =
      static_cast<int>(rc.get_int("lda.train_iters", lda.train_iters));
  lda.infer_iters =
      static_cast<int>(rc.get_int("lda.infer_iters", lda.infer_iters));

  Doc2VecConfig& d2v = cfg->features.d2v;
  d2v.dim = static_cast<int>(rc.get_int("d2v.dim", d2v.dim));
  d2v.negatives = static_cast<int>(rc.get_int("d2v.negatives", d2v.negatives));
  d2v.epochs = static_cast<int>(rc.get_int("d2v.epochs", d2v.epochs));
  d2v.lr = rc.get_real("d2v.lr", d2v.lr);

  cfg->logreg.l2 = rc.get_real("logreg.l2", cfg->logreg.l2);
  cfg->logreg.lr = rc.get_real("logreg.lr", cfg->logreg.lr);
  cfg->logreg.epochs =
      static_cast<int>(rc.get_int("logreg.epochs", cfg->logreg.epochs));
  cfg->logreg.batch =
      static_cast<int>(rc.get_int("logreg.batch", cfg->logreg.batch));

  cfg->svm.c = rc.get_real("svm.c", cfg->svm.c);
  cfg->svm.epochs =
      static_cast<int>(rc.get_int("svm.epochs", cfg->svm.epochs));

  cfg->crf.l2 = rc.get_real("crf.l2", cfg->crf.l2);
  if (rc.has("crf.window")) {
    const int radius = static_cast<int>(rc.get_int("crf.window", 2));
    cfg->crf.tmpl = CrfTemplate::window(radius);
  }
  cfg->crf.optimizer.max_iters = static_cast<int>(
      rc.get_int("crf.max_iters", cfg->crf.optimizer.max_iters));
  cfg->crf.optimizer.grad_tol =
      rc.get_real("crf.grad_tol", cfg->crf.optimizer.grad_tol);

  SlstmConfig& sl = cfg->slstm;
  sl.window = static_cast<int>(rc.get_int("slstm.window", sl.window));
  sl.hidden = static_cast<int>(rc.get_int("slstm.hidden", sl.hidden));
  sl.heading_filters = static_cast<int>(
      rc.get_int("slstm.heading_filters", sl.heading_filters));
  sl.kernel = static_cast<int>(rc.get_int("slstm.kernel", sl.kernel));
  sl.sent_len = static_cast<int>(rc.get_int("slstm.sent_len", sl.sent_len));
  sl.head_len = static_cast<int>(rc.get_int("slstm.head_len", sl.head_len));
  sl.dropout = rc.get_real("slstm.dropout", sl.dropout);
  sl.lr = rc.get_real("slstm.lr", sl.lr);
  sl.batch = static_cast<int>(rc.get_int("slstm.batch", sl.batch));
  sl.heading_branch =
      rc.get_bool("slstm.heading_branch", sl.heading_branch);
  sl.mean_pool = rc.get_bool("slstm.mean_pool", sl.mean_pool);
  sl.freeze_embeddings =
      rc.get_bool("slstm.freeze_embeddings", sl.freeze_embeddings);
  sl.max_epochs =
      static_cast<int>(rc.get_int("slstm.max_epochs", sl.max_epochs));
  sl.patience = static_cast<int>(rc.get_int("slstm.patience", sl.patience));
  sl.valid_fraction =
      rc.get_real("slstm.valid_fraction", sl.valid_fraction);

  EmbeddingConfig& em = cfg->embedding;
  em.dim = static_cast<int>(rc.get_int("embedding.dim", em.dim));
  em.window = static_cast<int>(rc.get_int("embedding.window", em.window));
  em.negatives =
      static_cast<int>(rc.get_int("embedding.negatives", em.negatives));
  em.epochs = static_cast<int>(rc.get_int("embedding.epochs", em.epochs));
  em.lr = rc.get_real("embedding.lr", em.lr);
  em.min_count =
      static_cast<int>(rc.get_int("embedding.min_count", em.min_count));
}

inline void apply_config(const RunConfig& rc, SynthesisConfig* cfg) {
  cfg->n_docs = static_cast<int>(rc.get_int("synth.docs", cfg->n_docs));
  cfg->seed = rc.get_seed("synth.seed", cfg->seed);
  cfg->min_sentences = static_cast<int>(
      rc.get_int("synth.min_sentences", cfg->min_sentences));
  cfg->max_sentences = static_cast<int>(
      rc.get_int("synth.max_sentences", cfg->max_sentences));
  cfg->min_tokens =
      static_cast<int>(rc.get_int("synth.min_tokens", cfg->min_tokens));
  cfg->max_tokens =
      static_cast<int>(rc.get_int("synth.max_tokens", cfg->max_tokens));
  cfg->signal_words_per_label = static_cast<int>(
      rc.get_int("synth.signal_words", cfg->signal_words_per_label));
  cfg->heading_words_per_label = static_cast<int>(
      rc.get_int("synth.heading_words", cfg->heading_words_per_label));
  cfg->noise_words =
      static_cast<int>(rc.get_int("synth.noise_words", cfg->noise_words));
  cfg->noise_token_prob =
      rc.get_real("synth.noise_token_prob", cfg->noise_token_prob);
  cfg->ambiguous_prob =
      rc.get_real("synth.ambiguous_prob", cfg->ambiguous_prob);
  cfg->heading_prob = rc.get_real("synth.heading_prob", cfg->heading_prob);
}

}  // namespace secmark
