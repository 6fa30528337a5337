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

#include <map>
#include <string>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/doc2vec.hpp"
#include "secmark/errors.hpp"
#include "secmark/lda.hpp"
#include "secmark/rng.hpp"
#include "secmark/sparse.hpp"
#include "secmark/utf8.hpp"
#include "secmark/vocab.hpp"

namespace secmark {

// Tokens as plain words.
inline std::vector<std::string> token_words(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

// Tokens as "word/tag" pairs.
inline std::vector<std::string> token_pairs(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text + "/" + t.pos);
  return out;
}

// Raw in-vocabulary counts, keyed by namespaced feature name.
inline std::map<std::string, double> bow_features(
    const std::vector<Token>& tokens, const Vocabulary& vocab) {
  std::map<std::string, double> out;
  for (const auto& t : tokens)
    if (vocab.contains(t.text)) out["bow:" + t.text] += 1.0;
  return out;
}

inline std::map<std::string, double> pos_features(
    const std::vector<Token>& tokens, const Vocabulary& pair_vocab) {
  std::map<std::string, double> out;
  for (const auto& t : tokens) {
    const std::string pair = t.text + "/" + t.pos;
    if (pair_vocab.contains(pair)) out["pos:" + pair] += 1.0;
  }
  return out;
}

// BOW over the governing heading's tokens. Heading sentences use their own
// text; sentences before any heading get nothing.
inline std::map<std::string, double> heading_features(
    const std::vector<Token>& heading_tokens, const Vocabulary& head_vocab) {
  std::map<std::string, double> out;
  for (const auto& t : heading_tokens)
    if (head_vocab.contains(t.text)) out["head:" + t.text] += 1.0;
  return out;
}

inline double position_feature(int i, int n) {
  if (i < 0 || i >= n)
    throw DataError("sentence index " + std::to_string(i) +
                    " out of range for document of " + std::to_string(n) +
                    " sentences");
  if (n == 1) return 0.0;
  return static_cast<double>(i) / (n - 1);
}

// (character count, token count); characters are Unicode scalars including
// punctuation.
inline std::pair<int, int> length_features(const Sentence& s) {
  return {static_cast<int>(utf8::codepoint_count(s.text)),
          static_cast<int>(s.tokens.size())};
}

struct FeatureFamilies {
  bool bow = true;
  bool pos = true;
  bool lda = true;
  bool d2v = true;
  bool head = true;
  bool loc = true;
  bool len = true;
};

struct FeatureConfig {
  FeatureFamilies families;
  int min_count = 1;
  LdaConfig lda;
  Doc2VecConfig d2v;
  uint64_t seed = 42;
};

namespace detail {

inline uint64_t fnv1a(const std::vector<std::string>& parts) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& p : parts) {
    for (unsigned char c : p) mix(c);
    mix(0x1f);
  }
  return h;
}

}  // namespace detail

// Fits family vocabularies and sub-models on a segmented corpus, then maps
// sentences into one global feature space. Transform is a pure function of
// the fitted state, so identical inputs give identical vectors.
class FeatureExtractor {
 public:
  void fit(const Corpus& corpus, const FeatureConfig& config) {
    config_ = config;
    std::vector<std::vector<std::string>> word_lists;
    std::vector<std::vector<std::string>> pair_lists;
    std::vector<std::vector<std::string>> head_lists;
    for (const auto& doc : corpus.documents)
      for (const auto& s : doc.sentences) {
        word_lists.push_back(token_words(s.tokens));
        pair_lists.push_back(token_pairs(s.tokens));
        if (s.is_heading) head_lists.push_back(token_words(s.tokens));
      }
    if (word_lists.empty()) throw DataError("empty corpus");

    const FeatureFamilies& fam = config.families;
    if (fam.bow) bow_vocab_ = build_vocabulary(word_lists, config.min_count);
    if (fam.pos) pos_vocab_ = build_vocabulary(pair_lists, config.min_count);
    if (fam.head) head_vocab_ = build_vocabulary(head_lists, 1);
    if (fam.lda) {
      LdaConfig lc = config.lda;
      lc.seed = derive_seed(config.seed, 1);
      lda_.train(word_lists, lc);
    }
    if (fam.d2v) {
      Doc2VecConfig dc = config.d2v;
      dc.seed = derive_seed(config.seed, 2);
      d2v_.train(word_lists, dc);
    }
    rebuild_space();
  }

  // Registers dimensions in the fixed family order: bow, pos, lda, d2v,
  // head, loc, len.
  void rebuild_space() {
    space_ = FeatureSpace();
    const FeatureFamilies& fam = config_.families;
    if (fam.bow)
      for (const auto& w : bow_vocab_.words()) space_.intern("bow:" + w);
    if (fam.pos)
      for (const auto& p : pos_vocab_.words()) space_.intern("pos:" + p);
    if (fam.lda)
      for (int k = 0; k < lda_.topics(); ++k)
        space_.intern("lda:" + std::to_string(k));
    if (fam.d2v)
      for (int j = 0; j < config_.d2v.dim; ++j)
        space_.intern("d2v:" + std::to_string(j));
    if (fam.head)
      for (const auto& w : head_vocab_.words()) space_.intern("head:" + w);
    if (fam.loc) space_.intern("loc");
    if (fam.len) {
      space_.intern("len_char");
      space_.intern("len_word");
    }
  }

  std::vector<SparseVec> transform_document(const Document& doc) const {
    const FeatureFamilies& fam = config_.families;
    std::vector<SparseVec> out(doc.sentences.size());
    const std::vector<Token>* heading = nullptr;
    const int n = static_cast<int>(doc.sentences.size());
    for (int i = 0; i < n; ++i) {
      const Sentence& s = doc.sentences[i];
      if (s.is_heading) heading = &s.tokens;
      SparseVec& vec = out[i];
      auto put_named = [&](const std::map<std::string, double>& feats) {
        for (const auto& [name, value] : feats) {
          int id = space_.lookup(name);
          if (id >= 0) vec.set(id, value);
        }
      };
      if (fam.bow) put_named(bow_features(s.tokens, bow_vocab_));
      if (fam.pos) put_named(pos_features(s.tokens, pos_vocab_));
      if (fam.lda) {
        const std::vector<std::string> words = token_words(s.tokens);
        const uint64_t seed =
            derive_seed(derive_seed(config_.seed, 3), detail::fnv1a(words));
        const std::vector<double> theta = lda_.infer(words, seed);
        const int base = space_.lookup("lda:0");
        for (int k = 0; k < lda_.topics(); ++k)
          if (theta[k] != 0.0) vec.set(base + k, theta[k]);
      }
      if (fam.d2v) {
        const std::vector<std::string> words = token_words(s.tokens);
        const uint64_t seed =
            derive_seed(derive_seed(config_.seed, 4), detail::fnv1a(words));
        const std::vector<double> dv = d2v_.infer(words, seed);
        const int base = space_.lookup("d2v:0");
        for (int j = 0; j < config_.d2v.dim; ++j)
          if (dv[j] != 0.0) vec.set(base + j, dv[j]);
      }
      if (fam.head && heading != nullptr)
        put_named(heading_features(*heading, head_vocab_));
      if (fam.loc) {
        const double p = position_feature(i, n);
        if (p != 0.0) vec.set(space_.lookup("loc"), p);
      }
      if (fam.len) {
        const auto [chars, words] = length_features(s);
        vec.set(space_.lookup("len_char"), chars);
        vec.set(space_.lookup("len_word"), words);
      }
    }
    return out;
  }

  std::vector<std::vector<SparseVec>> transform(const Corpus& corpus) const {
    std::vector<std::vector<SparseVec>> out;
    out.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents)
      out.push_back(transform_document(doc));
    return out;
  }

  const FeatureSpace& space() const { return space_; }
  const FeatureConfig& config() const { return config_; }
  const Vocabulary& bow_vocab() const { return bow_vocab_; }
  const Vocabulary& pos_vocab() const { return pos_vocab_; }
  const Vocabulary& head_vocab() const { return head_vocab_; }
  const LdaModel& lda() const { return lda_; }
  const Doc2VecModel& d2v() const { return d2v_; }

  // Wiring for deserialization.
  FeatureConfig* mutable_config() { return &config_; }
  Vocabulary* mutable_bow_vocab() { return &bow_vocab_; }
  Vocabulary* mutable_pos_vocab() { return &pos_vocab_; }
  Vocabulary* mutable_head_vocab() { return &head_vocab_; }
  LdaModel* mutable_lda() { return &lda_; }
  Doc2VecModel* mutable_d2v() { return &d2v_; }

 private:
  FeatureConfig config_;
  Vocabulary bow_vocab_;
  Vocabulary pos_vocab_;
  Vocabulary head_vocab_;
  LdaModel lda_;
  Doc2VecModel d2v_;
  FeatureSpace space_;
};

}  // namespace secmark
