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

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/rng.hpp"
#include "secmark/utf8.hpp"

namespace secmark {

using TransitionTable = std::array<std::array<double, kLabelCount>,
                                   kLabelCount>;

// Forward-moving grammar: sections advance, never regress, with Other
// sprinkled in; After is absorbing.
inline TransitionTable default_transition_table() {
  return TransitionTable{{
      {0.50, 0.30, 0.00, 0.00, 0.00, 0.20},  // pre
      {0.00, 0.45, 0.35, 0.00, 0.00, 0.20},  // subject
      {0.00, 0.00, 0.55, 0.25, 0.00, 0.20},  // method
      {0.00, 0.00, 0.00, 0.50, 0.30, 0.20},  // result
      {0.00, 0.00, 0.00, 0.00, 1.00, 0.00},  // after
      {0.00, 0.10, 0.25, 0.25, 0.10, 0.30},  // other
  }};
}

struct SynthesisConfig {
  int n_docs = 371;
  uint64_t seed = 42;
  TransitionTable transition = default_transition_table();
  int min_sentences = 10;
  int max_sentences = 18;
  int min_tokens = 4;
  int max_tokens = 9;
  int signal_words_per_label = 30;
  int heading_words_per_label = 6;
  int noise_words = 200;
  double noise_token_prob = 0.5;   // chance a token is shared noise
  double ambiguous_prob = 0.05;    // chance a sentence wears another label's
                                   // vocabulary
  double heading_prob = 0.5;       // chance a label block opens as a heading

  void validate() const {
    if (n_docs < 0) throw ConfigError("document count must be >= 0");
    if (min_sentences < 1 || max_sentences < min_sentences)
      throw ConfigError("bad sentence count range");
    if (min_tokens < 1 || max_tokens < min_tokens)
      throw ConfigError("bad token count range");
    if (signal_words_per_label < 1 || signal_words_per_label > 512 ||
        heading_words_per_label < 1 || heading_words_per_label > 512 ||
        noise_words < 0 || noise_words > 4096)
      throw ConfigError("vocabulary pool size out of range");
    for (int y = 0; y < kLabelCount; ++y) {
      double sum = 0.0;
      for (int z = 0; z < kLabelCount; ++z) {
        if (transition[y][z] < 0)
          throw DataError("negative transition probability");
        sum += transition[y][z];
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw DataError("transition row for '" +
                        std::string(kLabelNames[y]) + "' sums to " +
                        std::to_string(sum));
    }
  }
};

// Disjoint single-character vocabularies inside the CJK block: one signal
// and one heading pool per label, plus a shared noise pool.
inline std::string synth_signal_char(SectionLabel label, int i) {
  return utf8::encode_one(
      static_cast<char32_t>(0x4E00 + static_cast<int>(label) * 0x400 + i));
}

inline std::string synth_heading_char(SectionLabel label, int i) {
  return utf8::encode_one(static_cast<char32_t>(
      0x4E00 + static_cast<int>(label) * 0x400 + 0x200 + i));
}

inline std::string synth_noise_char(int i) {
  return utf8::encode_one(static_cast<char32_t>(0x6E00 + i));
}

inline Corpus generate_synthetic_corpus(const SynthesisConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.labeled = true;
  for (int d = 0; d < config.n_docs; ++d) {
    // Per-document stream, so documents are independent of each other.
    Rng rng(derive_seed(config.seed, static_cast<uint64_t>(d)));
    Document doc;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%04d", d);
    doc.id = idbuf;
    doc.title = std::string("synthetic paper ") + std::to_string(d);

    const int n_sents = static_cast<int>(
        rng.uniform_int(config.min_sentences, config.max_sentences));
    std::vector<SectionLabel> labels(n_sents);
    labels[0] = SectionLabel::Pre;
    for (int t = 1; t < n_sents; ++t) {
      const auto& row = config.transition[static_cast<int>(labels[t - 1])];
      labels[t] = static_cast<SectionLabel>(rng.sample_discrete(
          std::vector<double>(row.begin(), row.end())));
    }

    int paragraph = 0;
    for (int t = 0; t < n_sents; ++t) {
      const SectionLabel y = labels[t];
      const bool block_start = t == 0 || labels[t - 1] != y;
      if (block_start && t > 0) ++paragraph;

      Sentence s;
      s.paragraph_index = paragraph;
      s.index = t;
      s.gold_label = y;
      if (block_start && rng.uniform() < config.heading_prob) {
        // Render this chain step as a section heading: its own paragraph,
        // a couple of heading-pool characters, no closing punctuation.
        const int len = static_cast<int>(rng.uniform_int(2, 4));
        for (int j = 0; j < len; ++j) {
          const std::string w = synth_heading_char(
              y, static_cast<int>(
                     rng.uniform_below(config.heading_words_per_label)));
          s.text += w;
          s.tokens.push_back({w, "n"});
        }
        doc.sentences.push_back(std::move(s));
        ++paragraph;
        continue;
      }

      SectionLabel source = y;
      if (rng.uniform() < config.ambiguous_prob) {
        // Camouflage: the sentence borrows another label's vocabulary, so
        // only context can recover the truth.
        int other = static_cast<int>(rng.uniform_below(kLabelCount - 1));
        if (other >= static_cast<int>(y)) ++other;
        source = static_cast<SectionLabel>(other);
      }
      const int n_tokens = static_cast<int>(
          rng.uniform_int(config.min_tokens, config.max_tokens));
      for (int j = 0; j < n_tokens; ++j) {
        std::string w;
        if (config.noise_words > 0 &&
            rng.uniform() < config.noise_token_prob)
          w = synth_noise_char(
              static_cast<int>(rng.uniform_below(config.noise_words)));
        else
          w = synth_signal_char(
              source, static_cast<int>(
                          rng.uniform_below(config.signal_words_per_label)));
        s.text += w;
        s.tokens.push_back({w, "n"});
      }
      s.text += utf8::encode_one(0x3002);  // 。
      s.tokens.push_back({utf8::encode_one(0x3002), "w"});
      doc.sentences.push_back(std::move(s));
    }
    corpus.documents.push_back(detect_headings(std::move(doc)));
  }
  if (corpus.documents.empty()) corpus.labeled = false;
  return corpus;
}

}  // namespace secmark
