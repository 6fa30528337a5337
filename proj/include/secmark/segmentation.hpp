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
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/utf8.hpp"

namespace secmark {

// ictclas-style part-of-speech inventory.
inline const std::set<std::string>& pos_tag_inventory() {
  static const std::set<std::string> tags = {
      "a",  "ad", "ag", "an", "b",  "c",  "d",  "dg", "e",  "eng",
      "f",  "g",  "h",  "i",  "j",  "k",  "l",  "m",  "mg", "n",
      "ng", "nr", "ns", "nt", "nx", "nz", "o",  "p",  "q",  "r",
      "s",  "t",  "tg", "u",  "v",  "vd", "vg", "vn", "w",  "x"};
  return tags;
}

// Word list with per-(word, pos) frequencies, loaded from a TSV of
// word<TAB>pos<TAB>freq lines. Drives maximum matching and tag lookup.
class Lexicon {
 public:
  void add(const std::string& word, const std::string& pos, long long freq) {
    if (word.empty()) throw DataError("empty word in lexicon");
    if (!pos_tag_inventory().count(pos))
      throw DataError("unknown part-of-speech tag '" + pos + "'");
    entries_[word][pos] += freq;
    max_word_cps_ = std::max(max_word_cps_, utf8::codepoint_count(word));
  }

  bool contains(const std::string& word) const {
    return entries_.count(word) > 0;
  }

  // Highest-frequency tag for the word; frequency ties go to the
  // lexicographically smaller tag. Unknown words get "x".
  std::string best_pos(const std::string& word) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) return "x";
    const std::string* best = nullptr;
    long long best_freq = -1;
    for (const auto& [pos, freq] : it->second) {
      if (freq > best_freq) {
        best = &pos;
        best_freq = freq;
      }
    }
    return *best;
  }

  size_t max_word_cps() const { return max_word_cps_; }
  size_t size() const { return entries_.size(); }

 private:
  // Inner map ordered so frequency ties resolve to the smaller tag.
  std::map<std::string, std::map<std::string, long long>> entries_;
  size_t max_word_cps_ = 1;
};

inline Lexicon load_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::is_blank(line)) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw DataError("line " + std::to_string(lineno) +
                      ": expected word<TAB>pos<TAB>freq, got " +
                      std::to_string(fields.size()) + " fields");
    long long freq = 0;
    try {
      size_t pos = 0;
      freq = std::stoll(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(lineno) +
                      ": bad frequency '" + fields[2] + "'");
    }
    try {
      lex.add(fields[0], fields[1], freq);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file '" + path + "'");
  return load_lexicon(in);
}

namespace detail {

// Greedy longest-match over a codepoint range; scans left to right.
inline std::vector<std::string> max_match_forward(
    const std::vector<char32_t>& cps, size_t begin, size_t end,
    const Lexicon& lex) {
  std::vector<std::string> out;
  size_t i = begin;
  while (i < end) {
    size_t best = 1;
    size_t cap = std::min(lex.max_word_cps(), end - i);
    for (size_t len = cap; len >= 2; --len) {
      if (lex.contains(utf8::encode(cps, i, len))) {
        best = len;
        break;
      }
    }
    out.push_back(utf8::encode(cps, i, best));
    i += best;
  }
  return out;
}

// Same idea scanning right to left.
inline std::vector<std::string> max_match_backward(
    const std::vector<char32_t>& cps, size_t begin, size_t end,
    const Lexicon& lex) {
  std::vector<std::string> out;
  size_t i = end;
  while (i > begin) {
    size_t best = 1;
    size_t cap = std::min(lex.max_word_cps(), i - begin);
    for (size_t len = cap; len >= 2; --len) {
      if (lex.contains(utf8::encode(cps, i - len, len))) {
        best = len;
        break;
      }
    }
    out.push_back(utf8::encode(cps, i - best, best));
    i -= best;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

inline size_t count_single(const std::vector<std::string>& words) {
  size_t n = 0;
  for (const auto& w : words)
    if (utf8::codepoint_count(w) == 1) ++n;
  return n;
}

}  // namespace detail

// Maximum matching in both directions; keeps the segmentation with fewer
// tokens, then fewer single-codepoint tokens, then the backward result.
inline std::vector<std::string> segment_span(const std::vector<char32_t>& cps,
                                             size_t begin, size_t end,
                                             const Lexicon& lex) {
  std::vector<std::string> fwd =
      detail::max_match_forward(cps, begin, end, lex);
  std::vector<std::string> bwd =
      detail::max_match_backward(cps, begin, end, lex);
  if (fwd.size() != bwd.size()) return fwd.size() < bwd.size() ? fwd : bwd;
  if (detail::count_single(fwd) < detail::count_single(bwd)) return fwd;
  return bwd;
}

// Segments one sentence. Digit runs (including full-width digits) come out
// as single "m" tokens and Latin runs as "eng" tokens before dictionary
// matching sees the rest.
inline std::vector<Token> segment(const std::string& text,
                                  const Lexicon& lex) {
  const std::vector<char32_t> cps = utf8::decode(text);
  std::vector<Token> out;
  size_t i = 0;
  auto flush_span = [&](size_t begin, size_t end) {
    if (begin >= end) return;
    for (auto& w : segment_span(cps, begin, end, lex)) {
      Token t;
      t.pos = lex.best_pos(w);
      t.text = std::move(w);
      out.push_back(std::move(t));
    }
  };
  size_t span_start = 0;
  while (i < cps.size()) {
    if (utf8::is_digit(cps[i])) {
      flush_span(span_start, i);
      size_t j = i;
      while (j < cps.size() && utf8::is_digit(cps[j])) ++j;
      out.push_back({utf8::encode(cps, i, j - i), "m"});
      i = span_start = j;
    } else if (utf8::is_latin(cps[i])) {
      flush_span(span_start, i);
      size_t j = i;
      while (j < cps.size() && utf8::is_latin(cps[j])) ++j;
      out.push_back({utf8::encode(cps, i, j - i), "eng"});
      i = span_start = j;
    } else {
      ++i;
    }
  }
  flush_span(span_start, cps.size());
  return out;
}

inline std::vector<std::string> segment_words(const std::string& text,
                                              const Lexicon& lex) {
  std::vector<std::string> out;
  for (auto& t : segment(text, lex)) out.push_back(std::move(t.text));
  return out;
}

// Tokenizes every sentence in place and re-runs heading detection with the
// resulting word counts.
inline void segment_corpus(Corpus* corpus, const Lexicon& lex) {
  for (auto& doc : corpus->documents) {
    for (auto& s : doc.sentences) s.tokens = segment(s.text, lex);
    doc = detect_headings(std::move(doc));
  }
}

}  // namespace secmark
