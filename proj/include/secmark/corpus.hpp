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
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "secmark/errors.hpp"
#include "secmark/utf8.hpp"

namespace secmark {

// Rhetorical section of a sentence. Pre and After are positional: anything
// before the first Subject/Method/Result sentence, or after the last one.
enum class SectionLabel { Pre = 0, Subject, Method, Result, After, Other };

inline constexpr int kLabelCount = 6;

inline constexpr const char* kLabelNames[kLabelCount] = {
    "pre", "subject", "method", "result", "after", "other"};

inline const char* to_string(SectionLabel l) {
  return kLabelNames[static_cast<int>(l)];
}

inline SectionLabel label_from_string(std::string_view s) {
  for (int i = 0; i < kLabelCount; ++i)
    if (s == kLabelNames[i]) return static_cast<SectionLabel>(i);
  throw DataError("unknown section label '" + std::string(s) + "'");
}

// Subject/Method/Result are the labels of interest downstream.
inline bool is_target(SectionLabel l) {
  return l == SectionLabel::Subject || l == SectionLabel::Method ||
         l == SectionLabel::Result;
}

struct Token {
  std::string text;
  std::string pos;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string text;
  int index = 0;
  int paragraph_index = 0;
  bool is_heading = false;
  std::optional<SectionLabel> gold_label;
  std::optional<std::string> heading_text;  // nearest preceding heading
  std::vector<Token> tokens;                // empty until segmented

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::vector<Sentence> sentences;
  std::map<std::string, std::string> source_meta;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  bool labeled = false;

  size_t sentence_count() const {
    size_t n = 0;
    for (const auto& d : documents) n += d.sentences.size();
    return n;
  }

  bool operator==(const Corpus&) const = default;
};

namespace detail {

inline bool is_sentence_end(char32_t cp) {
  // Full-width 。？！ plus ASCII ? and !. Commas and semicolons never split.
  return cp == 0x3002 || cp == 0xFF1F || cp == 0xFF01 || cp == U'?' ||
         cp == U'!';
}

inline bool is_closing(char32_t cp) {
  switch (cp) {
    case 0x201D:  // ”
    case 0x2019:  // ’
    case 0x300D:  // 」
    case 0x300F:  // 』
    case 0xFF09:  // ）
    case 0x3011:  // 】
    case 0x300B:  // 》
    case U')':
    case U']':
    case U'"':
    case U'\'':
      return true;
    default:
      return false;
  }
}

// Characters that disqualify the end of a heading line.
inline bool is_heading_end_punct(char32_t cp) {
  switch (cp) {
    case 0x3002:  // 。
    case 0xFF1F:  // ？
    case 0xFF01:  // ！
    case U'?':
    case U'!':
    case 0xFF0C:  // ，
    case U',':
    case 0x3001:  // 、
    case 0xFF1B:  // ；
    case U';':
    case 0xFF1A:  // ：
    case U':':
    case U'.':
    case 0xFF09:  // ）
    case U')':
    case 0x3011:  // 】
    case U'"':
      return true;
    default:
      return false;
  }
}

}  // namespace detail

// Splits paragraphs into sentences at 。？！?! keeping the terminator (and any
// closing quotes/brackets right after it) attached. A paragraph without any
// terminator is one sentence. Text is sliced losslessly: per paragraph, the
// concatenated sentence texts equal the input.
inline std::vector<Sentence> split_sentences(
    const std::vector<std::string>& paragraphs) {
  if (paragraphs.empty()) throw DataError("empty document");
  std::vector<Sentence> out;
  for (size_t p = 0; p < paragraphs.size(); ++p) {
    const std::string& para = paragraphs[p];
    if (utf8::is_blank(para)) continue;
    std::vector<char32_t> cps;
    std::vector<size_t> offs;
    utf8::decode_with_offsets(para, &cps, &offs);
    std::vector<std::string> pieces;
    size_t start = 0;
    size_t i = 0;
    while (i < cps.size()) {
      if (detail::is_sentence_end(cps[i])) {
        ++i;
        while (i < cps.size() &&
               (detail::is_sentence_end(cps[i]) || detail::is_closing(cps[i])))
          ++i;
        pieces.push_back(para.substr(offs[start], offs[i] - offs[start]));
        start = i;
      } else {
        ++i;
      }
    }
    if (start < cps.size())
      pieces.push_back(para.substr(offs[start], para.size() - offs[start]));
    // Whitespace-only tails/heads merge with a neighbor so every sentence has
    // visible content and no character is lost.
    std::vector<std::string> merged;
    for (auto& piece : pieces) {
      if (utf8::is_blank(piece) && !merged.empty()) {
        merged.back() += piece;
      } else if (utf8::is_blank(piece)) {
        merged.push_back(piece);  // prepend to the next piece below
      } else if (!merged.empty() && utf8::is_blank(merged.back())) {
        merged.back() += piece;
      } else {
        merged.push_back(piece);
      }
    }
    if (!merged.empty() && utf8::is_blank(merged.back())) {
      if (merged.size() > 1) {
        merged[merged.size() - 2] += merged.back();
        merged.pop_back();
      } else {
        merged.clear();
      }
    }
    for (auto& text : merged) {
      Sentence s;
      s.text = std::move(text);
      s.index = static_cast<int>(out.size());
      s.paragraph_index = static_cast<int>(p);
      out.push_back(std::move(s));
    }
  }
  if (out.empty()) throw DataError("empty document");
  return out;
}

// Flags headings per the heuristic: sole sentence of its paragraph, fewer
// than 6 words, and the last non-blank character is not punctuation. Every
// following sentence then carries the text of its nearest preceding heading.
// Recomputes from scratch, so it is idempotent.
inline Document detect_headings(Document doc,
                                const std::vector<int>& word_counts) {
  if (word_counts.size() != doc.sentences.size())
    throw DataError("word_counts length " + std::to_string(word_counts.size()) +
                    " does not match sentence count " +
                    std::to_string(doc.sentences.size()));
  std::map<int, int> para_sizes;
  for (const auto& s : doc.sentences) para_sizes[s.paragraph_index]++;
  std::optional<std::string> current;
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    Sentence& s = doc.sentences[i];
    bool heading = para_sizes[s.paragraph_index] == 1 && word_counts[i] < 6;
    if (heading) {
      const std::vector<char32_t> cps = utf8::decode(s.text);
      char32_t last = 0;
      for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
        if (!utf8::is_space(*it)) {
          last = *it;
          break;
        }
      }
      if (last == 0 || detail::is_heading_end_punct(last)) heading = false;
    }
    s.is_heading = heading;
    if (heading) current = s.text;
    s.heading_text = heading ? std::optional<std::string>(s.text) : current;
  }
  return doc;
}

// Convenience overload using the segmented token counts already on the
// sentences.
inline Document detect_headings(Document doc) {
  std::vector<int> counts;
  counts.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences)
    counts.push_back(static_cast<int>(s.tokens.size()));
  return detect_headings(std::move(doc), counts);
}

struct LabelViolation {
  int sentence_index;
  std::string message;
};

// Checks the positional Pre/After rules: no Pre after any
// Subject/Method/Result sentence, no After before any. Other may appear
// anywhere. All sentences must be labeled.
inline std::vector<LabelViolation> validate_labels(const Document& doc) {
  int first_target = -1, last_target = -1;
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& s = doc.sentences[i];
    if (!s.gold_label)
      throw DataError("sentence " + std::to_string(i) + " of document '" +
                      doc.id + "' has no gold label");
    if (is_target(*s.gold_label)) {
      if (first_target < 0) first_target = static_cast<int>(i);
      last_target = static_cast<int>(i);
    }
  }
  std::vector<LabelViolation> out;
  if (first_target < 0) return out;
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const SectionLabel l = *doc.sentences[i].gold_label;
    if (l == SectionLabel::Pre && static_cast<int>(i) > first_target)
      out.push_back({static_cast<int>(i),
                     "pre label after a subject/method/result sentence"});
    if (l == SectionLabel::After && static_cast<int>(i) < last_target)
      out.push_back({static_cast<int>(i),
                     "after label before a subject/method/result sentence"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files: UTF-8, one JSON object per line. Raw documents carry
// {"id","title","paragraphs":[...]}; processed ones carry "sentences" with
// {"text","paragraph","label"?,"heading"?,"heading_text"?}.

inline nlohmann::ordered_json document_to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["title"] = doc.title;
  nlohmann::ordered_json sents = nlohmann::ordered_json::array();
  for (const auto& s : doc.sentences) {
    nlohmann::ordered_json js;
    js["text"] = s.text;
    js["paragraph"] = s.paragraph_index;
    if (s.gold_label) js["label"] = to_string(*s.gold_label);
    if (s.is_heading) js["heading"] = true;
    if (s.heading_text && !s.is_heading) js["heading_text"] = *s.heading_text;
    if (!s.tokens.empty()) {
      nlohmann::ordered_json toks = nlohmann::ordered_json::array();
      for (const auto& t : s.tokens)
        toks.push_back(nlohmann::ordered_json::array({t.text, t.pos}));
      js["tokens"] = std::move(toks);
    }
    sents.push_back(std::move(js));
  }
  j["sentences"] = std::move(sents);
  if (!doc.source_meta.empty()) {
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : doc.source_meta) meta[k] = v;
    j["meta"] = std::move(meta);
  }
  return j;
}

inline Document document_from_json(const nlohmann::json& j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  doc.title = j.value("title", std::string());
  if (j.contains("sentences")) {
    for (const auto& js : j.at("sentences")) {
      Sentence s;
      s.text = js.at("text").get<std::string>();
      s.index = static_cast<int>(doc.sentences.size());
      s.paragraph_index = js.value("paragraph", 0);
      if (js.contains("label"))
        s.gold_label = label_from_string(js.at("label").get<std::string>());
      s.is_heading = js.value("heading", false);
      if (s.is_heading)
        s.heading_text = s.text;
      else if (js.contains("heading_text"))
        s.heading_text = js.at("heading_text").get<std::string>();
      if (js.contains("tokens"))
        for (const auto& jt : js.at("tokens")) {
          if (!jt.is_array() || jt.size() != 2)
            throw DataError("token entries must be [text, pos] pairs");
          s.tokens.push_back(
              {jt[0].get<std::string>(), jt[1].get<std::string>()});
        }
      doc.sentences.push_back(std::move(s));
    }
  } else if (j.contains("paragraphs")) {
    std::vector<std::string> paragraphs;
    for (const auto& p : j.at("paragraphs"))
      paragraphs.push_back(p.get<std::string>());
    doc.sentences = split_sentences(paragraphs);
  } else {
    throw DataError("document has neither 'sentences' nor 'paragraphs'");
  }
  if (j.contains("meta"))
    for (const auto& [k, v] : j.at("meta").items())
      doc.source_meta[k] = v.get<std::string>();
  return doc;
}

inline void refresh_labeled_flag(Corpus* corpus) {
  bool any = false, all = true;
  for (const auto& d : corpus->documents)
    for (const auto& s : d.sentences) {
      any = true;
      if (!s.gold_label) all = false;
    }
  corpus->labeled = any && all;
}

inline Corpus load_corpus(std::istream& in) {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (utf8::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    Document doc;
    try {
      doc = document_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(doc.id).second)
      throw DataError("line " + std::to_string(lineno) +
                      ": duplicate document id '" + doc.id + "'");
    corpus.documents.push_back(std::move(doc));
  }
  refresh_labeled_flag(&corpus);
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  return load_corpus(in);
}

inline void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents)
    out << document_to_json(doc).dump() << '\n';
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file '" + path + "'");
  save_corpus(corpus, out);
}

}  // namespace secmark
