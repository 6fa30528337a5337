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
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/errors.hpp"
#include "secmark/utf8.hpp"

namespace secmark {

inline const std::vector<std::string>& entity_categories() {
  static const std::vector<std::string> cats = {"acupoint", "disease",
                                                "medicine"};
  return cats;
}

// surface form -> category, loaded from TSV `surface<TAB>category`.
class EntityDictionary {
 public:
  void add(const std::string& surface, const std::string& category) {
    if (surface.empty()) throw DataError("empty entity surface");
    const auto& cats = entity_categories();
    if (std::find(cats.begin(), cats.end(), category) == cats.end())
      throw DataError("unknown entity category '" + category + "'");
    auto [it, inserted] = entries_.emplace(surface, category);
    if (!inserted && it->second != category)
      throw DataError("entity '" + surface + "' listed with categories '" +
                      it->second + "' and '" + category + "'");
    max_surface_cps_ =
        std::max(max_surface_cps_, utf8::codepoint_count(surface));
  }

  const std::string* category(const std::string& surface) const {
    auto it = entries_.find(surface);
    return it == entries_.end() ? nullptr : &it->second;
  }

  size_t size() const { return entries_.size(); }
  size_t max_surface_cps() const { return max_surface_cps_; }
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
  size_t max_surface_cps_ = 1;
};

inline EntityDictionary load_entity_dictionary(std::istream& in) {
  EntityDictionary dict;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::is_blank(line)) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("line " + std::to_string(lineno) +
                      ": expected surface<TAB>category");
    try {
      dict.add(line.substr(0, tab), line.substr(tab + 1));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return dict;
}

inline EntityDictionary load_entity_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open entity dictionary '" + path + "'");
  return load_entity_dictionary(in);
}

// Keeps Subject/Method/Result sentences (predicted labels when present,
// else gold), preserving order and original indices.
inline std::vector<Sentence> filter_sentences(
    const Document& doc,
    const std::vector<SectionLabel>* predicted = nullptr) {
  if (predicted != nullptr && predicted->size() != doc.sentences.size())
    throw DataError("prediction length does not match sentence count");
  std::vector<Sentence> out;
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    SectionLabel l;
    if (predicted != nullptr)
      l = (*predicted)[i];
    else if (doc.sentences[i].gold_label)
      l = *doc.sentences[i].gold_label;
    else
      throw DataError("sentence " + std::to_string(i) + " has no label");
    if (is_target(l)) out.push_back(doc.sentences[i]);
  }
  return out;
}

struct Entity {
  std::string surface;
  std::string category;

  auto operator<=>(const Entity&) const = default;
};

// Longest-match, non-overlapping scan of raw text against the dictionary.
inline std::vector<Entity> scan_entities(const std::string& text,
                                         const EntityDictionary& dict) {
  const std::vector<char32_t> cps = utf8::decode(text);
  std::vector<Entity> out;
  size_t i = 0;
  while (i < cps.size()) {
    const size_t cap = std::min(dict.max_surface_cps(), cps.size() - i);
    size_t matched = 0;
    const std::string* category = nullptr;
    for (size_t len = cap; len >= 1; --len) {
      const std::string candidate = utf8::encode(cps, i, len);
      if (const std::string* c = dict.category(candidate)) {
        matched = len;
        category = c;
        out.push_back({candidate, *category});
        break;
      }
    }
    i += matched > 0 ? matched : 1;
  }
  return out;
}

// Deduplicated entity set of one paper's kept sentences.
inline std::set<Entity> extract_entities(const std::vector<Sentence>& sentences,
                                         const EntityDictionary& dict) {
  std::set<Entity> out;
  for (const auto& s : sentences)
    for (auto& e : scan_entities(s.text, dict)) out.insert(std::move(e));
  return out;
}

struct EntityPair {
  Entity a;  // canonical: a.surface < b.surface
  Entity b;

  auto operator<=>(const EntityPair&) const = default;
};

inline EntityPair make_pair_canonical(Entity x, Entity y) {
  if (y.surface < x.surface) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

// Canonical unordered category pair like "disease-medicine".
inline std::string category_pair_key(const std::string& a,
                                     const std::string& b) {
  return a <= b ? a + "-" + b : b + "-" + a;
}

struct CooccurrenceTable {
  std::map<EntityPair, long long> pair_counts;

  // Every unordered pair within one paper's entity set counts once.
  void add_paper(const std::set<Entity>& entities) {
    for (auto it = entities.begin(); it != entities.end(); ++it) {
      auto jt = it;
      for (++jt; jt != entities.end(); ++jt)
        pair_counts[make_pair_canonical(*it, *jt)]++;
    }
  }

  // Pairs with count > threshold (strict).
  std::set<EntityPair> relation_set(long long threshold) const {
    std::set<EntityPair> out;
    for (const auto& [pair, count] : pair_counts)
      if (count > threshold) out.insert(pair);
    return out;
  }

  std::map<std::string, long long> category_pair_totals() const {
    std::map<std::string, long long> out;
    for (const auto& [pair, count] : pair_counts)
      out[category_pair_key(pair.a.category, pair.b.category)] += count;
    return out;
  }
};

// Paper-level by default: each unordered pair of distinct entities found
// anywhere in one paper's kept sentences counts once per paper.  With
// sentence_level=true a pair counts once per sentence it shares.
inline CooccurrenceTable build_cooccurrence(
    const std::vector<std::vector<Sentence>>& papers,
    const EntityDictionary& dict, bool sentence_level = false) {
  CooccurrenceTable table;
  for (const auto& sentences : papers) {
    if (sentence_level) {
      for (const auto& s : sentences) {
        std::set<Entity> ents;
        for (auto& e : scan_entities(s.text, dict)) ents.insert(std::move(e));
        table.add_paper(ents);
      }
    } else {
      table.add_paper(extract_entities(sentences, dict));
    }
  }
  return table;
}

struct OverlapRow {
  long long threshold = 0;
  std::string category_pair;  // "total" for the all-pairs row
  long long unfiltered = 0;
  long long filtered_in_unfiltered = 0;
  double percent = 0.0;  // 100 * |filtered ∩ unfiltered| / |unfiltered|
};

// Per-threshold share of unfiltered relations that survive filtering,
// overall and per category pair.
inline std::vector<OverlapRow> threshold_overlap_stats(
    const CooccurrenceTable& unfiltered, const CooccurrenceTable& filtered,
    const std::vector<long long>& thresholds) {
  std::vector<OverlapRow> out;
  for (long long t : thresholds) {
    if (t < 0) throw ConfigError("threshold must be >= 0");
    const std::set<EntityPair> u = unfiltered.relation_set(t);
    const std::set<EntityPair> f = filtered.relation_set(t);
    std::map<std::string, std::pair<long long, long long>> per_cat;
    long long total_u = 0, total_i = 0;
    for (const auto& pair : u) {
      const std::string key =
          category_pair_key(pair.a.category, pair.b.category);
      per_cat[key].first++;
      ++total_u;
      if (f.count(pair)) {
        per_cat[key].second++;
        ++total_i;
      }
    }
    for (const auto& [key, counts] : per_cat)
      out.push_back({t, key, counts.first, counts.second,
                     counts.first > 0
                         ? 100.0 * counts.second / counts.first
                         : 0.0});
    out.push_back({t, "total", total_u, total_i,
                   total_u > 0 ? 100.0 * total_i / total_u : 0.0});
  }
  return out;
}

inline void write_overlap_report(const std::vector<OverlapRow>& rows,
                                 std::ostream& os) {
  os << "threshold,category_pair,unfiltered,overlap,percent\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.threshold << ',' << r.category_pair << ',' << r.unfiltered << ','
       << r.filtered_in_unfiltered << ',' << r.percent << '\n';
}

// CSV edge list of pairs with count > min_count, sorted by count descending
// then lexicographically.
inline void export_edges(const CooccurrenceTable& table, long long min_count,
                         std::ostream& os) {
  os << "entity_a,category_a,entity_b,category_b,count\n";
  std::vector<std::pair<EntityPair, long long>> rows;
  for (const auto& [pair, count] : table.pair_counts)
    if (count > min_count) rows.push_back({pair, count});
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  for (const auto& [pair, count] : rows)
    os << pair.a.surface << ',' << pair.a.category << ',' << pair.b.surface
       << ',' << pair.b.category << ',' << count << '\n';
}

inline void export_edges(const CooccurrenceTable& table, long long min_count,
                         const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write edge list '" + path + "'");
  export_edges(table, min_count, os);
}

inline CooccurrenceTable load_edges(std::istream& is) {
  CooccurrenceTable table;
  std::string line;
  if (!std::getline(is, line))
    throw DataError("edge list is empty (missing header)");
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (utf8::is_blank(line)) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (fields.size() < 5) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos || fields.size() == 4) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 5)
      throw DataError("line " + std::to_string(lineno) +
                      ": expected 5 comma-separated fields");
    EntityPair pair = make_pair_canonical({fields[0], fields[1]},
                                          {fields[2], fields[3]});
    table.pair_counts[pair] = std::stoll(fields[4]);
  }
  return table;
}

}  // namespace secmark
