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

#include "secmark/segmentation.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace sm = secmark;

namespace {

sm::Lexicon make_lexicon(
    const std::vector<std::tuple<std::string, std::string, long long>>& rows) {
  sm::Lexicon lex;
  for (const auto& [w, p, f] : rows) lex.add(w, p, f);
  return lex;
}

std::vector<std::string> words_of(const std::vector<sm::Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("lexicon validates tags and picks best pos", "[segmentation]") {
  sm::Lexicon lex;
  lex.add("治疗", "v", 10);
  lex.add("治疗", "vn", 3);
  CHECK(lex.best_pos("治疗") == "v");
  lex.add("治疗", "vn", 7);  // accumulates to 10, tie goes to smaller tag
  CHECK(lex.best_pos("治疗") == "v");
  lex.add("治疗", "vn", 1);
  CHECK(lex.best_pos("治疗") == "vn");
  CHECK(lex.best_pos("没见过") == "x");
  CHECK(lex.max_word_cps() == 2);
  CHECK_THROWS_AS(lex.add("词", "zz", 1), sm::DataError);
  CHECK_THROWS_AS(lex.add("", "n", 1), sm::DataError);
}

TEST_CASE("lexicon loader reports line numbers", "[segmentation]") {
  std::istringstream ok("治疗\tv\t10\n\n穴位\tn\t5\r\n");
  sm::Lexicon lex = sm::load_lexicon(ok);
  CHECK(lex.size() == 2);
  CHECK(lex.contains("穴位"));

  std::istringstream short_line("治疗\tv\n");
  CHECK_THROWS_WITH(sm::load_lexicon(short_line),
                    Catch::Matchers::ContainsSubstring("line 1"));
  std::istringstream bad_freq("治疗\tv\tmany\n");
  CHECK_THROWS_WITH(sm::load_lexicon(bad_freq),
                    Catch::Matchers::ContainsSubstring("bad frequency"));
  std::istringstream bad_tag("好\tq7\t3\n");
  CHECK_THROWS_AS(sm::load_lexicon(bad_tag), sm::DataError);
}

TEST_CASE("forward and backward maximum matching disagree", "[segmentation]") {
  // On ABC with words {AB, BC}: forward takes AB+C, backward takes A+BC.
  // Tie on token count and single count resolves to the backward result.
  sm::Lexicon lex = make_lexicon({{"研究", "vn", 5}, {"究生", "n", 4}});
  auto words = sm::segment_words("研究生", lex);
  CHECK(words == std::vector<std::string>{"研", "究生"});
}

TEST_CASE("fewer tokens beats more tokens", "[segmentation]") {
  sm::Lexicon lex = make_lexicon({{"支气管哮喘", "n", 2}, {"支气管", "n", 9},
                                  {"哮喘", "n", 9}});
  auto words = sm::segment_words("支气管哮喘", lex);
  CHECK(words == std::vector<std::string>{"支气管哮喘"});
}

TEST_CASE("fewer singles beats more singles", "[segmentation]") {
  // 中国人民: forward 中国|人民 (0 singles), backward would also find it;
  // craft a case where only single counts differ.
  sm::Lexicon lex = make_lexicon({{"中国", "ns", 5}, {"国人", "n", 5}});
  // forward: 中国|人 (1 single), backward: 中|国人 (1 single) -> backward.
  auto a = sm::segment_words("中国人", lex);
  CHECK(a == std::vector<std::string>{"中", "国人"});

  sm::Lexicon lex2 = make_lexicon({{"人民", "n", 5}, {"国人", "n", 5},
                                   {"中国", "ns", 5}});
  // forward: 中国|人民; backward: 中国|人民 as well (scan right to left
  // finds 人民 then 中国). Zero singles both ways.
  auto b = sm::segment_words("中国人民", lex2);
  CHECK(b == std::vector<std::string>{"中国", "人民"});
}

TEST_CASE("digit and latin runs come out whole", "[segmentation]") {
  sm::Lexicon lex = make_lexicon({{"患者", "n", 5}, {"年龄", "n", 5}});
  auto toks = sm::segment("患者100例,年龄2~16岁,用10ml药水", lex);
  bool saw_100 = false, saw_ml = false, saw_digits_16 = false;
  for (const auto& t : toks) {
    if (t.text == "100") {
      saw_100 = true;
      CHECK(t.pos == "m");
    }
    if (t.text == "ml") {
      saw_ml = true;
      CHECK(t.pos == "eng");
    }
    if (t.text == "16") saw_digits_16 = true;
  }
  CHECK(saw_100);
  CHECK(saw_ml);
  CHECK(saw_digits_16);

  // Full-width digits behave like ASCII ones.
  auto fw = sm::segment("１２３例", lex);
  REQUIRE_FALSE(fw.empty());
  CHECK(fw[0].text == "１２３");
  CHECK(fw[0].pos == "m");
}

TEST_CASE("unknown characters become single tokens tagged x", "[segmentation]") {
  sm::Lexicon lex = make_lexicon({{"治疗", "v", 5}});
  auto toks = sm::segment("治疗咳癖", lex);
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].text == "治疗");
  CHECK(toks[0].pos == "v");
  CHECK(toks[1].text == "咳");
  CHECK(toks[1].pos == "x");
  CHECK(toks[2].text == "癖");
}

TEST_CASE("segment_corpus fills tokens and re-detects headings",
          "[segmentation]") {
  sm::Corpus corpus;
  sm::Document doc;
  doc.id = "d";
  auto push = [&](const std::string& text, int para) {
    sm::Sentence s;
    s.text = text;
    s.index = static_cast<int>(doc.sentences.size());
    s.paragraph_index = para;
    doc.sentences.push_back(std::move(s));
  };
  push("治疗方法", 0);
  push("患者取坐位。", 1);
  corpus.documents.push_back(doc);

  sm::Lexicon lex = make_lexicon(
      {{"治疗", "v", 5}, {"方法", "n", 5}, {"患者", "n", 5}});
  sm::segment_corpus(&corpus, lex);
  const auto& sents = corpus.documents[0].sentences;
  CHECK(words_of(sents[0].tokens) ==
        std::vector<std::string>{"治疗", "方法"});
  CHECK(sents[0].is_heading);
  CHECK_FALSE(sents[1].is_heading);
  REQUIRE(sents[1].heading_text.has_value());
  CHECK(*sents[1].heading_text == "治疗方法");
}

TEST_CASE("empty text segments to nothing", "[segmentation]") {
  sm::Lexicon lex;
  lex.add("词", "n", 1);
  CHECK(sm::segment("", lex).empty());
}
