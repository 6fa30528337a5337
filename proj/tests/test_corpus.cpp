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

#include "secmark/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "secmark/segmentation.hpp"

namespace sm = secmark;

namespace {

std::string fixture(const std::string& name) {
  return std::string(SECMARK_TEST_DIR) + "/fixtures/" + name;
}

}  // namespace

TEST_CASE("section labels round-trip by name", "[corpus]") {
  for (int i = 0; i < sm::kLabelCount; ++i) {
    const auto l = static_cast<sm::SectionLabel>(i);
    CHECK(sm::label_from_string(sm::to_string(l)) == l);
  }
  CHECK_THROWS_AS(sm::label_from_string("intro"), sm::DataError);
  CHECK(sm::is_target(sm::SectionLabel::Subject));
  CHECK(sm::is_target(sm::SectionLabel::Method));
  CHECK(sm::is_target(sm::SectionLabel::Result));
  CHECK_FALSE(sm::is_target(sm::SectionLabel::Pre));
  CHECK_FALSE(sm::is_target(sm::SectionLabel::After));
  CHECK_FALSE(sm::is_target(sm::SectionLabel::Other));
}

TEST_CASE("split keeps terminators attached", "[corpus]") {
  auto sents = sm::split_sentences({"今天下雨了。明天呢？好吧！"});
  REQUIRE(sents.size() == 3);
  CHECK(sents[0].text == "今天下雨了。");
  CHECK(sents[1].text == "明天呢？");
  CHECK(sents[2].text == "好吧！");
  for (const auto& s : sents) CHECK(s.paragraph_index == 0);
}

TEST_CASE("split ignores commas and semicolons", "[corpus]") {
  auto sents = sm::split_sentences({"治疗前应清洁皮肤,防止感染;延期贴敷。"});
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].text == "治疗前应清洁皮肤,防止感染;延期贴敷。");
}

TEST_CASE("split attaches closing quote after terminator", "[corpus]") {
  auto sents = sm::split_sentences({"他说“可以。”然后走了。"});
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].text == "他说“可以。”");
  CHECK(sents[1].text == "然后走了。");
}

TEST_CASE("paragraph without terminator is one sentence", "[corpus]") {
  auto sents = sm::split_sentences({"治疗方法", "患者取坐位。常规消毒。"});
  REQUIRE(sents.size() == 3);
  CHECK(sents[0].text == "治疗方法");
  CHECK(sents[0].paragraph_index == 0);
  CHECK(sents[1].paragraph_index == 1);
  CHECK(sents[2].paragraph_index == 1);
  CHECK(sents[0].index == 0);
  CHECK(sents[2].index == 2);
}

TEST_CASE("split is lossless per paragraph", "[corpus]") {
  const std::string para = "X 线示“双肺纹理增粗”。临床诊断为哮喘!随访 1 年?结束";
  auto sents = sm::split_sentences({para});
  std::string joined;
  for (const auto& s : sents) joined += s.text;
  CHECK(joined == para);
}

TEST_CASE("blank paragraphs are skipped", "[corpus]") {
  auto sents = sm::split_sentences({"  ", "正文。", ""});
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].paragraph_index == 1);
  CHECK_THROWS_AS(sm::split_sentences({}), sm::DataError);
  CHECK_THROWS_AS(sm::split_sentences({" ", ""}), sm::DataError);
}

TEST_CASE("heading needs sole short unpunctuated line", "[corpus]") {
  sm::Document doc;
  auto push = [&](const std::string& text, int para) {
    sm::Sentence s;
    s.text = text;
    s.index = static_cast<int>(doc.sentences.size());
    s.paragraph_index = para;
    doc.sentences.push_back(std::move(s));
  };
  push("治疗方法", 0);          // short, alone, no punctuation: heading
  push("患者取坐位。", 1);      // trailing punctuation
  push("常规消毒后固定。", 1);  // shares a paragraph
  push("很长很长很长的一行字没有标点", 2);  // too many words
  const std::vector<int> counts = {2, 4, 4, 9};
  sm::Document out = sm::detect_headings(doc, counts);
  CHECK(out.sentences[0].is_heading);
  CHECK_FALSE(out.sentences[1].is_heading);
  CHECK_FALSE(out.sentences[2].is_heading);
  CHECK_FALSE(out.sentences[3].is_heading);
  REQUIRE(out.sentences[3].heading_text.has_value());
  CHECK(*out.sentences[3].heading_text == "治疗方法");

  CHECK_THROWS_AS(sm::detect_headings(doc, {1, 2}), sm::DataError);
}

TEST_CASE("heading scope tracks the nearest preceding heading", "[corpus]") {
  sm::Document doc;
  auto push = [&](const std::string& text, int para) {
    sm::Sentence s;
    s.text = text;
    s.paragraph_index = para;
    doc.sentences.push_back(std::move(s));
  };
  push("引言正文。", 0);
  push("治疗方法", 1);
  push("正文一。", 2);
  push("治疗效果", 3);
  push("正文二。", 4);
  sm::Document out = sm::detect_headings(doc, {3, 2, 3, 2, 3});
  CHECK_FALSE(out.sentences[0].heading_text.has_value());
  CHECK(*out.sentences[2].heading_text == "治疗方法");
  CHECK(*out.sentences[4].heading_text == "治疗效果");
}

TEST_CASE("fixture headings are found exactly", "[corpus]") {
  sm::Corpus corpus = sm::load_corpus(fixture("sample_papers.jsonl"));
  REQUIRE(corpus.documents.size() == 2);
  sm::Lexicon lex = sm::load_lexicon(fixture("lexicon.tsv"));
  sm::segment_corpus(&corpus, lex);

  std::set<std::string> expected = {"一般资料及治法", "治疗效果", "体会",
                                    "治疗方法", "典型病例"};
  std::set<std::string> found;
  int heading_sentences = 0;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences)
      if (s.is_heading) {
        found.insert(s.text);
        ++heading_sentences;
      }
  CHECK(found == expected);
  CHECK(heading_sentences == 6);  // 体会 closes both papers

  // Titles are long enough to stay body text.
  for (const auto& doc : corpus.documents)
    CHECK_FALSE(doc.sentences[0].is_heading);
}

TEST_CASE("label validation enforces pre/after positions", "[corpus]") {
  using L = sm::SectionLabel;
  auto make_doc = [](const std::vector<L>& labels) {
    sm::Document doc;
    doc.id = "d";
    for (size_t i = 0; i < labels.size(); ++i) {
      sm::Sentence s;
      s.text = "x。";
      s.index = static_cast<int>(i);
      s.gold_label = labels[i];
      doc.sentences.push_back(std::move(s));
    }
    return doc;
  };
  CHECK(sm::validate_labels(
            make_doc({L::Pre, L::Subject, L::Method, L::Result, L::After}))
            .empty());
  CHECK(sm::validate_labels(make_doc({L::Pre, L::Other, L::Pre})).empty());

  auto bad_pre = sm::validate_labels(make_doc({L::Subject, L::Pre}));
  REQUIRE(bad_pre.size() == 1);
  CHECK(bad_pre[0].sentence_index == 1);

  auto bad_after = sm::validate_labels(make_doc({L::After, L::Result}));
  REQUIRE(bad_after.size() == 1);
  CHECK(bad_after[0].sentence_index == 0);

  // Other floats anywhere, including between targets.
  CHECK(sm::validate_labels(make_doc({L::Subject, L::Other, L::Result}))
            .empty());

  sm::Document unl = make_doc({L::Pre});
  unl.sentences[0].gold_label.reset();
  CHECK_THROWS_AS(sm::validate_labels(unl), sm::DataError);
}

TEST_CASE("jsonl round-trip preserves documents", "[corpus]") {
  sm::Corpus corpus = sm::load_corpus(fixture("sample_papers.jsonl"));
  sm::Lexicon lex = sm::load_lexicon(fixture("lexicon.tsv"));
  sm::segment_corpus(&corpus, lex);
  corpus.documents[0].sentences[0].gold_label = sm::SectionLabel::Pre;

  std::ostringstream out;
  sm::save_corpus(corpus, out);
  std::istringstream in(out.str());
  sm::Corpus back = sm::load_corpus(in);
  REQUIRE(back.documents.size() == corpus.documents.size());
  CHECK(back == corpus);

  std::ostringstream again;
  sm::save_corpus(back, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("corpus loader rejects bad input", "[corpus]") {
  std::istringstream dup(
      "{\"id\":\"a\",\"paragraphs\":[\"x。\"]}\n"
      "{\"id\":\"a\",\"paragraphs\":[\"y。\"]}\n");
  CHECK_THROWS_AS(sm::load_corpus(dup), sm::DataError);

  std::istringstream garbage("not json\n");
  CHECK_THROWS_AS(sm::load_corpus(garbage), sm::DataError);

  std::istringstream missing("{\"id\":\"a\",\"title\":\"t\"}\n");
  CHECK_THROWS_AS(sm::load_corpus(missing), sm::DataError);

  std::istringstream badlabel(
      "{\"id\":\"a\",\"sentences\":[{\"text\":\"x\",\"label\":\"intro\"}]}\n");
  CHECK_THROWS_AS(sm::load_corpus(badlabel), sm::DataError);
}

TEST_CASE("labeled flag reflects gold coverage", "[corpus]") {
  std::istringstream in(
      "{\"id\":\"a\",\"sentences\":[{\"text\":\"x\",\"label\":\"pre\"}]}\n"
      "{\"id\":\"b\",\"sentences\":[{\"text\":\"y\"}]}\n");
  sm::Corpus corpus = sm::load_corpus(in);
  CHECK_FALSE(corpus.labeled);
  corpus.documents[1].sentences[0].gold_label = sm::SectionLabel::Other;
  sm::refresh_labeled_flag(&corpus);
  CHECK(corpus.labeled);
}
