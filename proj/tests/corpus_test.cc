// Copyright 2026 The TermDialog Authors.
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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.h"
#include "termdialog/corpus.h"
#include "termdialog/error.h"
#include "termdialog/random.h"
#include "test_util.h"

using namespace termdialog;

namespace {

DialoguePair make_pair(const std::string& id, std::vector<std::string> x, std::vector<std::string> y) {
  DialoguePair p;
  p.id = id;
  for (auto& s : x) p.input_utterances.push_back({Speaker::kPatient, s});
  for (auto& s : y) p.target_utterances.push_back({Speaker::kDoctor, s});
  return p;
}

std::string repeat_words(int n, const std::string& w) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + w + std::to_string(i);
  return s;
}

size_t token_count(const std::vector<Utterance>& utts) {
  size_t n = 0;
  for (const auto& u : utts) n += oracle::tokenize(u.text).size();
  return n;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("single exchange gives one pair") {
  std::vector<DialoguePair> out;
  REQUIRE(parse_raw_line(
      R"({"id":"a","utterances":[{"speaker":"patient","text":"hi"},{"speaker":"doctor","text":"hello"}]})",
      &out));
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "a#0");
  CHECK(out[0].input_utterances == std::vector<Utterance>{{Speaker::kPatient, "hi"}});
  CHECK(out[0].target_utterances == std::vector<Utterance>{{Speaker::kDoctor, "hello"}});
}

TEST_CASE("two doctor turns give two pairs with growing context") {
  std::vector<DialoguePair> out;
  REQUIRE(parse_raw_line(
      R"({"id":7,"utterances":[{"speaker":"patient","text":"a"},{"speaker":"doctor","text":"b"},)"
      R"({"speaker":"patient","text":"c"},{"speaker":"doctor","text":"d"},{"speaker":"Doctor","text":"e"}]})",
      &out));
  REQUIRE(out.size() == 2);
  CHECK(out[1].id == "7#1");
  CHECK(out[1].input_utterances.size() == 3);
  CHECK(out[1].target_utterances.size() == 2);
}

TEST_CASE("malformed lines are rejected") {
  std::vector<DialoguePair> out;
  CHECK_FALSE(parse_raw_line("{nope", &out));
  CHECK_FALSE(parse_raw_line(R"({"id":"x"})", &out));
  CHECK_FALSE(parse_raw_line(R"({"id":"x","utterances":[{"speaker":"nurse","text":"hi"}]})", &out));
  CHECK_FALSE(parse_raw_line(R"({"id":"x","utterances":[{"speaker":"doctor","text":"  "}]})", &out));
  CHECK(out.empty());
}

TEST_CASE("fixture pair count matches a doctor-turn counter") {
  const ParseResult r = parse_raw(testutil::fixture("dialogues_100.jsonl"));
  std::ifstream in(testutil::fixture("dialogues_100.jsonl"));
  size_t expected = 0, good = 0, bad = 0;
  for (std::string line; std::getline(in, line);) {
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    bool ok = !doc.is_discarded() && doc.contains("utterances");
    std::vector<std::string> speakers;
    if (ok) {
      for (const auto& u : doc["utterances"]) {
        speakers.push_back(oracle::lower(u["speaker"].get<std::string>()));
        ok = ok && (speakers.back() == "doctor" || speakers.back() == "patient");
      }
    }
    if (!ok) {
      ++bad;
      continue;
    }
    ++good;
    expected += oracle::doctor_turns(speakers);
  }
  CHECK(r.pairs.size() == expected);
  CHECK(r.dialogues == good);
  CHECK(r.skipped_lines == bad);
  CHECK(bad == 2);
}

TEST_CASE("missing raw file is a LoadError") {
  CHECK_THROWS_AS(parse_raw("/nonexistent/raw.jsonl"), LoadError);
}

TEST_CASE("filter drops short sides") {
  FilterConfig cfg;
  cfg.min_tokens = 1;
  auto out = filter_and_truncate({make_pair("a", {"hello there"}, {}), make_pair("b", {"x"}, {"y"})}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "b");
  cfg.min_tokens = 2;
  CHECK(filter_and_truncate({make_pair("c", {"one ."}, {"two words"})}, cfg).empty());
}

TEST_CASE("source truncation keeps the most recent turns") {
  FilterConfig cfg;
  auto p = make_pair("a", {repeat_words(300, "old"), repeat_words(200, "mid"), repeat_words(100, "new")},
                     {"fine thanks"});
  auto out = filter_and_truncate({p}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(token_count(out[0].input_utterances) <= 512);
  CHECK(out[0].input_utterances.back().text == p.input_utterances.back().text);
  CHECK(out[0].input_utterances.size() == 2);

  cfg.max_src_tokens = 50;
  out = filter_and_truncate({p}, cfg);
  REQUIRE(out[0].input_utterances.size() == 1);
  CHECK(token_count(out[0].input_utterances) == 50);
  CHECK(out[0].input_utterances[0].text.ends_with("new99"));
}

TEST_CASE("target truncation keeps the first tokens") {
  FilterConfig cfg;
  cfg.max_tgt_tokens = 5;
  auto out = filter_and_truncate({make_pair("a", {"hi there"}, {"a b c", "d e f g"})}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].target_utterances.size() == 2);
  CHECK(out[0].target_utterances[1].text == "d e");
}

TEST_CASE("filter matches a length-threshold oracle and never grows pairs") {
  Rng rng(8);
  std::vector<DialoguePair> pairs;
  for (int i = 0; i < 1000; ++i) {
    pairs.push_back(make_pair("p" + std::to_string(i),
                              {repeat_words(static_cast<int>(rng.below(4)), "w")},
                              {repeat_words(static_cast<int>(rng.below(4)), "v") + (rng.below(2) ? " ." : "")}));
  }
  FilterConfig cfg;
  cfg.min_tokens = 2;
  size_t expected = 0;
  for (const auto& p : pairs) {
    expected += oracle::word_tokens(p.input_utterances[0].text) >= 2 &&
                oracle::word_tokens(p.target_utterances[0].text) >= 2;
  }
  const auto out = filter_and_truncate(pairs, cfg);
  CHECK(out.size() == expected);
  CHECK(std::is_sorted(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.id.substr(1)) < std::stoi(b.id.substr(1));
  }));
}

TEST_CASE("split sizes follow floor arithmetic") {
  const SplitRatios r;
  CHECK(split_sizes(1000, r) == std::array<size_t, 3>{900, 50, 50});
  CHECK(split_sizes(20, r) == std::array<size_t, 3>{18, 1, 1});
  for (size_t n : {0u, 1u, 19u, 10003u, 246305u}) {
    const size_t part = static_cast<size_t>(std::floor(n / 20.0));
    CHECK(split_sizes(n, r) == std::array<size_t, 3>{n - 2 * part, part, part});
  }
  CHECK(split_sizes(10003, r) == std::array<size_t, 3>{9003, 500, 500});
  CHECK_THROWS_AS(split_sizes(10, {0.9, 0.05, 0.1}), ConfigError);
  CHECK_THROWS_AS(split_sizes(10, {1.1, -0.05, -0.05}), ConfigError);
}

TEST_CASE("split is a seeded partition") {
  std::vector<DialoguePair> pairs;
  for (int i = 0; i < 1000; ++i) pairs.push_back(make_pair("p" + std::to_string(i), {"a b"}, {"c d"}));
  const Splits a = split(pairs, {}, 42);
  const Splits b = split(pairs, {}, 42);
  const Splits c = split(pairs, {}, 43);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  CHECK(a.train != c.train);
  std::set<std::string> ids;
  for (const auto* part : {&a.train, &a.val, &a.test}) {
    for (const auto& p : *part) ids.insert(p.id);
  }
  CHECK(ids.size() == 1000);
  CHECK(a.train.size() == 900);
}

TEST_CASE("stats hand count") {
  const Lexicon lex = Lexicon::from_terms({"infection"});
  const CorpusStats s = compute_stats({make_pair("a", {"there is infection on hand"}, {"take rest ."})}, lex);
  CHECK(s.words_in == 5);
  CHECK(s.terms_in == 1);
  CHECK(s.avg_utts_in() == 1.0);
  CHECK(s.words_out == 2);
  CHECK(compute_stats(std::vector<DialoguePair>{}, lex) == CorpusStats{});
  CHECK(CorpusStats{}.avg_words_in() == 0.0);
}

TEST_CASE("stats are additive") {
  const Lexicon lex = Lexicon::load(testutil::fixture("medical_wordlist.txt"));
  const auto pairs = parse_raw(testutil::fixture("dialogues_100.jsonl")).pairs;
  const std::vector<DialoguePair> a(pairs.begin(), pairs.begin() + 40), b(pairs.begin() + 40, pairs.end());
  CHECK(compute_stats(pairs, lex) == compute_stats(a, lex) + compute_stats(b, lex));
}

TEST_CASE("stats table uses the dataset row labels") {
  const std::string table = format_stats_table({{"Train", CorpusStats{}}, {"Val", CorpusStats{}}});
  for (const auto& label : stats_row_labels()) CHECK(table.find(label) != std::string::npos);
  CHECK(stats_row_labels().front() == "# Dialogues");
  CHECK(stats_row_labels().back() == "Avg. # Terms in Output Text");
  CHECK(table.starts_with("Datasets"));
}

}  // TEST_SUITE
