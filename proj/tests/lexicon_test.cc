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

#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "termdialog/error.h"
#include "termdialog/lexicon.h"
#include "termdialog/random.h"
#include "test_util.h"

using termdialog::Lexicon;

TEST_SUITE("lexicon") {

TEST_CASE("load lowercases, trims and deduplicates") {
  testutil::TempDir dir("lexicon_load");
  testutil::write(dir.file("w.txt"), "Infection\nspine\ninfection\n\n");
  const Lexicon lex = Lexicon::load(dir.file("w.txt"));
  CHECK(lex.size() == 2);
  CHECK(lex.sorted_terms() == std::vector<std::string>{"infection", "spine"});
  CHECK(lex.source_path() == dir.file("w.txt"));
}

TEST_CASE("empty file gives an empty lexicon") {
  testutil::TempDir dir("lexicon_empty");
  testutil::write(dir.file("w.txt"), "");
  CHECK(Lexicon::load(dir.file("w.txt")).size() == 0);
}

TEST_CASE("comments, BOM and CRLF are handled") {
  testutil::TempDir dir("lexicon_bom");
  testutil::write(dir.file("w.txt"), "\xEF\xBB\xBF" "Fever\r\n# note\r\n  cough \r\n");
  const Lexicon lex = Lexicon::load(dir.file("w.txt"));
  CHECK(lex.sorted_terms() == std::vector<std::string>{"cough", "fever"});
}

TEST_CASE("fixture wordlist size matches the line-dedupe count") {
  // 203 = grep -v '^#' | trim | drop blanks | tr A-Z a-z | sort -u | wc -l
  const Lexicon lex = Lexicon::load(testutil::fixture("medical_wordlist.txt"));
  CHECK(lex.size() == 203);
  const Lexicon again = Lexicon::load(testutil::fixture("medical_wordlist.txt"));
  CHECK(lex.sorted_terms() == again.sorted_terms());
}

TEST_CASE("missing file raises LoadError") {
  CHECK_THROWS_AS(Lexicon::load("/nonexistent/wordlist.txt"), termdialog::LoadError);
}

TEST_CASE("invalid UTF-8 reports the line") {
  testutil::TempDir dir("lexicon_utf8");
  testutil::write(dir.file("w.txt"), "fever\ncough\nbad\xFF\xFEterm\n");
  try {
    Lexicon::load(dir.file("w.txt"));
    FAIL("expected EncodingError");
  } catch (const termdialog::EncodingError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("contains is case-insensitive") {
  const Lexicon lex = Lexicon::from_terms({"infection"});
  CHECK(lex.contains("Infection"));
  CHECK(lex.contains("INFECTION"));
  CHECK_FALSE(lex.contains("brother"));
  CHECK_FALSE(lex.contains(""));
}

TEST_CASE("hyphenated tokens fall back to their pieces") {
  const Lexicon lex = Lexicon::from_terms({"ray", "covid-19", "blocker"});
  CHECK(lex.contains("x-ray"));
  CHECK(lex.contains("COVID-19"));
  CHECK(lex.contains("beta-blocker"));
  CHECK_FALSE(lex.contains("x-rays"));
  CHECK_FALSE(lex.contains("-"));
  CHECK_FALSE(lex.contains_normalized("x-ray"));
}

TEST_CASE("agrees with a linear scan on random queries") {
  termdialog::Rng rng(99);
  auto word = [&rng] {
    std::string w;
    const int n = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < n; ++i) {
      const uint64_t r = rng.below(30);
      w += r < 26 ? static_cast<char>((rng.below(2) ? 'a' : 'A') + r) : '-';
    }
    return w;
  };
  std::vector<std::string> terms;
  for (int i = 0; i < 10000; ++i) terms.push_back(word());
  const Lexicon lex = Lexicon::from_terms(terms);
  const oracle::NaiveLexicon naive(terms);
  CHECK(lex.size() == naive.distinct());
  for (int i = 0; i < 1000; ++i) {
    const std::string q = word();
    CHECK(lex.contains(q) == naive.matches(q));
    CHECK(lex.contains(q) == lex.contains(oracle::lower(q)));
  }
}

}  // TEST_SUITE
