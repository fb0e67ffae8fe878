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

#include "termdialog/lexicon.h"

#include <algorithm>
#include <fstream>

#include "termdialog/error.h"
#include "termdialog/text.h"

namespace termdialog {

Lexicon Lexicon::from_terms(const std::vector<std::string>& entries,
                            std::string source_path) {
  Lexicon lex;
  lex.source_path_ = std::move(source_path);
  lex.terms_.reserve(entries.size());
  for (const auto& entry : entries) {
    std::string term = normalize_term(entry);
    if (!term.empty()) lex.terms_.insert(std::move(term));
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open wordlist: " + path);

  Lexicon lex;
  lex.source_path_ = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_valid_utf8(line)) {
      throw EncodingError("invalid UTF-8 in wordlist " + path, line_no);
    }
    std::string_view view = trim(line);
    // A UTF-8 byte order mark on the first line is not part of the term.
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) {
      view = trim(view.substr(3));
    }
    if (view.empty() || view.front() == '#') continue;
    lex.terms_.insert(to_lower(view));
  }
  if (in.bad()) throw LoadError("read failure on wordlist: " + path);
  return lex;
}

bool Lexicon::contains_normalized(std::string_view term) const {
  return terms_.find(term) != terms_.end();
}

bool Lexicon::contains(std::string_view token) const {
  thread_local std::string buffer;
  to_lower_into(trim(token), &buffer);
  if (buffer.empty()) return false;
  if (contains_normalized(buffer)) return true;

  std::string_view whole = buffer;
  if (whole.find('-') == std::string_view::npos) return false;
  size_t start = 0;
  while (start <= whole.size()) {
    size_t end = whole.find('-', start);
    if (end == std::string_view::npos) end = whole.size();
    if (end > start && contains_normalized(whole.substr(start, end - start))) {
      return true;
    }
    start = end + 1;
  }
  return false;
}

std::vector<std::string> Lexicon::sorted_terms() const {
  std::vector<std::string> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace termdialog
