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

#ifndef TERMDIALOG_LEXICON_H_
#define TERMDIALOG_LEXICON_H_

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace termdialog {

// Immutable set of normalized (lowercase, trimmed) single-word terms used as
// the distant-supervision source. Safe for concurrent readers.
class Lexicon {
 public:
  Lexicon() = default;

  // Builds a lexicon from raw entries. Entries are normalized; blank entries
  // and duplicates are dropped.
  static Lexicon from_terms(const std::vector<std::string>& entries,
                            std::string source_path = "");

  // Loads a wordlist: UTF-8, one term per line, lines starting with '#'
  // (after trimming) are comments. Throws LoadError if the file cannot be
  // read and EncodingError (with the 1-based line) on invalid UTF-8.
  static Lexicon load(const std::string& path);

  // Membership of normalize(token). Tokens with internal hyphens that miss
  // as a whole are split on '-' and match if any piece matches.
  bool contains(std::string_view token) const;

  // Exact lookup of an already normalized term; no hyphen fallback.
  bool contains_normalized(std::string_view term) const;

  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::string& source_path() const { return source_path_; }

  // Terms in lexicographic order.
  std::vector<std::string> sorted_terms() const;

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::unordered_set<std::string, Hash, std::equal_to<>> terms_;
  std::string source_path_;
};

inline Lexicon load_lexicon(const std::string& path) {
  return Lexicon::load(path);
}

}  // namespace termdialog

#endif  // TERMDIALOG_LEXICON_H_
