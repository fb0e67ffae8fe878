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

#ifndef TERMDIALOG_VOCAB_H_
#define TERMDIALOG_VOCAB_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace termdialog {

// Token <-> id bijection. Ids 0..4 are reserved for the special tokens.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kTerm = 4;
  static constexpr int kNumSpecials = 5;

  // Vocabulary holding only the specials.
  Vocab();

  // Rebuilds from a full id-ordered token list (as stored in checkpoints).
  // Throws ValidationError if the specials are missing or tokens repeat.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  int id(std::string_view token) const;
  const std::string& token(int id) const;
  bool contains(std::string_view token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  static bool is_special(int id) { return id >= 0 && id < kNumSpecials; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  int add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;

  friend Vocab build_vocab(const std::vector<std::vector<std::string>>&, int);
};

// Keeps tokens seen at least min_freq times, ordered by descending count then
// lexicographically. The marker string maps to kTerm and is never counted as
// an ordinary token. Throws ValidationError on an empty corpus.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_freq);

}  // namespace termdialog

#endif  // TERMDIALOG_VOCAB_H_
