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

#include "termdialog/vocab.h"

#include <algorithm>

#include "termdialog/annotator.h"
#include "termdialog/error.h"

namespace termdialog {
namespace {

const std::vector<std::string>& special_tokens() {
  static const std::vector<std::string> specials = {
      "<pad>", "<s>", "</s>", "<unk>", std::string(kTermMarker)};
  return specials;
}

}  // namespace

Vocab::Vocab() {
  for (const auto& s : special_tokens()) add(s);
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, size());
  if (!inserted) throw ValidationError("duplicate vocabulary token: " + token);
  tokens_.push_back(token);
  return it->second;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  const auto& specials = special_tokens();
  if (tokens.size() < specials.size() ||
      !std::equal(specials.begin(), specials.end(), tokens.begin())) {
    throw ValidationError("vocabulary does not start with the special tokens");
  }
  Vocab v;
  for (size_t i = specials.size(); i < tokens.size(); ++i) v.add(tokens[i]);
  return v;
}

int Vocab::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) {
    throw ValidationError("token id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_freq) {
  std::unordered_map<std::string, long> counts;
  size_t total = 0;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) {
      ++total;
      if (tok == kTermMarker) continue;
      ++counts[tok];
    }
  }
  if (total == 0) throw ValidationError("cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, long>> kept;
  for (auto& [tok, n] : counts) {
    if (n >= min_freq) kept.emplace_back(tok, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocab v;
  for (const auto& [tok, n] : kept) {
    // Literal special surfaces in text stay ordinary-looking but map to
    // their special ids.
    if (!v.contains(tok)) v.add(tok);
  }
  return v;
}

}  // namespace termdialog
