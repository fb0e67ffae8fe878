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

#ifndef TERMDIALOG_TEXT_H_
#define TERMDIALOG_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace termdialog {

// Byte-level helpers. Case folding is ASCII-only; bytes >= 0x80 pass through
// unchanged so multi-byte UTF-8 sequences are never split or altered.

bool is_ascii_space(char c);
bool is_ascii_punct(char c);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
void to_lower_into(std::string_view s, std::string* out);

// Lowercase + trim, the single normalization used for lexicon entries and
// lookups.
std::string normalize_term(std::string_view s);

// Returns true if `s` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view s);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace termdialog

#endif  // TERMDIALOG_TEXT_H_
