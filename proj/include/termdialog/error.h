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

#ifndef TERMDIALOG_ERROR_H_
#define TERMDIALOG_ERROR_H_

#include <stdexcept>
#include <string>

namespace termdialog {

// Base class for every error raised by the library. The CLI maps all of
// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened or read.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Input bytes are not valid UTF-8.
class EncodingError : public Error {
 public:
  EncodingError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Input violates a structural contract (overlapping spans, marker already
// present, misaligned lengths, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or missing configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace termdialog

#endif  // TERMDIALOG_ERROR_H_
