// Copyright 2026 The wfstd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WFSTD_ERROR_H_
#define WFSTD_ERROR_H_

#include <stdexcept>
#include <string>

namespace wfstd {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed text input. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Invalid state id, unsorted arc list, mismatched alphabets, ...
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Model-level consistency violations (ARPA counts, back-off closure).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class OovError : public Error {
 public:
  explicit OovError(const std::string &token)
      : Error("out-of-vocabulary token: " + token), token_(token) {}
  const std::string &token() const { return token_; }

 private:
  std::string token_;
};

// Raised when a search or rescoring pass has no surviving hypothesis.
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure of one pipeline stage; what() reads "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(const std::string &stage, const std::string &cause)
      : Error(stage + ": " + cause), stage_(stage) {}
  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace wfstd

#endif  // WFSTD_ERROR_H_
