// Copyright 2026 The Kandinsky Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kandinsky {

// Every failure surfaced by the library carries one of these codes. The CLI
// maps them one-to-one onto process exit codes, so the numeric values are
// part of the public contract and must stay stable.
enum class ErrorCode : int {
  kParseFailure = 2,
  kYieldTooLow = 3,
  kPlacementExhausted = 4,
  kIoFailure = 5,
  kLabelInconsistency = 6,
  kInfeasible = 7,
  kMissingStatement = 8,
  kUnknownStatementId = 9,
  kNoNearMissFound = 10,
  kInvalidArgument = 11,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kYieldTooLow: return "YieldTooLow";
    case ErrorCode::kPlacementExhausted: return "PlacementExhausted";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kLabelInconsistency: return "LabelInconsistency";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kMissingStatement: return "MissingStatement";
    case ErrorCode::kUnknownStatementId: return "UnknownStatementId";
    case ErrorCode::kNoNearMissFound: return "NoNearMissFound";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Statement-language diagnostics. Line and column are 1-based.
class ParseError : public Error {
 public:
  enum class Kind { kSyntax, kType, kUndeclaredVariable, kVocabulary };

  ParseError(Kind kind, std::size_t line, std::size_t column,
             const std::string& message)
      : Error(ErrorCode::kParseFailure,
              std::string(KindName(kind)) + " error at " +
                  std::to_string(line) + ":" + std::to_string(column) + ": " +
                  message),
        kind_(kind),
        line_(line),
        column_(column),
        detail_(message) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  // The message without the kind and position prefix.
  const std::string& detail() const { return detail_; }

  static const char* KindName(Kind kind) {
    switch (kind) {
      case Kind::kSyntax: return "syntax";
      case Kind::kType: return "type";
      case Kind::kUndeclaredVariable: return "undeclared-variable";
      case Kind::kVocabulary: return "vocabulary";
    }
    return "unknown";
  }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

}  // namespace kandinsky
