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

// Statement files hold either one statement (possibly spanning several
// lines) or a list of named statements, one per line:
//
//   # comment
//   gt: EXISTS a IN objects : a.color = red
//   h2: COUNT(objects) = 4
//
// A file is a list when its first non-comment line starts with "name:".

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::dsl {

struct NamedStatement {
  std::string id;
  Statement statement;
};

namespace internal {

inline bool IsIdChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// Length of a "name:" prefix (including trailing spaces), or 0.
inline std::size_t NamePrefix(const std::string& line, std::string* name) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  const std::size_t start = i;
  while (i < line.size() && IsIdChar(line[i])) ++i;
  if (i == start) return 0;
  const std::size_t end = i;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i >= line.size() || line[i] != ':') return 0;
  ++i;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (name) *name = line.substr(start, end - start);
  return i;
}

inline bool Blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace internal

// `default_id` names the statement of a single-statement file. Parse errors
// report positions within `text`.
inline std::vector<NamedStatement> ParseStatementFile(const std::string& text,
                                                      const std::string& default_id) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  std::size_t first = 0;
  while (first < lines.size() && internal::Blank(lines[first])) ++first;
  if (first == lines.size()) {
    throw Error(ErrorCode::kMissingStatement, "statement file contains no statement");
  }
  if (internal::NamePrefix(lines[first], nullptr) == 0) {
    return {{default_id, ParseStatement(text)}};
  }
  std::vector<NamedStatement> out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (internal::Blank(lines[i])) continue;
    std::string name;
    const std::size_t prefix = internal::NamePrefix(lines[i], &name);
    if (prefix == 0) {
      throw ParseError(ParseError::Kind::kSyntax, i + 1, 1,
                       "expected 'name: statement' in a statement list");
    }
    for (const auto& existing : out) {
      if (existing.id == name) {
        throw ParseError(ParseError::Kind::kSyntax, i + 1, 1,
                         "duplicate statement name '" + name + "'");
      }
    }
    try {
      out.push_back({name, ParseStatement(lines[i].substr(prefix))});
    } catch (const ParseError& e) {
      throw ParseError(e.kind(), i + 1, e.column() + prefix, e.detail());
    }
  }
  return out;
}

inline std::vector<NamedStatement> LoadStatementFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open statement file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseStatementFile(buf.str(), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), e.line(), e.column(), path.string() + ": " + e.detail());
  }
}

}  // namespace kandinsky::dsl
