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

// The statement language: a small predicate DSL over figures.
//
//   stmt     := disj
//   disj     := conj ("OR" conj)*
//   conj     := unary ("AND" unary)*
//   unary    := "NOT" unary | "(" stmt ")" | atom
//   atom     := countCmp | quant | gestalt
//   countCmp := count cmpOp (count | integer)
//   count    := "COUNT" "(" selector ")"
//   quant    := ("EXISTS" | "FORALL") var ("," var)* ["DISTINCT"] "IN" selector ":" pred
//   gestalt  := ("CIRCULAR" | "SYMMETRIC" | "FLOWER") "(" selector ")"
//             | "CLUSTERED" "(" selector "," integer ")"
//   selector := "objects" ["WHERE" cond]
//   cond     := cond-disjunction of attribute tests: attr ("=" | "!=") value
//   pred     := pred-disjunction over var.attr tests and relations
//               LEFT_OF RIGHT_OF ABOVE BELOW TOUCHES SAME_SHAPE SAME_COLOR
//               SMALLER BIGGER (two args) and BETWEEN (three args)
//
// Attributes: shape, color, size (small | big), side (left | right | upper |
// lower). Keywords, attribute names and values are case-insensitive;
// variable names are case-sensitive. A quantifier body extends as far right
// as possible, so a quantifier combined with other statement terms must be
// parenthesized.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/model.hpp"

namespace kandinsky::dsl {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };
enum class Attribute { kShape, kColor, kSize, kSide };
enum class SizeClass { kSmall, kBig };
enum class Side { kLeft, kRight, kUpper, kLower };
enum class Relation {
  kLeftOf,
  kRightOf,
  kAbove,
  kBelow,
  kBetween,
  kTouches,
  kSameShape,
  kSameColor,
  kSmaller,
  kBigger,
};
enum class Quantifier { kExists, kForall };
enum class GestaltKind { kCircular, kSymmetric, kClustered, kFlower };

using AttrValue = std::variant<Shape, Color, SizeClass, Side>;

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

// A variable occurrence. An empty name denotes the implicit object a
// selector condition is tested against.
struct VarRef {
  std::string name;
  int slot = -1;
  SourcePos pos;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Selector {
  NodePtr where;  // null: every object
};

struct Junction {
  bool is_and = true;
  std::vector<NodePtr> children;
};
struct Negation {
  NodePtr child;
};
struct CountCompare {
  Selector lhs;
  CmpOp op = CmpOp::kEq;
  std::variant<Selector, std::int64_t> rhs;
};
struct Quantified {
  Quantifier quantifier = Quantifier::kExists;
  std::vector<std::string> vars;
  bool distinct = false;
  Selector domain;
  NodePtr body;
};
struct GestaltAtom {
  GestaltKind kind = GestaltKind::kCircular;
  Selector target;
  std::int64_t k = 0;
};
struct AttrTest {
  VarRef var;
  Attribute attribute = Attribute::kColor;
  bool negated = false;
  AttrValue value;
};
struct RelationAtom {
  Relation relation = Relation::kLeftOf;
  std::vector<VarRef> args;
};

struct Node {
  SourcePos pos;
  std::variant<Junction, Negation, CountCompare, Quantified, GestaltAtom, AttrTest,
               RelationAtom>
      payload;
};

template <typename T>
NodePtr MakeNode(T payload, SourcePos pos = {}) {
  return std::make_shared<const Node>(Node{pos, std::move(payload)});
}

// A parsed statement. Immutable after construction and safe to share.
struct Statement {
  NodePtr root;
  std::string source;
};

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

inline std::string Lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string Upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

inline std::string_view AttributeName(Attribute a) {
  switch (a) {
    case Attribute::kShape: return "shape";
    case Attribute::kColor: return "color";
    case Attribute::kSize: return "size";
    case Attribute::kSide: return "side";
  }
  return "?";
}

inline std::string_view SizeClassName(SizeClass s) {
  return s == SizeClass::kSmall ? "small" : "big";
}

inline std::string_view SideName(Side s) {
  switch (s) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kUpper: return "upper";
    case Side::kLower: return "lower";
  }
  return "?";
}

inline std::string_view RelationName(Relation r) {
  switch (r) {
    case Relation::kLeftOf: return "LEFT_OF";
    case Relation::kRightOf: return "RIGHT_OF";
    case Relation::kAbove: return "ABOVE";
    case Relation::kBelow: return "BELOW";
    case Relation::kBetween: return "BETWEEN";
    case Relation::kTouches: return "TOUCHES";
    case Relation::kSameShape: return "SAME_SHAPE";
    case Relation::kSameColor: return "SAME_COLOR";
    case Relation::kSmaller: return "SMALLER";
    case Relation::kBigger: return "BIGGER";
  }
  return "?";
}

inline std::size_t RelationArity(Relation r) { return r == Relation::kBetween ? 3 : 2; }

// Relations whose truth does not depend on argument order (for BETWEEN, the
// last two arguments commute).
inline bool IsSymmetricRelation(Relation r) {
  return r == Relation::kTouches || r == Relation::kSameShape || r == Relation::kSameColor;
}

inline std::string_view GestaltName(GestaltKind g) {
  switch (g) {
    case GestaltKind::kCircular: return "CIRCULAR";
    case GestaltKind::kSymmetric: return "SYMMETRIC";
    case GestaltKind::kClustered: return "CLUSTERED";
    case GestaltKind::kFlower: return "FLOWER";
  }
  return "?";
}

inline std::string_view CmpOpText(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

inline bool Compare(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
    case CmpOp::kEq: return lhs == rhs;
    case CmpOp::kNe: return lhs != rhs;
    case CmpOp::kLt: return lhs < rhs;
    case CmpOp::kLe: return lhs <= rhs;
    case CmpOp::kGt: return lhs > rhs;
    case CmpOp::kGe: return lhs >= rhs;
  }
  return false;
}

inline std::string AttrValueName(const AttrValue& value) {
  return std::visit(Overloaded{
                        [](Shape s) { return std::string(ShapeName(s)); },
                        [](Color c) { return std::string(ColorName(c)); },
                        [](SizeClass s) { return std::string(SizeClassName(s)); },
                        [](Side s) { return std::string(SideName(s)); },
                    },
                    value);
}

inline Attribute AttributeOf(const AttrValue& value) {
  return static_cast<Attribute>(value.index());
}

// Any word naming an attribute value, whatever attribute it belongs to.
inline std::optional<AttrValue> LookupAnyValue(std::string_view word) {
  const std::string w = Lower(word);
  if (auto s = ParseShape(w)) return AttrValue{*s};
  if (auto c = ParseColor(w)) return AttrValue{*c};
  if (w == "small") return AttrValue{SizeClass::kSmall};
  if (w == "big") return AttrValue{SizeClass::kBig};
  if (w == "left") return AttrValue{Side::kLeft};
  if (w == "right") return AttrValue{Side::kRight};
  if (w == "upper") return AttrValue{Side::kUpper};
  if (w == "lower") return AttrValue{Side::kLower};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace internal {

enum class TokKind { kIdent, kInt, kSymbol, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;
  SourcePos pos;
};

inline std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const SourcePos pos{line, column};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      tokens.push_back({TokKind::kIdent, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tokens.push_back({TokKind::kInt, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view kTwoChar[] = {"==", "!=", "<=", ">="};
    bool matched = false;
    for (std::string_view sym : kTwoChar) {
      if (text.substr(i, 2) == sym) {
        tokens.push_back({TokKind::kSymbol, std::string(sym), pos});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),:.=<>").find(c) != std::string_view::npos) {
      tokens.push_back({TokKind::kSymbol, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw ParseError(ParseError::Kind::kSyntax, line, column,
                     std::string("unexpected character '") + c + "'");
  }
  tokens.push_back({TokKind::kEnd, "", {line, column}});
  return tokens;
}

inline const std::set<std::string>& ReservedWords() {
  static const std::set<std::string> words = {
      "and", "or", "not", "exists", "forall", "distinct", "in", "where", "count", "objects",
      "left_of", "right_of", "above", "below", "between", "touches", "same_shape",
      "same_color", "smaller", "bigger", "circular", "symmetric", "clustered", "flower"};
  return words;
}

inline std::optional<Relation> LookupRelation(std::string_view word) {
  static const std::map<std::string, Relation> table = {
      {"LEFT_OF", Relation::kLeftOf},       {"RIGHT_OF", Relation::kRightOf},
      {"ABOVE", Relation::kAbove},          {"BELOW", Relation::kBelow},
      {"BETWEEN", Relation::kBetween},      {"TOUCHES", Relation::kTouches},
      {"SAME_SHAPE", Relation::kSameShape}, {"SAME_COLOR", Relation::kSameColor},
      {"SMALLER", Relation::kSmaller},      {"BIGGER", Relation::kBigger}};
  auto it = table.find(Upper(word));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline std::optional<GestaltKind> LookupGestalt(std::string_view word) {
  const std::string w = Upper(word);
  if (w == "CIRCULAR") return GestaltKind::kCircular;
  if (w == "SYMMETRIC") return GestaltKind::kSymmetric;
  if (w == "CLUSTERED") return GestaltKind::kClustered;
  if (w == "FLOWER") return GestaltKind::kFlower;
  return std::nullopt;
}

inline std::optional<Attribute> LookupAttribute(std::string_view word) {
  const std::string w = Lower(word);
  if (w == "shape") return Attribute::kShape;
  if (w == "color" || w == "colour") return Attribute::kColor;
  if (w == "size") return Attribute::kSize;
  if (w == "side") return Attribute::kSide;
  return std::nullopt;
}

struct ParseOptions {
  bool allow_undeclared = false;
};

class Parser {
 public:
  Parser(std::string_view text, ParseOptions options)
      : tokens_(Tokenize(text)), options_(options) {}

  NodePtr ParseAll() {
    NodePtr root = ParseDisjunction();
    if (Peek().kind != TokKind::kEnd) Fail(Peek(), "unexpected '" + Peek().text + "'");
    return root;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& Next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool IsKeyword(const Token& t, std::string_view keyword) const {
    return t.kind == TokKind::kIdent && Upper(t.text) == keyword;
  }
  bool IsSymbol(const Token& t, std::string_view symbol) const {
    return t.kind == TokKind::kSymbol && t.text == symbol;
  }
  bool AcceptKeyword(std::string_view keyword) {
    if (!IsKeyword(Peek(), keyword)) return false;
    Next();
    return true;
  }
  bool AcceptSymbol(std::string_view symbol) {
    if (!IsSymbol(Peek(), symbol)) return false;
    Next();
    return true;
  }
  [[noreturn]] void Fail(const Token& at, const std::string& message,
                         ParseError::Kind kind = ParseError::Kind::kSyntax) const {
    throw ParseError(kind, at.pos.line, at.pos.column, message);
  }
  std::string Describe(const Token& t) const {
    return t.kind == TokKind::kEnd ? "end of input" : "'" + t.text + "'";
  }
  void ExpectKeyword(std::string_view keyword) {
    if (!AcceptKeyword(keyword)) {
      Fail(Peek(), "expected " + std::string(keyword) + ", found " + Describe(Peek()));
    }
  }
  void ExpectSymbol(std::string_view symbol) {
    if (!AcceptSymbol(symbol)) {
      Fail(Peek(), "expected '" + std::string(symbol) + "', found " + Describe(Peek()));
    }
  }

  // --- statement level -----------------------------------------------------

  NodePtr ParseDisjunction() {
    const SourcePos pos = Peek().pos;
    std::vector<NodePtr> terms = {ParseConjunction()};
    while (AcceptKeyword("OR")) terms.push_back(ParseConjunction());
    if (terms.size() == 1) return terms.front();
    return MakeNode(Junction{false, std::move(terms)}, pos);
  }

  NodePtr ParseConjunction() {
    const SourcePos pos = Peek().pos;
    std::vector<NodePtr> terms = {ParseUnary()};
    while (AcceptKeyword("AND")) terms.push_back(ParseUnary());
    if (terms.size() == 1) return terms.front();
    return MakeNode(Junction{true, std::move(terms)}, pos);
  }

  NodePtr ParseUnary() {
    const Token& t = Peek();
    if (AcceptKeyword("NOT")) return MakeNode(Negation{ParseUnary()}, t.pos);
    if (AcceptSymbol("(")) {
      NodePtr inner = ParseDisjunction();
      ExpectSymbol(")");
      return inner;
    }
    return ParseAtom();
  }

  NodePtr ParseAtom() {
    const Token& t = Peek();
    if (IsKeyword(t, "COUNT")) return ParseCountCompare();
    if (IsKeyword(t, "EXISTS") || IsKeyword(t, "FORALL")) return ParseQuantifier();
    if (t.kind == TokKind::kIdent) {
      if (auto g = LookupGestalt(t.text)) return ParseGestalt(*g);
      if (LookupRelation(t.text)) {
        Fail(t, "relation " + Upper(t.text) +
                    " needs quantified variables; use it inside EXISTS/FORALL");
      }
    }
    if (t.kind == TokKind::kInt) {
      Fail(t, "a statement cannot start with a number; put the COUNT(...) on the left");
    }
    Fail(t, "expected COUNT, EXISTS, FORALL or a Gestalt predicate, found " + Describe(t));
  }

  CmpOp ParseCmpOp() {
    const Token& t = Peek();
    if (t.kind == TokKind::kSymbol) {
      if (t.text == "=" || t.text == "==") { Next(); return CmpOp::kEq; }
      if (t.text == "!=") { Next(); return CmpOp::kNe; }
      if (t.text == "<") { Next(); return CmpOp::kLt; }
      if (t.text == "<=") { Next(); return CmpOp::kLe; }
      if (t.text == ">") { Next(); return CmpOp::kGt; }
      if (t.text == ">=") { Next(); return CmpOp::kGe; }
    }
    Fail(t, "expected a comparison operator, found " + Describe(t));
  }

  Selector ParseCount() {
    ExpectKeyword("COUNT");
    ExpectSymbol("(");
    Selector s = ParseSelector();
    ExpectSymbol(")");
    return s;
  }

  NodePtr ParseCountCompare() {
    const SourcePos pos = Peek().pos;
    CountCompare cmp;
    cmp.lhs = ParseCount();
    cmp.op = ParseCmpOp();
    const Token& rhs = Peek();
    if (IsKeyword(rhs, "COUNT")) {
      cmp.rhs = ParseCount();
    } else if (rhs.kind == TokKind::kInt) {
      cmp.rhs = ParseInteger();
    } else if (rhs.kind == TokKind::kIdent && LookupAnyValue(rhs.text)) {
      Fail(rhs, "cannot compare a count with the attribute value '" + rhs.text + "'",
           ParseError::Kind::kType);
    } else {
      Fail(rhs, "expected COUNT(...) or an integer, found " + Describe(rhs));
    }
    return MakeNode(std::move(cmp), pos);
  }

  std::int64_t ParseInteger() {
    const Token& t = Next();
    if (t.kind != TokKind::kInt) Fail(t, "expected an integer, found " + Describe(t));
    if (t.text.size() > 9) Fail(t, "integer literal too large");
    return std::stoll(t.text);
  }

  NodePtr ParseQuantifier() {
    const Token& head = Next();
    Quantified q;
    q.quantifier = IsKeyword(head, "EXISTS") ? Quantifier::kExists : Quantifier::kForall;
    do {
      const Token& v = Next();
      if (v.kind != TokKind::kIdent) Fail(v, "expected a variable name, found " + Describe(v));
      if (ReservedWords().count(Lower(v.text)) || LookupAttribute(v.text)) {
        Fail(v, "'" + v.text + "' is reserved and cannot name a variable");
      }
      if (std::find(q.vars.begin(), q.vars.end(), v.text) != q.vars.end()) {
        Fail(v, "variable '" + v.text + "' declared twice");
      }
      q.vars.push_back(v.text);
    } while (AcceptSymbol(","));
    q.distinct = AcceptKeyword("DISTINCT");
    ExpectKeyword("IN");
    q.domain = ParseSelector();
    ExpectSymbol(":");
    scopes_.push_back(q.vars);
    q.body = ParsePredDisjunction();
    scopes_.pop_back();
    return MakeNode(std::move(q), head.pos);
  }

  NodePtr ParseGestalt(GestaltKind kind) {
    const Token& head = Next();
    GestaltAtom g;
    g.kind = kind;
    ExpectSymbol("(");
    g.target = ParseSelector();
    if (kind == GestaltKind::kClustered) {
      ExpectSymbol(",");
      const Token& k = Peek();
      if (k.kind != TokKind::kInt) {
        Fail(k, "CLUSTERED expects an integer cluster count, found " + Describe(k),
             k.kind == TokKind::kIdent ? ParseError::Kind::kType : ParseError::Kind::kSyntax);
      }
      g.k = ParseInteger();
    }
    ExpectSymbol(")");
    return MakeNode(std::move(g), head.pos);
  }

  // --- selectors --------------------------------------------------------------

  Selector ParseSelector() {
    const Token& t = Peek();
    if (!AcceptKeyword("OBJECTS")) Fail(t, "expected 'objects', found " + Describe(t));
    Selector s;
    if (AcceptKeyword("WHERE")) {
      in_selector_ = true;
      s.where = ParsePredDisjunction();
      in_selector_ = false;
    }
    return s;
  }

  // --- object predicates (shared by selector conditions and quantifier
  // bodies; relations and variables are only legal in bodies) -----------------

  NodePtr ParsePredDisjunction() {
    const SourcePos pos = Peek().pos;
    std::vector<NodePtr> terms = {ParsePredConjunction()};
    while (AcceptKeyword("OR")) terms.push_back(ParsePredConjunction());
    if (terms.size() == 1) return terms.front();
    return MakeNode(Junction{false, std::move(terms)}, pos);
  }

  NodePtr ParsePredConjunction() {
    const SourcePos pos = Peek().pos;
    std::vector<NodePtr> terms = {ParsePredUnary()};
    while (AcceptKeyword("AND")) terms.push_back(ParsePredUnary());
    if (terms.size() == 1) return terms.front();
    return MakeNode(Junction{true, std::move(terms)}, pos);
  }

  NodePtr ParsePredUnary() {
    const Token& t = Peek();
    if (AcceptKeyword("NOT")) return MakeNode(Negation{ParsePredUnary()}, t.pos);
    if (AcceptSymbol("(")) {
      NodePtr inner = ParsePredDisjunction();
      ExpectSymbol(")");
      return inner;
    }
    return ParsePredAtom();
  }

  NodePtr ParsePredAtom() {
    const Token& t = Peek();
    if (t.kind != TokKind::kIdent) {
      Fail(t, std::string(in_selector_ ? "expected an attribute test"
                                       : "expected an object predicate") +
                  ", found " + Describe(t));
    }
    if (auto rel = LookupRelation(t.text)) {
      if (in_selector_) {
        Fail(t, "relation " + Upper(t.text) + " is not allowed in a WHERE condition");
      }
      return ParseRelation(*rel);
    }
    if (IsKeyword(t, "COUNT") || IsKeyword(t, "EXISTS") || IsKeyword(t, "FORALL") ||
        LookupGestalt(t.text)) {
      Fail(t, Upper(t.text) +
                  " is a statement-level term; parenthesize the quantifier to combine it");
    }
    VarRef var;
    if (in_selector_) {
      var.pos = t.pos;
    } else {
      if (!IsSymbol(Peek(1), ".")) {
        if (LookupAttribute(t.text)) {
          Fail(t, "attribute '" + t.text + "' must be qualified by a variable, e.g. o." +
                      Lower(t.text));
        }
        Fail(t, "expected an object predicate, found " + Describe(t));
      }
      var = ResolveVar(Next());
      ExpectSymbol(".");
    }
    return ParseAttrTest(std::move(var));
  }

  NodePtr ParseAttrTest(VarRef var) {
    const Token& name = Next();
    if (name.kind != TokKind::kIdent) Fail(name, "expected an attribute, found " + Describe(name));
    auto attribute = LookupAttribute(name.text);
    if (!attribute) {
      Fail(name, "unknown attribute '" + name.text + "' (expected shape, color, size, side)",
           ParseError::Kind::kVocabulary);
    }
    AttrTest test;
    test.var = std::move(var);
    test.attribute = *attribute;
    const Token& op = Peek();
    if (AcceptSymbol("=") || AcceptSymbol("==")) {
      test.negated = false;
    } else if (AcceptSymbol("!=")) {
      test.negated = true;
    } else if (op.kind == TokKind::kSymbol &&
               (op.text == "<" || op.text == ">" || op.text == "<=" || op.text == ">=")) {
      Fail(op, "attribute " + Lower(name.text) + " is categorical; only = and != apply",
           ParseError::Kind::kType);
    } else {
      Fail(op, "expected '=' or '!=', found " + Describe(op));
    }
    const Token& value = Next();
    if (value.kind == TokKind::kInt) {
      Fail(value, "cannot compare attribute " + Lower(name.text) + " with a number",
           ParseError::Kind::kType);
    }
    if (value.kind != TokKind::kIdent) {
      Fail(value, "expected an attribute value, found " + Describe(value));
    }
    auto parsed = LookupAnyValue(value.text);
    if (!parsed) {
      Fail(value, "unknown " + std::string(AttributeName(*attribute)) + " '" + value.text + "'",
           ParseError::Kind::kVocabulary);
    }
    if (AttributeOf(*parsed) != *attribute) {
      Fail(value,
           "'" + value.text + "' is a " + std::string(AttributeName(AttributeOf(*parsed))) +
               " value, not a " + std::string(AttributeName(*attribute)),
           ParseError::Kind::kType);
    }
    test.value = *parsed;
    return MakeNode(std::move(test), name.pos);
  }

  NodePtr ParseRelation(Relation rel) {
    const Token& head = Next();
    RelationAtom atom;
    atom.relation = rel;
    ExpectSymbol("(");
    do {
      const Token& v = Next();
      if (v.kind != TokKind::kIdent) {
        Fail(v, "expected a variable, found " + Describe(v),
             v.kind == TokKind::kInt ? ParseError::Kind::kType : ParseError::Kind::kSyntax);
      }
      atom.args.push_back(ResolveVar(v));
    } while (AcceptSymbol(","));
    const Token& close = Peek();
    ExpectSymbol(")");
    if (atom.args.size() != RelationArity(rel)) {
      Fail(close,
           std::string(RelationName(rel)) + " takes " + std::to_string(RelationArity(rel)) +
               " arguments, got " + std::to_string(atom.args.size()),
           ParseError::Kind::kType);
    }
    return MakeNode(std::move(atom), head.pos);
  }

  VarRef ResolveVar(const Token& t) {
    VarRef ref{t.text, -1, t.pos};
    if (!scopes_.empty()) {
      const auto& vars = scopes_.back();
      auto it = std::find(vars.begin(), vars.end(), t.text);
      if (it != vars.end()) ref.slot = static_cast<int>(it - vars.begin());
    }
    if (ref.slot < 0 && !options_.allow_undeclared) {
      Fail(t, "variable '" + t.text + "' is not declared by an enclosing quantifier",
           ParseError::Kind::kUndeclaredVariable);
    }
    return ref;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
  bool in_selector_ = false;
  std::vector<std::vector<std::string>> scopes_;
};

}  // namespace internal

using internal::ParseOptions;

inline Statement ParseStatement(std::string_view text, ParseOptions options = {}) {
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char c) { return std::isspace(c); });
  if (blank) throw ParseError(ParseError::Kind::kSyntax, 1, 1, "empty statement");
  internal::Parser parser(text, options);
  return Statement{parser.ParseAll(), std::string(text)};
}

// ---------------------------------------------------------------------------
// Variable lint
// ---------------------------------------------------------------------------

struct VariableReport {
  std::set<std::string> declared_unused;
  std::set<std::string> used_undeclared;
};

namespace internal {

inline void CollectUses(const NodePtr& node, std::set<std::string>& used,
                        std::set<std::string>& undeclared) {
  if (!node) return;
  std::visit(Overloaded{
                 [&](const Junction& j) {
                   for (const auto& c : j.children) CollectUses(c, used, undeclared);
                 },
                 [&](const Negation& n) { CollectUses(n.child, used, undeclared); },
                 [&](const AttrTest& a) {
                   if (a.var.name.empty()) return;
                   (a.var.slot >= 0 ? used : undeclared).insert(a.var.name);
                 },
                 [&](const RelationAtom& r) {
                   for (const auto& v : r.args) (v.slot >= 0 ? used : undeclared).insert(v.name);
                 },
                 [&](const auto&) {},
             },
             node->payload);
}

inline void CollectVariables(const NodePtr& node, VariableReport& report) {
  if (!node) return;
  std::visit(Overloaded{
                 [&](const Junction& j) {
                   for (const auto& c : j.children) CollectVariables(c, report);
                 },
                 [&](const Negation& n) { CollectVariables(n.child, report); },
                 [&](const Quantified& q) {
                   std::set<std::string> used, undeclared;
                   CollectUses(q.body, used, undeclared);
                   for (const auto& v : q.vars) {
                     if (!used.count(v)) report.declared_unused.insert(v);
                   }
                   report.used_undeclared.insert(undeclared.begin(), undeclared.end());
                 },
                 [&](const auto&) {},
             },
             node->payload);
}

}  // namespace internal

inline VariableReport FreeVariables(const Statement& s) {
  VariableReport report;
  internal::CollectVariables(s.root, report);
  return report;
}

// ---------------------------------------------------------------------------
// Canonical source text
// ---------------------------------------------------------------------------

struct SourceOptions {
  // Sort the operands of AND/OR and of symmetric relations, and rename bound
  // variables to v1, v2, ... in declaration order, so that logically
  // identical subtrees print identically.
  bool canonical = false;
  // Subtrees deeper than this print as "_" (0 = unlimited).
  int max_depth = 0;
};

namespace internal {

inline std::string ToSource(const NodePtr& node, const SourceOptions& opts, int depth,
                            const std::vector<std::string>* renames);

inline std::string VarText(const VarRef& v, const std::vector<std::string>* renames) {
  if (renames && v.slot >= 0 && static_cast<std::size_t>(v.slot) < renames->size()) {
    return (*renames)[static_cast<std::size_t>(v.slot)];
  }
  return v.name;
}

inline bool NeedsParens(const NodePtr& child) {
  return std::holds_alternative<Junction>(child->payload) ||
         std::holds_alternative<Quantified>(child->payload);
}

inline std::string SelectorSource(const Selector& s, const SourceOptions& opts, int depth) {
  if (!s.where) return "objects";
  return "objects WHERE " + ToSource(s.where, opts, depth, nullptr);
}

inline std::string ToSource(const NodePtr& node, const SourceOptions& opts, int depth,
                            const std::vector<std::string>* renames) {
  if (opts.max_depth > 0 && depth > opts.max_depth) return "_";
  auto child_text = [&](const NodePtr& child) {
    std::string text = ToSource(child, opts, depth + 1, renames);
    if (text != "_" && NeedsParens(child)) text = "(" + text + ")";
    return text;
  };
  return std::visit(
      Overloaded{
          [&](const Junction& j) {
            std::vector<std::string> parts;
            for (const auto& c : j.children) parts.push_back(child_text(c));
            if (opts.canonical) std::sort(parts.begin(), parts.end());
            std::string out;
            for (std::size_t i = 0; i < parts.size(); ++i) {
              if (i) out += j.is_and ? " AND " : " OR ";
              out += parts[i];
            }
            return out;
          },
          [&](const Negation& n) { return "NOT " + child_text(n.child); },
          [&](const CountCompare& c) {
            std::string out = "COUNT(" + SelectorSource(c.lhs, opts, depth + 1) + ") " +
                              std::string(CmpOpText(c.op)) + " ";
            if (const auto* sel = std::get_if<Selector>(&c.rhs)) {
              out += "COUNT(" + SelectorSource(*sel, opts, depth + 1) + ")";
            } else {
              out += std::to_string(std::get<std::int64_t>(c.rhs));
            }
            return out;
          },
          [&](const Quantified& q) {
            std::vector<std::string> names = q.vars;
            if (opts.canonical) {
              for (std::size_t i = 0; i < names.size(); ++i) names[i] = "v" + std::to_string(i + 1);
            }
            std::string out = q.quantifier == Quantifier::kExists ? "EXISTS " : "FORALL ";
            for (std::size_t i = 0; i < names.size(); ++i) {
              if (i) out += ",";
              out += names[i];
            }
            if (q.distinct) out += " DISTINCT";
            out += " IN " + SelectorSource(q.domain, opts, depth + 1) + " : ";
            out += ToSource(q.body, opts, depth + 1, &names);
            return out;
          },
          [&](const GestaltAtom& g) {
            std::string out = std::string(GestaltName(g.kind)) + "(" +
                              SelectorSource(g.target, opts, depth + 1);
            if (g.kind == GestaltKind::kClustered) out += ", " + std::to_string(g.k);
            return out + ")";
          },
          [&](const AttrTest& a) {
            std::string out;
            if (!a.var.name.empty()) out = VarText(a.var, renames) + ".";
            out += std::string(AttributeName(a.attribute)) + (a.negated ? " != " : " = ") +
                   AttrValueName(a.value);
            return out;
          },
          [&](const RelationAtom& r) {
            std::vector<std::string> args;
            for (const auto& v : r.args) args.push_back(VarText(v, renames));
            if (opts.canonical) {
              if (IsSymmetricRelation(r.relation)) std::sort(args.begin(), args.end());
              if (r.relation == Relation::kBetween) std::sort(args.begin() + 1, args.end());
            }
            std::string out = std::string(RelationName(r.relation)) + "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
              if (i) out += ",";
              out += args[i];
            }
            return out + ")";
          },
      },
      node->payload);
}

}  // namespace internal

inline std::string ToSource(const NodePtr& node, const SourceOptions& opts = {}) {
  return internal::ToSource(node, opts, 1, nullptr);
}

inline std::string ToSource(const Statement& s, const SourceOptions& opts = {}) {
  return ToSource(s.root, opts);
}

// Statements by id, as referenced from dataset records.
using StatementLibrary = std::map<std::string, Statement>;

inline const Statement& Resolve(const StatementLibrary& library, const std::string& id) {
  auto it = library.find(id);
  if (it == library.end()) {
    throw Error(ErrorCode::kUnknownStatementId, "unknown statement id '" + id + "'");
  }
  return it->second;
}

}  // namespace kandinsky::dsl
