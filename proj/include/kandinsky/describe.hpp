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

// Template-based English rendering of statements. Output is deterministic
// but not meant to parse back.

#include <optional>
#include <string>
#include <vector>

#include "kandinsky/statement.hpp"

namespace kandinsky::dsl {

namespace internal {

// Attribute requirements of a pure conjunction of positive equality tests,
// or nullopt when the condition is anything more complex.
struct SimpleTraits {
  std::optional<Shape> shape;
  std::optional<Color> color;
  std::optional<SizeClass> size;
  std::optional<Side> side;
};

inline bool CollectTraits(const NodePtr& node, SimpleTraits& traits) {
  if (!node) return true;
  if (const auto* j = std::get_if<Junction>(&node->payload)) {
    if (!j->is_and) return false;
    for (const auto& c : j->children) {
      if (!CollectTraits(c, traits)) return false;
    }
    return true;
  }
  const auto* a = std::get_if<AttrTest>(&node->payload);
  if (!a || a->negated) return false;
  auto assign = [](auto& slot, auto value) {
    if (slot && *slot != value) return false;
    slot = value;
    return true;
  };
  return std::visit(Overloaded{
                        [&](Shape s) { return assign(traits.shape, s); },
                        [&](Color c) { return assign(traits.color, c); },
                        [&](SizeClass s) { return assign(traits.size, s); },
                        [&](Side s) { return assign(traits.side, s); },
                    },
                    a->value);
}

inline std::string SideText(Side s) {
  switch (s) {
    case Side::kLeft: return "on the left side";
    case Side::kRight: return "on the right side";
    case Side::kUpper: return "in the upper half";
    case Side::kLower: return "in the lower half";
  }
  return "";
}

inline std::string NounPhrase(const SimpleTraits& t, bool plural) {
  std::string out;
  if (t.size) out += std::string(SizeClassName(*t.size)) + " ";
  if (t.color) out += std::string(ColorName(*t.color)) + " ";
  out += t.shape ? std::string(ShapeName(*t.shape)) : std::string("object");
  if (plural) out += "s";
  if (t.side) out += " " + SideText(*t.side);
  return out;
}

inline std::string Article(const std::string& noun) {
  return std::string("aeiou").find(noun.front()) != std::string::npos ? "an " : "a ";
}

std::string PredText(const NodePtr& node, const std::string& subject);

inline std::string SelectorText(const Selector& s, bool plural) {
  SimpleTraits traits;
  if (CollectTraits(s.where, traits)) return NounPhrase(traits, plural);
  return std::string(plural ? "objects that " : "object that ") +
         PredText(s.where, plural ? "they" : "it");
}

inline std::string AttrText(const AttrTest& a, const std::string& subject) {
  const bool plural = subject == "they";
  const std::string verb = plural ? (a.negated ? "are not " : "are ")
                                  : (a.negated ? "is not " : "is ");
  return std::visit(Overloaded{
                        [&](Shape s) {
                          const std::string noun(ShapeName(s));
                          return subject + " " + verb +
                                 (plural ? noun + "s" : Article(noun) + noun);
                        },
                        [&](Color c) { return subject + " " + verb + std::string(ColorName(c)); },
                        [&](SizeClass s) {
                          return subject + " " + verb + std::string(SizeClassName(s));
                        },
                        [&](Side s) { return subject + " " + verb + SideText(s); },
                    },
                    a.value);
}

inline std::string RelationText(const RelationAtom& r, bool negated = false) {
  const std::string a = r.args[0].name;
  const std::string b = r.args[1].name;
  const std::string is = negated ? " is not " : " is ";
  switch (r.relation) {
    case Relation::kLeftOf: return a + is + "left of " + b;
    case Relation::kRightOf: return a + is + "right of " + b;
    case Relation::kAbove: return a + is + "above " + b;
    case Relation::kBelow: return a + is + "below " + b;
    case Relation::kBetween: return a + is + "between " + b + " and " + r.args[2].name;
    case Relation::kTouches: return a + (negated ? " does not touch " : " touches ") + b;
    case Relation::kSameShape:
      return a + " and " + b + (negated ? " have different shapes" : " have the same shape");
    case Relation::kSameColor:
      return a + " and " + b + (negated ? " have different colors" : " have the same color");
    case Relation::kSmaller: return a + is + "smaller than " + b;
    case Relation::kBigger: return a + is + "bigger than " + b;
  }
  return "";
}

inline std::string PredText(const NodePtr& node, const std::string& subject) {
  return std::visit(
      Overloaded{
          [&](const Junction& j) {
            std::string out;
            for (std::size_t i = 0; i < j.children.size(); ++i) {
              if (i) out += j.is_and ? " and " : " or ";
              std::string part = PredText(j.children[i], subject);
              if (std::holds_alternative<Junction>(j.children[i]->payload)) {
                part = "(" + part + ")";
              }
              out += part;
            }
            return out;
          },
          [&](const Negation& n) {
            if (const auto* a = std::get_if<AttrTest>(&n.child->payload)) {
              AttrTest flipped = *a;
              flipped.negated = !flipped.negated;
              return AttrText(flipped, a->var.name.empty() ? subject : a->var.name);
            }
            if (const auto* r = std::get_if<RelationAtom>(&n.child->payload)) {
              return RelationText(*r, true);
            }
            return "it is not the case that " + PredText(n.child, subject);
          },
          [&](const AttrTest& a) {
            return AttrText(a, a.var.name.empty() ? subject : a.var.name);
          },
          [&](const RelationAtom& r) { return RelationText(r); },
          [&](const auto&) { return std::string("?"); },
      },
      node->payload);
}

inline std::string Quantity(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "exactly";
    case CmpOp::kNe: return "not exactly";
    case CmpOp::kLt: return "fewer than";
    case CmpOp::kLe: return "at most";
    case CmpOp::kGt: return "more than";
    case CmpOp::kGe: return "at least";
  }
  return "";
}

inline std::string CountText(const CountCompare& c) {
  if (const auto* rhs = std::get_if<Selector>(&c.rhs)) {
    const std::string a = SelectorText(c.lhs, true);
    const std::string b = SelectorText(*rhs, true);
    switch (c.op) {
      case CmpOp::kEq: return "the figure contains as many " + a + " as " + b;
      case CmpOp::kNe: return "the figure contains a different number of " + a + " than " + b;
      case CmpOp::kLt: return "the figure contains fewer " + a + " than " + b;
      case CmpOp::kLe: return "the figure contains at most as many " + a + " as " + b;
      case CmpOp::kGt: return "the figure contains more " + a + " than " + b;
      case CmpOp::kGe: return "the figure contains at least as many " + a + " as " + b;
    }
  }
  const auto n = std::get<std::int64_t>(c.rhs);
  return "the figure contains " + Quantity(c.op) + " " + std::to_string(n) + " " +
         SelectorText(c.lhs, n != 1);
}

// "there is a red object" style phrasing for a single-variable quantifier
// whose body only lists attributes of that variable.
inline std::optional<SimpleTraits> SingleVariableTraits(const Quantified& q) {
  if (q.vars.size() != 1) return std::nullopt;
  SimpleTraits traits;
  if (!CollectTraits(q.domain.where, traits)) return std::nullopt;
  if (!CollectTraits(q.body, traits)) return std::nullopt;
  return traits;
}

inline std::string VarList(const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += i + 1 == vars.size() ? " and " : ", ";
    out += vars[i];
  }
  return out;
}

inline std::string QuantText(const Quantified& q) {
  if (q.quantifier == Quantifier::kExists) {
    if (auto traits = SingleVariableTraits(q)) {
      const std::string np = NounPhrase(*traits, false);
      return "there is " + Article(np) + np;
    }
    return "there " + std::string(q.vars.size() == 1 ? "is an object " : "are objects ") +
           VarList(q.vars) + (q.distinct && q.vars.size() > 1 ? ", all different," : "") +
           " among the " + SelectorText(q.domain, true) + " such that " +
           PredText(q.body, q.vars.front());
  }
  if (q.vars.size() == 1) {
    SimpleTraits body;
    if (CollectTraits(q.body, body)) {
      return "every " + SelectorText(q.domain, false) + " " +
             PredText(q.body, q.vars.front()).substr(q.vars.front().size() + 1);
    }
  }
  return "for all " + std::string(q.distinct && q.vars.size() > 1 ? "different " : "") +
         VarList(q.vars) + " among the " + SelectorText(q.domain, true) + ", " +
         PredText(q.body, q.vars.front());
}

inline std::string GestaltText(const GestaltAtom& g) {
  const std::string np = SelectorText(g.target, true);
  switch (g.kind) {
    case GestaltKind::kCircular: return "the " + np + " are arranged in a circle";
    case GestaltKind::kSymmetric: return "the " + np + " are arranged symmetrically";
    case GestaltKind::kClustered:
      return "the " + np + " form exactly " + std::to_string(g.k) +
             (g.k == 1 ? " group" : " groups");
    case GestaltKind::kFlower: return "the " + np + " form a flower";
  }
  return "";
}

inline std::string StatementText(const NodePtr& node) {
  return std::visit(
      Overloaded{
          [&](const Junction& j) {
            std::string out;
            for (std::size_t i = 0; i < j.children.size(); ++i) {
              if (i) out += j.is_and ? " and " : " or ";
              std::string part = StatementText(j.children[i]);
              if (std::holds_alternative<Junction>(j.children[i]->payload)) {
                part = "(" + part + ")";
              }
              out += part;
            }
            return out;
          },
          [&](const Negation& n) {
            if (const auto* q = std::get_if<Quantified>(&n.child->payload)) {
              if (q->quantifier == Quantifier::kExists) {
                if (auto traits = SingleVariableTraits(*q)) {
                  return "there is no " + NounPhrase(*traits, false);
                }
              }
            }
            return "it is not the case that " + StatementText(n.child);
          },
          [&](const CountCompare& c) { return CountText(c); },
          [&](const Quantified& q) { return QuantText(q); },
          [&](const GestaltAtom& g) { return GestaltText(g); },
          [&](const auto&) { return std::string("?"); },
      },
      node->payload);
}

}  // namespace internal

inline std::string RenderStatementText(const Statement& s) {
  return internal::StatementText(s.root);
}

}  // namespace kandinsky::dsl
