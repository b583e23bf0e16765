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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kandinsky/gestalt.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::dsl {

// Everything outside the statement text that evaluation depends on.
struct EvalContext {
  double small_big_threshold = 0.08;
  gestalt::GestaltConfig gestalt;

  static EvalContext From(const UniverseConfig& u, const gestalt::GestaltConfig& g = {}) {
    return EvalContext{u.small_big_threshold, g};
  }
};

inline constexpr double kTouchTolerance = 0.01;

inline bool HasAttribute(const ObjectSpec& o, const AttrValue& value, const EvalContext& ctx) {
  return std::visit(Overloaded{
                        [&](Shape s) { return o.shape == s; },
                        [&](Color c) { return o.color == c; },
                        [&](SizeClass s) {
                          const bool small = o.size < ctx.small_big_threshold;
                          return s == SizeClass::kSmall ? small : !small;
                        },
                        [&](Side s) {
                          switch (s) {
                            case Side::kLeft: return o.x < 0.5;
                            case Side::kRight: return o.x > 0.5;
                            case Side::kUpper: return o.y < 0.5;
                            case Side::kLower: return o.y > 0.5;
                          }
                          return false;
                        },
                    },
                    value);
}

// Center-based spatial semantics; y grows downwards, so ABOVE means smaller y.
// Ties make every strict relation false.
inline bool HoldsRelation(Relation rel, std::span<const ObjectSpec* const> args) {
  const ObjectSpec& a = *args[0];
  const ObjectSpec& b = *args[1];
  switch (rel) {
    case Relation::kLeftOf: return a.x < b.x;
    case Relation::kRightOf: return a.x > b.x;
    case Relation::kAbove: return a.y < b.y;
    case Relation::kBelow: return a.y > b.y;
    case Relation::kBetween: {
      const ObjectSpec& c = *args[2];
      return a.x >= std::min(b.x, c.x) && a.x <= std::max(b.x, c.x) &&
             a.y >= std::min(b.y, c.y) && a.y <= std::max(b.y, c.y);
    }
    case Relation::kTouches:
      return std::abs(ObjectDistance(a, b) - (a.size + b.size) / 2.0) <= kTouchTolerance;
    case Relation::kSameShape: return a.shape == b.shape;
    case Relation::kSameColor: return a.color == b.color;
    case Relation::kSmaller: return a.size < b.size;
    case Relation::kBigger: return a.size > b.size;
  }
  return false;
}

namespace internal {

enum class Tri : std::uint8_t { kFalse, kTrue, kUnknown };

inline Tri FromBool(bool b) { return b ? Tri::kTrue : Tri::kFalse; }

inline constexpr std::size_t kUnbound = static_cast<std::size_t>(-1);

class Evaluator {
 public:
  Evaluator(const Figure& figure, const EvalContext& ctx) : figure_(figure), ctx_(ctx) {}

  bool Eval(const NodePtr& node) {
    return std::visit(
        Overloaded{
            [&](const Junction& j) {
              for (const auto& c : j.children) {
                if (Eval(c) != j.is_and) return !j.is_and;
              }
              return j.is_and;
            },
            [&](const Negation& n) { return !Eval(n.child); },
            [&](const CountCompare& c) {
              const auto lhs = static_cast<std::int64_t>(Select(c.lhs).size());
              const std::int64_t rhs =
                  std::holds_alternative<Selector>(c.rhs)
                      ? static_cast<std::int64_t>(Select(std::get<Selector>(c.rhs)).size())
                      : std::get<std::int64_t>(c.rhs);
              return Compare(lhs, c.op, rhs);
            },
            [&](const Quantified& q) { return EvalQuantifier(q); },
            [&](const GestaltAtom& g) { return EvalGestalt(g); },
            [&](const AttrTest&) { return false; },
            [&](const RelationAtom&) { return false; },
        },
        node->payload);
  }

  std::vector<std::size_t> Select(const Selector& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < figure_.objects.size(); ++i) {
      if (!s.where || Pred(s.where, i) == Tri::kTrue) out.push_back(i);
    }
    return out;
  }

 private:
  // Kleene evaluation of an object predicate under the current (possibly
  // partial) binding. `implicit` is the object a selector tests.
  Tri Pred(const NodePtr& node, std::size_t implicit = kUnbound) {
    return std::visit(
        Overloaded{
            [&](const Junction& j) {
              bool unknown = false;
              for (const auto& c : j.children) {
                const Tri t = Pred(c, implicit);
                if (t == Tri::kUnknown) {
                  unknown = true;
                } else if ((t == Tri::kTrue) != j.is_and) {
                  return t;
                }
              }
              return unknown ? Tri::kUnknown : FromBool(j.is_and);
            },
            [&](const Negation& n) {
              const Tri t = Pred(n.child, implicit);
              if (t == Tri::kUnknown) return t;
              return t == Tri::kTrue ? Tri::kFalse : Tri::kTrue;
            },
            [&](const AttrTest& a) {
              const std::size_t index = a.var.name.empty() ? implicit : Bound(a.var);
              if (index == kUnbound) return Tri::kUnknown;
              return FromBool(HasAttribute(figure_.objects[index], a.value, ctx_) != a.negated);
            },
            [&](const RelationAtom& r) {
              const ObjectSpec* args[3] = {nullptr, nullptr, nullptr};
              for (std::size_t i = 0; i < r.args.size(); ++i) {
                const std::size_t index = Bound(r.args[i]);
                if (index == kUnbound) return Tri::kUnknown;
                args[i] = &figure_.objects[index];
              }
              return FromBool(HoldsRelation(r.relation, std::span(args, r.args.size())));
            },
            [&](const auto&) { return Tri::kFalse; },
        },
        node->payload);
  }

  std::size_t Bound(const VarRef& v) const {
    if (v.slot < 0 || static_cast<std::size_t>(v.slot) >= binding_.size()) return kUnbound;
    return binding_[static_cast<std::size_t>(v.slot)];
  }

  // Depth-first search over bindings. A partial binding whose body is
  // already decided prunes its subtree: for EXISTS a definite false, for
  // FORALL a definite true.
  bool EvalQuantifier(const Quantified& q) {
    domain_ = Select(q.domain);
    binding_.assign(q.vars.size(), kUnbound);
    const bool exists = q.quantifier == Quantifier::kExists;
    const bool witness = Search(q, 0, exists);
    binding_.clear();
    // EXISTS: a satisfying tuple was found. FORALL: a violating tuple was.
    return exists ? witness : !witness;
  }

  bool Search(const Quantified& q, std::size_t depth, bool exists) {
    const Tri t = Pred(q.body);
    if (depth == binding_.size()) return exists ? t == Tri::kTrue : t == Tri::kFalse;
    if (exists && t == Tri::kFalse) return false;
    if (!exists && t == Tri::kTrue) return false;
    for (std::size_t index : domain_) {
      if (q.distinct) {
        bool used = false;
        for (std::size_t d = 0; d < depth; ++d) used |= binding_[d] == index;
        if (used) continue;
      }
      binding_[depth] = index;
      const bool found = Search(q, depth + 1, exists);
      binding_[depth] = kUnbound;
      if (found) return true;
    }
    return false;
  }

  // A selection too small for the detector (fewer than 3 objects for
  // CIRCULAR, 2 for SYMMETRIC, 4 for FLOWER) makes the atom false.
  bool EvalGestalt(const GestaltAtom& g) {
    std::vector<ObjectSpec> selected;
    for (std::size_t i : Select(g.target)) selected.push_back(figure_.objects[i]);
    switch (g.kind) {
      case GestaltKind::kCircular:
        return selected.size() >= 3 &&
               gestalt::IsCircularArrangement(selected, ctx_.gestalt).circular;
      case GestaltKind::kSymmetric:
        return selected.size() >= 2 && gestalt::IsSymmetric(selected, ctx_.gestalt).symmetric;
      case GestaltKind::kClustered:
        return static_cast<std::int64_t>(
                   gestalt::ClusterByProximity(selected, ctx_.gestalt).size()) == g.k;
      case GestaltKind::kFlower:
        return gestalt::IsFlower(selected, ctx_.gestalt);
    }
    return false;
  }

  const Figure& figure_;
  const EvalContext& ctx_;
  std::vector<std::size_t> domain_;
  std::vector<std::size_t> binding_;
};

}  // namespace internal

// Pure: the result depends only on (statement, figure, context).
inline bool Evaluate(const Statement& s, const Figure& f, const EvalContext& ctx = {}) {
  internal::Evaluator evaluator(f, ctx);
  return evaluator.Eval(s.root);
}

// Indices of the objects a selector picks, ascending.
inline std::vector<std::size_t> SelectObjects(const Selector& s, const Figure& f,
                                              const EvalContext& ctx = {}) {
  internal::Evaluator evaluator(f, ctx);
  return evaluator.Select(s);
}

}  // namespace kandinsky::dsl
