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

// Reference evaluator for tests. It enumerates every variable binding of
// every quantifier with no pruning and no three-valued logic, and implements
// the attribute and spatial rules from their definitions, sharing only the
// AST and the gestalt detectors with the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kandinsky/evaluate.hpp"
#include "kandinsky/gestalt.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::testing {

class BruteForce {
 public:
  BruteForce(const Figure& f, const dsl::EvalContext& ctx) : f_(f), ctx_(ctx) {}

  bool Eval(const dsl::NodePtr& node) {
    using namespace dsl;
    if (const auto* j = std::get_if<Junction>(&node->payload)) {
      bool acc = j->is_and;
      for (const auto& c : j->children) {
        const bool v = Eval(c);
        acc = j->is_and ? (acc && v) : (acc || v);
      }
      return acc;
    }
    if (const auto* n = std::get_if<Negation>(&node->payload)) return !Eval(n->child);
    if (const auto* c = std::get_if<CountCompare>(&node->payload)) {
      const long long lhs = static_cast<long long>(Select(c->lhs).size());
      const long long rhs = std::holds_alternative<Selector>(c->rhs)
                                ? static_cast<long long>(Select(std::get<Selector>(c->rhs)).size())
                                : static_cast<long long>(std::get<std::int64_t>(c->rhs));
      switch (c->op) {
        case CmpOp::kEq: return lhs == rhs;
        case CmpOp::kNe: return lhs != rhs;
        case CmpOp::kLt: return lhs < rhs;
        case CmpOp::kLe: return lhs <= rhs;
        case CmpOp::kGt: return lhs > rhs;
        case CmpOp::kGe: return lhs >= rhs;
      }
      return false;
    }
    if (const auto* q = std::get_if<Quantified>(&node->payload)) return Quant(*q);
    if (const auto* g = std::get_if<GestaltAtom>(&node->payload)) {
      std::vector<ObjectSpec> sel;
      for (std::size_t i : Select(g->target)) sel.push_back(f_.objects[i]);
      switch (g->kind) {
        case GestaltKind::kCircular:
          return sel.size() >= 3 && gestalt::IsCircularArrangement(sel, ctx_.gestalt).circular;
        case GestaltKind::kSymmetric:
          return sel.size() >= 2 && gestalt::IsSymmetric(sel, ctx_.gestalt).symmetric;
        case GestaltKind::kClustered:
          return static_cast<long long>(gestalt::ClusterByProximity(sel, ctx_.gestalt).size()) ==
                 g->k;
        case GestaltKind::kFlower:
          return sel.size() >= 4 && gestalt::IsFlower(sel, ctx_.gestalt);
      }
    }
    return false;
  }

 private:
  // Object predicate with every variable bound; `self` is a selector's
  // implicit object.
  bool Pred(const dsl::NodePtr& node, std::size_t self) {
    using namespace dsl;
    if (const auto* j = std::get_if<Junction>(&node->payload)) {
      bool acc = j->is_and;
      for (const auto& c : j->children) {
        const bool v = Pred(c, self);
        acc = j->is_and ? (acc && v) : (acc || v);
      }
      return acc;
    }
    if (const auto* n = std::get_if<Negation>(&node->payload)) return !Pred(n->child, self);
    if (const auto* a = std::get_if<AttrTest>(&node->payload)) {
      const ObjectSpec& o = f_.objects[a->var.name.empty() ? self : env_.at(a->var.name)];
      bool holds = false;
      if (const auto* s = std::get_if<Shape>(&a->value)) holds = o.shape == *s;
      if (const auto* c = std::get_if<Color>(&a->value)) holds = o.color == *c;
      if (const auto* z = std::get_if<SizeClass>(&a->value)) {
        holds = (*z == SizeClass::kSmall) == (o.size < ctx_.small_big_threshold);
      }
      if (const auto* d = std::get_if<Side>(&a->value)) {
        holds = (*d == Side::kLeft && o.x < 0.5) || (*d == Side::kRight && o.x > 0.5) ||
                (*d == Side::kUpper && o.y < 0.5) || (*d == Side::kLower && o.y > 0.5);
      }
      return a->negated ? !holds : holds;
    }
    if (const auto* r = std::get_if<RelationAtom>(&node->payload)) {
      const ObjectSpec& a = f_.objects[env_.at(r->args[0].name)];
      const ObjectSpec& b = f_.objects[env_.at(r->args[1].name)];
      switch (r->relation) {
        case Relation::kLeftOf: return a.x < b.x;
        case Relation::kRightOf: return b.x < a.x;
        case Relation::kAbove: return a.y < b.y;
        case Relation::kBelow: return b.y < a.y;
        case Relation::kBetween: {
          const ObjectSpec& c = f_.objects[env_.at(r->args[2].name)];
          const bool in_x = (b.x <= a.x && a.x <= c.x) || (c.x <= a.x && a.x <= b.x);
          const bool in_y = (b.y <= a.y && a.y <= c.y) || (c.y <= a.y && a.y <= b.y);
          return in_x && in_y;
        }
        case Relation::kTouches: {
          const double dx = a.x - b.x, dy = a.y - b.y;
          const double gap = std::sqrt(dx * dx + dy * dy) - (a.size + b.size) / 2.0;
          return std::fabs(gap) <= 0.01;
        }
        case Relation::kSameShape: return a.shape == b.shape;
        case Relation::kSameColor: return a.color == b.color;
        case Relation::kSmaller: return a.size < b.size;
        case Relation::kBigger: return b.size < a.size;
      }
    }
    return false;
  }

  std::vector<std::size_t> Select(const dsl::Selector& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < f_.objects.size(); ++i) {
      if (!s.where || Pred(s.where, i)) out.push_back(i);
    }
    return out;
  }

  bool Quant(const dsl::Quantified& q) {
    const std::vector<std::size_t> domain = Select(q.domain);
    const std::size_t k = q.vars.size();
    const bool exists = q.quantifier == dsl::Quantifier::kExists;
    // Odometer over domain^k.
    std::vector<std::size_t> pick(k, 0);
    if (domain.empty()) return !exists;
    bool any = false, all = true;
    while (true) {
      bool distinct = true;
      for (std::size_t i = 0; i < k && distinct; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          if (pick[i] == pick[j]) distinct = false;
        }
      }
      if (!q.distinct || distinct) {
        const auto saved = env_;
        for (std::size_t i = 0; i < k; ++i) env_[q.vars[i]] = domain[pick[i]];
        const bool v = Pred(q.body, 0);
        env_ = saved;
        any = any || v;
        all = all && v;
      }
      std::size_t i = 0;
      while (i < k && ++pick[i] == domain.size()) pick[i++] = 0;
      if (i == k) break;
    }
    return exists ? any : all;
  }

  const Figure& f_;
  const dsl::EvalContext& ctx_;
  std::map<std::string, std::size_t> env_;
};

inline bool BruteEvaluate(const dsl::Statement& s, const Figure& f, const dsl::EvalContext& ctx) {
  return BruteForce(f, ctx).Eval(s.root);
}

}  // namespace kandinsky::testing
