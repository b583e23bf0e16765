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

// Compositional train/test splits. Atoms are single predicates and attribute
// values; compounds are canonicalized statement subtrees. A split is scored
// by the Chernoff divergence of the atom and compound distributions between
// its two halves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/evaluate.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/rng.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::splits {

using Distribution = std::map<std::string, double>;
using Counts = std::map<std::string, double>;

// 1 - sum_k p_k^alpha q_k^(1-alpha) over the union of both supports, with
// absent keys read as 0. Inputs are expected to be normalized.
inline double ChernoffDivergence(const Distribution& p, const Distribution& q, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "InvalidAlpha: alpha must lie in (0, 1), got " + FormatReal(alpha));
  }
  double coefficient = 0.0;
  for (const auto& [key, pk] : p) {
    auto it = q.find(key);
    if (it == q.end() || pk <= 0.0 || it->second <= 0.0) continue;
    coefficient += std::pow(pk, alpha) * std::pow(it->second, 1.0 - alpha);
  }
  return std::clamp(1.0 - coefficient, 0.0, 1.0);
}

inline Distribution Normalize(const Counts& counts) {
  double total = 0.0;
  for (const auto& [_, c] : counts) total += c;
  Distribution out;
  if (total <= 0.0) return out;
  for (const auto& [key, c] : counts) {
    if (c > 0.0) out[key] = c / total;
  }
  return out;
}

struct ExtractOptions {
  int depth = 3;               // compounds are subtrees truncated at this depth
  int min_compound_nodes = 2;  // 1 also counts single leaves as compounds
  bool object_atoms = true;    // add the records' object attribute values
  double small_big_threshold = 0.08;
};

struct SplitRecord {
  std::string id;
  std::string statement_id;
  std::vector<ObjectSpec> objects;
};

struct Features {
  Counts atoms;
  Counts compounds;
};

namespace internal {

// Children in the order the source printer descends, so that depth here
// matches the truncation depth of ToSource.
struct Child {
  dsl::NodePtr node;
  bool in_body = false;  // inside a quantifier body (variables renamed)
};

inline std::vector<Child> Children(const dsl::Node& node) {
  using namespace dsl;
  std::vector<Child> out;
  auto where = [&](const Selector& s) {
    if (s.where) out.push_back({s.where, false});
  };
  std::visit(Overloaded{
                 [&](const Junction& j) {
                   for (const auto& c : j.children) out.push_back({c, true});
                 },
                 [&](const Negation& n) { out.push_back({n.child, true}); },
                 [&](const CountCompare& c) {
                   where(c.lhs);
                   if (const auto* rhs = std::get_if<Selector>(&c.rhs)) where(*rhs);
                 },
                 [&](const Quantified& q) {
                   where(q.domain);
                   out.push_back({q.body, true});
                 },
                 [&](const GestaltAtom& g) { where(g.target); },
                 [&](const auto&) {},
             },
             node.payload);
  return out;
}

// Head label of a predicate node with variables erased; empty for the pure
// connectives AND, OR and NOT.
inline std::string AtomLabel(const dsl::Node& node) {
  using namespace dsl;
  return std::visit(
      Overloaded{
          [](const Junction&) { return std::string(); },
          [](const Negation&) { return std::string(); },
          [](const CountCompare& c) {
            std::string out = "COUNT " + std::string(CmpOpText(c.op)) + " ";
            if (const auto* n = std::get_if<std::int64_t>(&c.rhs)) return out + std::to_string(*n);
            return out + "COUNT";
          },
          [](const Quantified& q) {
            return std::string(q.quantifier == Quantifier::kExists ? "EXISTS" : "FORALL") +
                   (q.distinct ? " DISTINCT" : "");
          },
          [](const GestaltAtom& g) {
            std::string out(GestaltName(g.kind));
            if (g.kind == GestaltKind::kClustered) out += " " + std::to_string(g.k);
            return out;
          },
          [](const AttrTest& a) {
            return std::string(AttributeName(a.attribute)) + (a.negated ? " != " : " = ") +
                   AttrValueName(a.value);
          },
          [](const RelationAtom& r) { return std::string(RelationName(r.relation)); },
      },
      node.payload);
}

// Nodes of the subtree rooted at `node` that survive truncation at `depth`.
inline int CountNodes(const dsl::NodePtr& node, int depth) {
  if (depth <= 0) return 0;
  int n = 1;
  for (const auto& c : Children(*node)) n += CountNodes(c.node, depth - 1);
  return n;
}

inline void Walk(const dsl::NodePtr& node, const std::vector<std::string>* renames,
                 const ExtractOptions& opts, Features& out) {
  if (std::string atom = AtomLabel(*node); !atom.empty()) out.atoms[atom] += 1.0;
  if (CountNodes(node, opts.depth) >= opts.min_compound_nodes) {
    dsl::SourceOptions source;
    source.canonical = true;
    source.max_depth = opts.depth;
    out.compounds[dsl::internal::ToSource(node, source, 1, renames)] += 1.0;
  }
  std::vector<std::string> names;
  const std::vector<std::string>* body_renames = renames;
  if (const auto* q = std::get_if<dsl::Quantified>(&node->payload)) {
    for (std::size_t i = 0; i < q->vars.size(); ++i) names.push_back("v" + std::to_string(i + 1));
    body_renames = &names;
  }
  for (const auto& c : Children(*node)) Walk(c.node, c.in_body ? body_renames : nullptr, opts, out);
}

}  // namespace internal

// Atom and compound counts contributed by one statement.
inline Features StatementFeatures(const dsl::Statement& s, const ExtractOptions& opts = {}) {
  Features f;
  internal::Walk(s.root, nullptr, opts, f);
  return f;
}

inline Features RecordFeatures(const SplitRecord& r, const dsl::StatementLibrary& library,
                               const ExtractOptions& opts = {}) {
  Features f = StatementFeatures(dsl::Resolve(library, r.statement_id), opts);
  if (opts.object_atoms) {
    for (const ObjectSpec& o : r.objects) {
      f.atoms["object shape = " + std::string(ShapeName(o.shape))] += 1.0;
      f.atoms["object color = " + std::string(ColorName(o.color))] += 1.0;
      f.atoms["object size = " +
              std::string(o.size < opts.small_big_threshold ? "small" : "big")] += 1.0;
    }
  }
  return f;
}

struct Distributions {
  Distribution atoms;
  Distribution compounds;
};

// Pooled, normalized atom and compound frequencies over `records`.
inline Distributions ExtractDistributions(const std::vector<SplitRecord>& records,
                                          const dsl::StatementLibrary& library,
                                          const ExtractOptions& opts = {}) {
  Counts atoms, compounds;
  for (const auto& r : records) {
    const Features f = RecordFeatures(r, library, opts);
    for (const auto& [k, v] : f.atoms) atoms[k] += v;
    for (const auto& [k, v] : f.compounds) compounds[k] += v;
  }
  return {Normalize(atoms), Normalize(compounds)};
}

struct SplitConfig {
  double target_compound_div = 1.0;
  double max_atom_div = 0.02;
  double alpha_atoms = 0.5;
  double alpha_compounds = 0.1;
  ExtractOptions extract;
  int max_iterations = 5000;   // accepted swaps per restart
  int samples_per_class = 8;   // records tried per (statement, side) per step
  int restarts = 2;
};

enum class StopReason { kTargetReached, kLocalOptimum, kBudgetExhausted };

inline std::string_view StopReasonName(StopReason r) {
  switch (r) {
    case StopReason::kTargetReached: return "target reached";
    case StopReason::kLocalOptimum: return "local optimum";
    case StopReason::kBudgetExhausted: return "budget exhausted";
  }
  return "?";
}

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  double atom_divergence = 0.0;
  double compound_divergence = 0.0;
  int swaps = 0;
  StopReason stop = StopReason::kLocalOptimum;
};

// Divergences of an explicit split, computed from scratch.
inline std::pair<double, double> SplitDivergences(const std::vector<SplitRecord>& train,
                                                  const std::vector<SplitRecord>& test,
                                                  const dsl::StatementLibrary& library,
                                                  const SplitConfig& cfg) {
  const Distributions a = ExtractDistributions(train, library, cfg.extract);
  const Distributions b = ExtractDistributions(test, library, cfg.extract);
  return {ChernoffDivergence(a.atoms, b.atoms, cfg.alpha_atoms),
          ChernoffDivergence(a.compounds, b.compounds, cfg.alpha_compounds)};
}

namespace internal {

using Sparse = std::vector<std::pair<std::size_t, double>>;

struct Side {
  std::vector<double> counts;
  double total = 0.0;
  void Add(const Sparse& v, double sign) {
    for (const auto& [k, c] : v) {
      counts[k] += sign * c;
      total += sign * c;
    }
  }
};

inline double DenseDivergence(const Side& a, const Side& b, double alpha) {
  if (a.total <= 0.0 || b.total <= 0.0) return 1.0;
  double coefficient = 0.0;
  for (std::size_t k = 0; k < a.counts.size(); ++k) {
    const double p = a.counts[k] / a.total, q = b.counts[k] / b.total;
    if (p > 1e-15 && q > 1e-15) coefficient += std::pow(p, alpha) * std::pow(q, 1.0 - alpha);
  }
  return std::clamp(1.0 - coefficient, 0.0, 1.0);
}

// Lexicographic objective: first bring atom divergence under the cap, then
// push compound divergence up.
struct Score {
  bool within_cap = false;
  double value = 0.0;  // -atom divergence outside the cap, compound inside
  double atom = 0.0;
  double compound = 0.0;
  bool Beats(const Score& o) const {
    if (within_cap != o.within_cap) return within_cap;
    return value > o.value + 1e-12;
  }
};

struct Search {
  const SplitConfig& cfg;
  std::vector<Sparse> atoms, compounds;
  std::vector<std::size_t> klass;  // statement class per record
  std::size_t classes = 0;
  Side train_atoms, test_atoms, train_compounds, test_compounds;
  std::vector<char> in_train;

  Score Evaluate() const {
    Score s;
    s.atom = DenseDivergence(train_atoms, test_atoms, cfg.alpha_atoms);
    s.compound = DenseDivergence(train_compounds, test_compounds, cfg.alpha_compounds);
    s.within_cap = s.atom <= cfg.max_atom_div;
    s.value = s.within_cap ? s.compound : -s.atom;
    return s;
  }

  void Swap(std::size_t a, std::size_t b) {  // a: train -> test, b: test -> train
    train_atoms.Add(atoms[a], -1);
    test_atoms.Add(atoms[a], +1);
    train_compounds.Add(compounds[a], -1);
    test_compounds.Add(compounds[a], +1);
    train_atoms.Add(atoms[b], +1);
    test_atoms.Add(atoms[b], -1);
    train_compounds.Add(compounds[b], +1);
    test_compounds.Add(compounds[b], -1);
    std::swap(in_train[a], in_train[b]);
  }

  void Assign(const std::vector<char>& membership, std::size_t atom_keys,
              std::size_t compound_keys) {
    in_train = membership;
    train_atoms = test_atoms = Side{std::vector<double>(atom_keys, 0.0), 0.0};
    train_compounds = test_compounds = Side{std::vector<double>(compound_keys, 0.0), 0.0};
    for (std::size_t i = 0; i < in_train.size(); ++i) {
      (in_train[i] ? train_atoms : test_atoms).Add(atoms[i], 1);
      (in_train[i] ? train_compounds : test_compounds).Add(compounds[i], 1);
    }
  }

  bool TargetMet(const Score& s) const {
    return s.within_cap && s.compound >= cfg.target_compound_div;
  }

  // Steepest-ascent swaps. Single-record candidates are drawn per
  // (class, side) so the step cost does not grow with the number of records
  // per statement; block candidates cover every ordered pair of classes.
  std::pair<Score, StopReason> Climb(Rng& rng, int& swaps) {
    Score current = Evaluate();
    for (int step = 0; step < cfg.max_iterations; ++step) {
      if (TargetMet(current)) return {current, StopReason::kTargetReached};
      std::vector<std::vector<std::size_t>> train_pool(classes), test_pool(classes);
      for (std::size_t i = 0; i < in_train.size(); ++i) {
        (in_train[i] ? train_pool : test_pool)[klass[i]].push_back(i);
      }
      auto sample = [&](std::vector<std::size_t>& pool) {
        rng.Shuffle(pool);
        if (pool.size() > static_cast<std::size_t>(cfg.samples_per_class)) {
          pool.resize(static_cast<std::size_t>(cfg.samples_per_class));
        }
      };
      for (auto& p : train_pool) sample(p);
      for (auto& p : test_pool) sample(p);
      Score best = current;
      std::pair<std::size_t, std::size_t> best_swap{0, 0};
      bool found = false;
      for (const auto& from_train : train_pool) {
        for (const auto& from_test : test_pool) {
          for (std::size_t a : from_train) {
            for (std::size_t b : from_test) {
              Swap(a, b);
              const Score s = Evaluate();
              Swap(b, a);
              if (s.Beats(best)) {
                best = s;
                best_swap = {a, b};
                found = true;
              }
            }
          }
        }
      }
      // Block moves: exchange as many train records of one statement as
      // possible with test records of another.
      std::vector<std::pair<std::size_t, std::size_t>> best_block;
      for (std::size_t x = 0; x < classes; ++x) {
        for (std::size_t y = 0; y < classes; ++y) {
          if (x == y) continue;
          std::vector<std::pair<std::size_t, std::size_t>> block;
          std::size_t j = 0;
          for (std::size_t a = 0; a < in_train.size(); ++a) {
            if (!in_train[a] || klass[a] != x) continue;
            while (j < in_train.size() && (in_train[j] || klass[j] != y)) ++j;
            if (j == in_train.size()) break;
            block.push_back({a, j++});
          }
          if (block.size() < 2) continue;
          for (const auto& [a, b] : block) Swap(a, b);
          const Score s = Evaluate();
          for (const auto& [a, b] : block) Swap(b, a);
          if (s.Beats(best)) {
            best = s;
            best_block = std::move(block);
            found = true;
          }
        }
      }
      if (!found) return {current, StopReason::kLocalOptimum};
      if (best_block.empty()) best_block.push_back(best_swap);
      for (const auto& [a, b] : best_block) Swap(a, b);
      ++swaps;
      current = best;
    }
    return {current, TargetMet(current) ? StopReason::kTargetReached
                                        : StopReason::kBudgetExhausted};
  }
};

}  // namespace internal

// Greedy swap search for a balanced split (train gets floor(n/2) records)
// that keeps atom divergence within cfg.max_atom_div while maximizing
// compound divergence. The reported divergences are recomputed from the
// final id lists.
inline SplitResult DesignSplit(const std::vector<SplitRecord>& records,
                               const dsl::StatementLibrary& library, const SplitConfig& cfg,
                               std::uint64_t seed) {
  if (records.size() < 10) {
    throw Error(ErrorCode::kInvalidArgument,
                "split needs at least 10 records, got " + std::to_string(records.size()));
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(cfg.target_compound_div) || !in_unit(cfg.max_atom_div)) {
    throw Error(ErrorCode::kInvalidArgument, "split targets must lie in [0, 1]");
  }
  for (double alpha : {cfg.alpha_atoms, cfg.alpha_compounds}) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "InvalidAlpha: alpha must lie in (0, 1), got " + FormatReal(alpha));
    }
  }
  if (cfg.max_iterations < 0 || cfg.samples_per_class < 1 || cfg.restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "split search budget must be positive");
  }

  internal::Search search{cfg, {}, {}, {}, 0, {}, {}, {}, {}, {}};
  std::map<std::string, std::size_t> atom_keys, compound_keys, class_keys;
  auto intern = [](std::map<std::string, std::size_t>& keys, const std::string& k) {
    return keys.emplace(k, keys.size()).first->second;
  };
  std::vector<Counts> compound_counts;
  for (const auto& r : records) {
    const Features f = RecordFeatures(r, library, cfg.extract);
    internal::Sparse a, c;
    for (const auto& [k, v] : f.atoms) a.push_back({intern(atom_keys, k), v});
    for (const auto& [k, v] : f.compounds) c.push_back({intern(compound_keys, k), v});
    search.atoms.push_back(std::move(a));
    search.compounds.push_back(std::move(c));
    search.klass.push_back(intern(class_keys, r.statement_id));
    compound_counts.push_back(Normalize(f.compounds));
  }
  search.classes = class_keys.size();

  const bool compounds_identical =
      std::all_of(compound_counts.begin(), compound_counts.end(),
                  [&](const Counts& c) { return c == compound_counts.front(); });
  if (cfg.target_compound_div > 0.0 && compounds_identical) {
    throw Error(ErrorCode::kInfeasible,
                "every record has the same compound distribution, so compound divergence is "
                "0 for any split; target " +
                    FormatReal(cfg.target_compound_div) + " cannot be met");
  }

  const std::size_t n = records.size();
  internal::Score best_score;
  std::vector<char> best_membership;
  SplitResult result;
  bool have_best = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng = Rng::Stream(seed, StreamDomain::kSplit, static_cast<std::uint64_t>(restart));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    std::vector<char> membership(n, 0);
    for (std::size_t i = 0; i < n / 2; ++i) membership[order[i]] = 1;
    search.Assign(membership, atom_keys.size(), compound_keys.size());
    int swaps = 0;
    const auto [score, stop] = search.Climb(rng, swaps);
    if (!have_best || score.Beats(best_score)) {
      have_best = true;
      best_score = score;
      best_membership = search.in_train;
      result.swaps = swaps;
      result.stop = stop;
    }
    if (stop == StopReason::kTargetReached) break;
  }

  std::vector<SplitRecord> train, test;
  for (std::size_t i = 0; i < n; ++i) {
    (best_membership[i] ? result.train_ids : result.test_ids).push_back(records[i].id);
    (best_membership[i] ? train : test).push_back(records[i]);
  }
  std::tie(result.atom_divergence, result.compound_divergence) =
      SplitDivergences(train, test, library, cfg);
  if (result.atom_divergence > cfg.max_atom_div + 1e-12) {
    throw Error(ErrorCode::kInfeasible,
                "no split found with atom divergence <= " + FormatReal(cfg.max_atom_div) +
                    " (best " + FormatReal(result.atom_divergence) + ")");
  }
  return result;
}

}  // namespace kandinsky::splits
