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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/evaluate.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/parallel.hpp"
#include "kandinsky/rng.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::sampler {

struct SamplerConfig {
  int placement_retries = 1000;  // per object
  double yield_floor = 1e-4;
  int threads = 1;
  int max_edits = 1;
  int near_miss_budget = 4000;  // candidate figures evaluated per source figure
  int continuous_edit_samples = 4;

  // Per-figure rejection cap; reaching it means the acceptance rate is at
  // least an order of magnitude below the floor.
  std::uint64_t AttemptCap() const {
    return static_cast<std::uint64_t>(std::ceil(10.0 / yield_floor));
  }
  std::uint64_t ProbeCap() const {
    return static_cast<std::uint64_t>(std::ceil(1.0 / yield_floor));
  }
};

inline void CheckSamplerConfig(const SamplerConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "sampler: " + what);
  };
  if (cfg.placement_retries < 1) fail("placement_retries must be >= 1");
  if (!(cfg.yield_floor > 0.0 && cfg.yield_floor <= 1.0)) fail("yield_floor must lie in (0, 1]");
  if (cfg.threads < 1) fail("threads must be >= 1");
  if (cfg.max_edits < 1) fail("max_edits must be >= 1");
  if (cfg.near_miss_budget < 1) fail("near_miss_budget must be >= 1");
  if (cfg.continuous_edit_samples < 0) fail("continuous_edit_samples must be >= 0");
}

// ---------------------------------------------------------------------------
// Unconditioned sampling
// ---------------------------------------------------------------------------

// Places `count` objects by rejection: attributes uniformly from the allowed
// sets, size uniformly in [size_min, size_max], center uniformly in the band
// that keeps the bounding disc on the canvas. Each object gets
// `placement_retries` tries before PlacementExhausted.
inline Figure SampleFigureWithCount(const UniverseConfig& u, int count, Rng& rng,
                                    int placement_retries = 1000) {
  Figure f;
  f.objects.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < placement_retries && !placed; ++attempt) {
      ObjectSpec o;
      o.shape = rng.Pick(u.allowed_shapes);
      o.color = rng.Pick(u.allowed_colors);
      o.size = CanonicalReal(rng.Uniform(u.size_min, u.size_max));
      const double r = o.size / 2.0;
      o.x = CanonicalReal(rng.Uniform(r, 1.0 - r));
      o.y = CanonicalReal(rng.Uniform(r, 1.0 - r));
      if (o.size < u.size_min || o.size > u.size_max || !InsideCanvas(o)) continue;
      placed = std::none_of(f.objects.begin(), f.objects.end(), [&](const ObjectSpec& other) {
        return Overlaps(o, other, u.min_gap);
      });
      if (placed) f.objects.push_back(o);
    }
    if (!placed) {
      throw Error(ErrorCode::kPlacementExhausted,
                  "could not place object " + std::to_string(k + 1) + " of " +
                      std::to_string(count) + " after " + std::to_string(placement_retries) +
                      " tries (universe too dense)");
    }
  }
  return f;
}

inline Figure SampleFigure(const UniverseConfig& u, Rng& rng, int placement_retries = 1000) {
  const int count = rng.Between(u.n_min, u.n_max);
  return SampleFigureWithCount(u, count, rng, placement_retries);
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

// Draws one candidate figure; `count` requests an exact object count when the
// source can honor it (sources with a fixed layout may ignore it).
using FigureSource = std::function<Figure(std::optional<int> count, Rng& rng)>;
using FigureCheck = std::function<ValidationReport(const Figure&)>;

// Named constructive generators for patterns where rejection sampling has a
// hopeless yield.
class GeneratorRegistry {
 public:
  void Register(const std::string& name, FigureSource generator) {
    generators_[name] = std::move(generator);
  }
  const FigureSource* Find(const std::string& name) const {
    auto it = generators_.find(name);
    return it == generators_.end() ? nullptr : &it->second;
  }
  std::vector<std::string> Names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : generators_) names.push_back(name);
    return names;
  }

 private:
  std::map<std::string, FigureSource> generators_;
};

struct Pattern {
  std::string id;
  dsl::Statement statement;
  UniverseConfig universe;
  dsl::EvalContext context;
  FigureSource source;       // default: SampleFigure over `universe`
  FigureSource constructive; // optional generator for positives
  FigureCheck structure;     // optional extra structural validator

  bool Member(const Figure& f) const { return dsl::Evaluate(statement, f, context); }

  ValidationReport Validate(const Figure& f) const {
    ValidationReport report = ValidateFigure(f, universe);
    if (structure) {
      ValidationReport extra = structure(f);
      report.violations.insert(report.violations.end(), extra.violations.begin(),
                               extra.violations.end());
    }
    return report;
  }

  Figure Draw(std::optional<int> count, Rng& rng, int placement_retries) const {
    if (source) return source(count, rng);
    if (count) return SampleFigureWithCount(universe, *count, rng, placement_retries);
    return SampleFigure(universe, rng, placement_retries);
  }
};

inline Pattern MakePattern(std::string id, dsl::Statement statement, UniverseConfig universe,
                           const gestalt::GestaltConfig& g = {}) {
  CheckUniverse(universe);
  Pattern p;
  p.id = std::move(id);
  p.context = dsl::EvalContext::From(universe, g);
  p.statement = std::move(statement);
  p.universe = std::move(universe);
  return p;
}

// Resolves a pattern's constructive generator by name.
inline void AttachConstructive(Pattern& p, const GeneratorRegistry& registry,
                               const std::string& name) {
  const FigureSource* generator = registry.Find(name);
  if (!generator) {
    throw Error(ErrorCode::kInvalidArgument, "no constructive generator named '" + name + "'");
  }
  p.constructive = *generator;
}

struct GenerationReport {
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::uint64_t attempts = 0;
  double rejection_rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t skipped = 0;  // near-miss sources without a flipping edit
};

struct Generated {
  std::vector<Figure> figures;
  std::vector<std::uint64_t> stream_seeds;  // per figure, for provenance
  GenerationReport report;
};

namespace internal {

inline void Finish(GenerationReport& report) {
  report.rejection_rate =
      report.attempts == 0
          ? 0.0
          : 1.0 - static_cast<double>(report.produced) / static_cast<double>(report.attempts);
}

// Rejection loop shared by positives and negatives.
inline std::pair<Figure, std::uint64_t> DrawUntil(const Pattern& p, bool want, Rng& rng,
                                                  std::optional<int> count,
                                                  const SamplerConfig& cfg,
                                                  bool use_constructive) {
  const std::uint64_t cap = cfg.AttemptCap();
  for (std::uint64_t attempt = 1; attempt <= cap; ++attempt) {
    Figure f = use_constructive ? p.constructive(count, rng)
                                : p.Draw(count, rng, cfg.placement_retries);
    if (!p.Validate(f).ok()) continue;
    if (p.Member(f) == want) return {std::move(f), attempt};
  }
  throw Error(ErrorCode::kYieldTooLow,
              "statement '" + p.id + "': no " + (want ? "positive" : "negative") +
                  " figure after " + std::to_string(cap) + " attempts");
}

inline void CheckYield(const Pattern& p, const GenerationReport& report,
                       const SamplerConfig& cfg, const char* what) {
  if (report.attempts == 0) return;
  const double rate = static_cast<double>(report.produced) / static_cast<double>(report.attempts);
  if (rate < cfg.yield_floor) {
    throw Error(ErrorCode::kYieldTooLow,
                "statement '" + p.id + "': " + what + " acceptance rate " + FormatReal(rate) +
                    " below floor " + FormatReal(cfg.yield_floor));
  }
}

}  // namespace internal

// Figures satisfying the pattern. Uses the constructive generator when the
// pattern has one, rejection sampling otherwise; either way each figure is
// re-validated and re-evaluated before it is accepted.
inline Generated GeneratePositives(const Pattern& p, std::size_t count, std::uint64_t seed,
                                   const SamplerConfig& cfg = {}) {
  Generated out;
  out.figures.resize(count);
  out.stream_seeds.resize(count);
  std::vector<std::uint64_t> attempts(count, 0);
  const bool constructive = static_cast<bool>(p.constructive);
  ParallelFor(count, cfg.threads, [&](std::size_t i) {
    Rng rng = Rng::Stream(seed, StreamDomain::kPositives, i);
    out.stream_seeds[i] = rng.seed();
    auto [figure, tries] = internal::DrawUntil(p, true, rng, std::nullopt, cfg, constructive);
    out.figures[i] = std::move(figure);
    attempts[i] = tries;
  });
  out.report.requested = count;
  out.report.produced = count;
  out.report.seed = seed;
  for (auto a : attempts) out.report.attempts += a;
  internal::Finish(out.report);
  if (!constructive) internal::CheckYield(p, out.report, cfg, "positive");
  return out;
}

// Figures outside the pattern. When `match` is given, object counts are
// drawn from the empirical count distribution of `match` (stratified
// resampling); strata with no reachable negative fall back to the nearest
// count that has one.
inline Generated GenerateNegatives(const Pattern& p, std::size_t count, std::uint64_t seed,
                                   const SamplerConfig& cfg = {},
                                   const std::vector<Figure>* match = nullptr) {
  Generated out;
  out.figures.resize(count);
  out.stream_seeds.resize(count);
  std::vector<std::uint64_t> attempts(count, 0);

  std::vector<int> strata;
  std::map<int, bool> feasible;
  auto probe = [&](int n) {
    auto it = feasible.find(n);
    if (it != feasible.end()) return it->second;
    // A stratum is usable when its negative yield is at least ten times the
    // floor: kProbeHits negatives within ProbeCap() draws.
    constexpr int kProbeHits = 10;
    Rng rng = Rng::Stream(seed, StreamDomain::kStrataProbe, static_cast<std::uint64_t>(n));
    int hits = 0;
    for (std::uint64_t a = 0; a < cfg.ProbeCap() && hits < kProbeHits; ++a) {
      Figure f = p.Draw(n, rng, cfg.placement_retries);
      if (p.Validate(f).ok() && !p.Member(f) && static_cast<int>(f.objects.size()) == n) ++hits;
    }
    feasible[n] = hits >= kProbeHits;
    return feasible[n];
  };
  std::map<int, std::vector<int>> nearest;  // requested count -> candidate counts
  if (match && !match->empty()) {
    for (const auto& f : *match) strata.push_back(static_cast<int>(f.objects.size()));
    std::vector<int> distinct = strata;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int c : distinct) {
      for (int d = 0; d <= p.universe.n_max - p.universe.n_min; ++d) {
        std::vector<int> options;
        for (int candidate : {c - d, c + d}) {
          if (candidate < p.universe.n_min || candidate > p.universe.n_max) continue;
          if (std::find(options.begin(), options.end(), candidate) != options.end()) continue;
          if (probe(candidate)) options.push_back(candidate);
        }
        if (!options.empty()) {
          nearest[c] = options;
          break;
        }
      }
      if (!nearest.count(c)) {
        throw Error(ErrorCode::kYieldTooLow,
                    "statement '" + p.id + "': no object count in [" +
                        std::to_string(p.universe.n_min) + ", " +
                        std::to_string(p.universe.n_max) + "] admits a negative figure");
      }
    }
  }

  ParallelFor(count, cfg.threads, [&](std::size_t i) {
    Rng rng = Rng::Stream(seed, StreamDomain::kNegatives, i);
    out.stream_seeds[i] = rng.seed();
    std::optional<int> target;
    if (!strata.empty()) {
      const auto& options = nearest.at(strata[rng.Below(strata.size())]);
      target = options[rng.Below(options.size())];
    }
    auto [figure, tries] = internal::DrawUntil(p, false, rng, target, cfg, false);
    out.figures[i] = std::move(figure);
    attempts[i] = tries;
  });
  out.report.requested = count;
  out.report.produced = count;
  out.report.seed = seed;
  for (auto a : attempts) out.report.attempts += a;
  internal::Finish(out.report);
  internal::CheckYield(p, out.report, cfg, "negative");
  return out;
}

// ---------------------------------------------------------------------------
// Near misses
// ---------------------------------------------------------------------------

enum class EditKind { kRecolor, kReshape, kResize, kMove, kAdd, kRemove };

inline std::string_view EditKindName(EditKind k) {
  switch (k) {
    case EditKind::kRecolor: return "recolor";
    case EditKind::kReshape: return "reshape";
    case EditKind::kResize: return "resize";
    case EditKind::kMove: return "move";
    case EditKind::kAdd: return "add";
    case EditKind::kRemove: return "remove";
  }
  return "?";
}

inline std::optional<EditKind> ParseEditKind(std::string_view name) {
  for (EditKind k : {EditKind::kRecolor, EditKind::kReshape, EditKind::kResize, EditKind::kMove,
                     EditKind::kAdd, EditKind::kRemove}) {
    if (EditKindName(k) == name) return k;
  }
  return std::nullopt;
}

// One atomic edit. `target` indexes the figure the edit applies to (for
// kAdd, the insertion index, always the end of the list). `value` carries
// the new attribute(s); only the fields relevant to `kind` are meaningful.
struct EditOp {
  EditKind kind = EditKind::kRecolor;
  std::size_t target = 0;
  ObjectSpec value;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

inline Figure ApplyEdit(const Figure& f, const EditOp& e) {
  Figure out = f;
  auto& objs = out.objects;
  switch (e.kind) {
    case EditKind::kRecolor: objs.at(e.target).color = e.value.color; break;
    case EditKind::kReshape: objs.at(e.target).shape = e.value.shape; break;
    case EditKind::kResize: objs.at(e.target).size = e.value.size; break;
    case EditKind::kMove:
      objs.at(e.target).x = e.value.x;
      objs.at(e.target).y = e.value.y;
      break;
    case EditKind::kAdd: objs.push_back(e.value); break;
    case EditKind::kRemove:
      objs.erase(objs.begin() + static_cast<std::ptrdiff_t>(e.target));
      break;
  }
  return out;
}

inline std::string DescribeEdit(const EditOp& e) {
  const std::string idx = "object " + std::to_string(e.target);
  switch (e.kind) {
    case EditKind::kRecolor: return "recolor " + idx + " to " + std::string(ColorName(e.value.color));
    case EditKind::kReshape: return "reshape " + idx + " to " + std::string(ShapeName(e.value.shape));
    case EditKind::kResize: return "resize " + idx + " to " + FormatReal(e.value.size);
    case EditKind::kMove:
      return "move " + idx + " to (" + FormatReal(e.value.x) + ", " + FormatReal(e.value.y) + ")";
    case EditKind::kAdd:
      return "add " + std::string(ColorName(e.value.color)) + " " +
             std::string(ShapeName(e.value.shape)) + " at (" + FormatReal(e.value.x) + ", " +
             FormatReal(e.value.y) + ")";
    case EditKind::kRemove: return "remove " + idx;
  }
  return "?";
}

// Every discrete single edit permitted by the universe plus a few sampled
// continuous ones (resize, move, add), in random order.
inline std::vector<EditOp> CandidateEdits(const Figure& f, const UniverseConfig& u, Rng& rng,
                                          int continuous_samples) {
  std::vector<EditOp> edits;
  const std::size_t n = f.objects.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ObjectSpec& o = f.objects[i];
    for (Color c : u.allowed_colors) {
      if (c != o.color) edits.push_back({EditKind::kRecolor, i, ObjectSpec{o.shape, c, o.size, o.x, o.y}});
    }
    for (Shape s : u.allowed_shapes) {
      if (s != o.shape) edits.push_back({EditKind::kReshape, i, ObjectSpec{s, o.color, o.size, o.x, o.y}});
    }
    if (static_cast<int>(n) > u.n_min) edits.push_back({EditKind::kRemove, i, o});
    for (int k = 0; k < continuous_samples; ++k) {
      if (u.size_max > u.size_min) {
        ObjectSpec v = o;
        v.size = CanonicalReal(rng.Uniform(u.size_min, u.size_max));
        edits.push_back({EditKind::kResize, i, v});
      }
      ObjectSpec v = o;
      v.x = CanonicalReal(rng.Uniform(o.size / 2, 1.0 - o.size / 2));
      v.y = CanonicalReal(rng.Uniform(o.size / 2, 1.0 - o.size / 2));
      edits.push_back({EditKind::kMove, i, v});
    }
  }
  if (static_cast<int>(n) < u.n_max) {
    for (int k = 0; k < continuous_samples * 2; ++k) {
      ObjectSpec v;
      v.shape = rng.Pick(u.allowed_shapes);
      v.color = rng.Pick(u.allowed_colors);
      v.size = CanonicalReal(rng.Uniform(u.size_min, u.size_max));
      v.x = CanonicalReal(rng.Uniform(v.size / 2, 1.0 - v.size / 2));
      v.y = CanonicalReal(rng.Uniform(v.size / 2, 1.0 - v.size / 2));
      edits.push_back({EditKind::kAdd, n, v});
    }
  }
  rng.Shuffle(edits);
  return edits;
}

struct NearMiss {
  Figure figure;
  std::vector<EditOp> trail;
  std::size_t source_index = 0;
  std::uint64_t stream_seed = 0;
};

// Breadth-first search over edit sequences of length <= cfg.max_edits from
// a positive figure, returning the first valid figure that the pattern
// rejects. Throws NoNearMissFound when the budget runs out.
inline NearMiss FindNearMiss(const Pattern& p, const Figure& positive, Rng& rng,
                             const SamplerConfig& cfg = {}) {
  struct Frontier {
    Figure figure;
    std::vector<EditOp> trail;
  };
  std::vector<Frontier> level = {{positive, {}}};
  int evaluated = 0;
  for (int depth = 1; depth <= cfg.max_edits; ++depth) {
    std::vector<Frontier> next;
    for (const auto& node : level) {
      for (const EditOp& edit :
           CandidateEdits(node.figure, p.universe, rng, cfg.continuous_edit_samples)) {
        if (evaluated >= cfg.near_miss_budget) break;
        Figure candidate = ApplyEdit(node.figure, edit);
        if (!p.Validate(candidate).ok()) continue;
        ++evaluated;
        std::vector<EditOp> trail = node.trail;
        trail.push_back(edit);
        if (!p.Member(candidate)) return NearMiss{std::move(candidate), std::move(trail), 0, 0};
        if (depth < cfg.max_edits) next.push_back({std::move(candidate), std::move(trail)});
      }
    }
    level = std::move(next);
  }
  throw Error(ErrorCode::kNoNearMissFound,
              "statement '" + p.id + "': no figure within " + std::to_string(cfg.max_edits) +
                  " edit(s) falsifies the statement (" + std::to_string(evaluated) +
                  " candidates tried)");
}

struct NearMissBatch {
  std::vector<NearMiss> items;
  GenerationReport report;
};

// Produces up to `count` near misses (default: one per positive), cycling
// through the positives in order. Sources without a flipping edit are
// skipped and counted in report.skipped.
inline NearMissBatch GenerateNearMisses(const Pattern& p, const std::vector<Figure>& positives,
                                        std::uint64_t seed, const SamplerConfig& cfg = {},
                                        std::optional<std::size_t> count = std::nullopt) {
  NearMissBatch batch;
  const std::size_t want = count.value_or(positives.size());
  batch.report.requested = want;
  batch.report.seed = seed;
  if (positives.empty()) return batch;
  std::size_t consecutive_failures = 0;
  for (std::size_t j = 0; batch.items.size() < want && consecutive_failures < positives.size();
       ++j) {
    const std::size_t source = j % positives.size();
    Rng rng = Rng::Stream(seed, StreamDomain::kNearMisses, j);
    ++batch.report.attempts;
    try {
      NearMiss miss = FindNearMiss(p, positives[source], rng, cfg);
      miss.source_index = source;
      miss.stream_seed = rng.seed();
      batch.items.push_back(std::move(miss));
      consecutive_failures = 0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoNearMissFound) throw;
      ++batch.report.skipped;
      ++consecutive_failures;
    }
  }
  batch.report.produced = batch.items.size();
  internal::Finish(batch.report);
  return batch;
}

}  // namespace kandinsky::sampler
