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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/parallel.hpp"
#include "kandinsky/rng.hpp"
#include "kandinsky/sampler.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky::challenges {

using sampler::EditKind;
using sampler::EditOp;

// Signed distance from p to the boundary of the shape, positive inside.
inline double InteriorDistance(Shape shape, double cx, double cy, double size, Point p) {
  if (shape == Shape::kCircle) return size / 2.0 - std::hypot(p.x - cx, p.y - cy);
  const auto v = ShapeVertices(shape, cx, cy, size);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i], b = v[(i + 1) % v.size()];
    const double ex = b.x - a.x, ey = b.y - a.y;
    // Vertices run clockwise on screen (counter-clockwise in y-up terms), so
    // the interior lies on the side where the cross product is positive.
    const double cross = ex * (p.y - a.y) - ey * (p.x - a.x);
    best = std::min(best, cross / std::hypot(ex, ey));
  }
  return best;
}

inline constexpr double kContainmentEps = 1e-12;

inline bool InsideShape(Shape shape, double cx, double cy, double size, Point p) {
  return InteriorDistance(shape, cx, cy, size, p) >= -kContainmentEps;
}

// ---------------------------------------------------------------------------
// Challenge 1: objects arranged on big latent shapes.
// ---------------------------------------------------------------------------

struct LatentRegion {
  Shape region_shape = Shape::kSquare;
  double cx = 0.5;
  double cy = 0.5;
  double size = 0.4;
  std::vector<std::size_t> members;

  bool Contains(Point p) const { return InsideShape(region_shape, cx, cy, size, p); }

  friend bool operator==(const LatentRegion&, const LatentRegion&) = default;
};

// The two colors a big shape may contain.
inline std::array<Color, 2> AllowedColors(Shape region_shape) {
  switch (region_shape) {
    case Shape::kSquare: return {Color::kBlue, Color::kRed};
    case Shape::kTriangle: return {Color::kYellow, Color::kRed};
    case Shape::kCircle: return {Color::kYellow, Color::kBlue};
  }
  return {Color::kRed, Color::kRed};
}

inline Color ForbiddenColor(Shape region_shape) {
  const auto allowed = AllowedColors(region_shape);
  for (Color c : kAllColors) {
    if (c != allowed[0] && c != allowed[1]) return c;
  }
  return Color::kRed;
}

enum class PlacementMode { kInterior, kOutline };

struct Challenge1Config {
  int regions_min = 1;
  int regions_max = 3;
  double region_size_min = 0.32;
  double region_size_max = 0.46;
  int members_min = 3;
  int members_max = 6;
  double member_size_min = 0.025;
  double member_size_max = 0.05;
  double min_gap = 0.0;
  PlacementMode mode = PlacementMode::kInterior;
  int placement_retries = 1000;
  int restarts = 50;
  int threads = 1;
};

inline UniverseConfig Challenge1Universe(const Challenge1Config& cfg = {}) {
  UniverseConfig u;
  u.n_min = cfg.regions_min * cfg.members_min;
  u.n_max = cfg.regions_max * cfg.members_max;
  u.size_min = cfg.member_size_min;
  u.size_max = cfg.member_size_max;
  u.small_big_threshold = (cfg.member_size_min + cfg.member_size_max) / 2.0;
  u.min_gap = cfg.min_gap;
  return u;
}

struct Challenge1Instance {
  Figure figure;
  std::vector<LatentRegion> regions;
  std::uint64_t stream_seed = 0;
};

enum class RegionRule {
  kBadMemberIndex,
  kOutsideRegion,
  kShapeExcluded,
  kColorExcluded,
  kUnassigned,
  kRegionsOverlap,
  kRegionCropped,
};

inline std::string_view RegionRuleName(RegionRule r) {
  switch (r) {
    case RegionRule::kBadMemberIndex: return "bad member index";
    case RegionRule::kOutsideRegion: return "member outside region";
    case RegionRule::kShapeExcluded: return "member shares the region's shape";
    case RegionRule::kColorExcluded: return "member color not allowed in region";
    case RegionRule::kUnassigned: return "object not assigned to exactly one region";
    case RegionRule::kRegionsOverlap: return "regions overlap";
    case RegionRule::kRegionCropped: return "region cropped at border";
  }
  return "?";
}

struct RegionViolation {
  RegionRule rule;
  std::size_t region = 0;
  std::optional<std::size_t> object;
  std::string message;
};

struct Challenge1Report {
  std::vector<RegionViolation> violations;
  bool ok() const { return violations.empty(); }
  bool Has(RegionRule rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [rule](const RegionViolation& v) { return v.rule == rule; });
  }
};

// Exact check of every latent-region rule: member centers inside their
// region, no member shaped like its region, member colors within the
// region's pair, each object in exactly one region, regions disjoint and on
// the canvas.
inline Challenge1Report ValidateChallenge1(const Figure& f,
                                           const std::vector<LatentRegion>& regions) {
  Challenge1Report report;
  auto add = [&](RegionRule rule, std::size_t region, std::optional<std::size_t> object,
                 std::string message) {
    report.violations.push_back({rule, region, object, std::move(message)});
  };
  std::vector<int> owners(f.objects.size(), 0);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const LatentRegion& region = regions[r];
    const std::string tag = "region " + std::to_string(r);
    if (region.cx < region.size / 2 || region.cx > 1 - region.size / 2 ||
        region.cy < region.size / 2 || region.cy > 1 - region.size / 2) {
      add(RegionRule::kRegionCropped, r, std::nullopt, tag + " extends past the canvas");
    }
    for (std::size_t s = r + 1; s < regions.size(); ++s) {
      if (std::hypot(region.cx - regions[s].cx, region.cy - regions[s].cy) <
          (region.size + regions[s].size) / 2) {
        add(RegionRule::kRegionsOverlap, r, std::nullopt,
            tag + " overlaps region " + std::to_string(s));
      }
    }
    const auto allowed = AllowedColors(region.region_shape);
    for (std::size_t m : region.members) {
      if (m >= f.objects.size()) {
        add(RegionRule::kBadMemberIndex, r, m, tag + " lists missing object " + std::to_string(m));
        continue;
      }
      ++owners[m];
      const ObjectSpec& o = f.objects[m];
      const std::string who = "object " + std::to_string(m) + " in " + tag;
      if (!region.Contains({o.x, o.y})) {
        add(RegionRule::kOutsideRegion, r, m, who + " lies outside the region");
      }
      if (o.shape == region.region_shape) {
        add(RegionRule::kShapeExcluded, r, m,
            who + " is a " + std::string(ShapeName(o.shape)) + " inside a big " +
                std::string(ShapeName(region.region_shape)));
      }
      if (o.color != allowed[0] && o.color != allowed[1]) {
        add(RegionRule::kColorExcluded, r, m,
            who + " is " + std::string(ColorName(o.color)) + " inside a big " +
                std::string(ShapeName(region.region_shape)));
      }
    }
  }
  for (std::size_t i = 0; i < owners.size(); ++i) {
    if (owners[i] != 1) {
      add(RegionRule::kUnassigned, 0, i,
          "object " + std::to_string(i) + " belongs to " + std::to_string(owners[i]) +
              " regions");
    }
  }
  return report;
}

namespace internal {

inline Point SampleInRegion(const LatentRegion& region, double margin, PlacementMode mode,
                            Rng& rng, int retries) {
  const double r = region.size / 2.0;
  if (mode == PlacementMode::kOutline) {
    // A point on the contour, nudged inwards so it stays inside under
    // floating-point rounding.
    Point p;
    if (region.region_shape == Shape::kCircle) {
      const double t = rng.Uniform(0, 2 * std::numbers::pi);
      p = {region.cx + r * std::cos(t), region.cy + r * std::sin(t)};
    } else {
      const auto v = ShapeVertices(region.region_shape, region.cx, region.cy, region.size);
      const std::size_t edge = rng.Below(v.size());
      const double t = rng.Uniform01();
      const Point a = v[edge], b = v[(edge + 1) % v.size()];
      p = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    }
    const double pull = 1e-9;
    return {CanonicalReal(p.x + (region.cx - p.x) * pull),
            CanonicalReal(p.y + (region.cy - p.y) * pull)};
  }
  for (int k = 0; k < retries; ++k) {
    const Point p{CanonicalReal(rng.Uniform(region.cx - r, region.cx + r)),
                  CanonicalReal(rng.Uniform(region.cy - r, region.cy + r))};
    if (InteriorDistance(region.region_shape, region.cx, region.cy, region.size, p) >= margin) {
      return p;
    }
  }
  return {-1.0, -1.0};
}

inline std::optional<Challenge1Instance> TryChallenge1(const Challenge1Config& cfg, Rng& rng) {
  Challenge1Instance inst;
  const int region_count = rng.Between(cfg.regions_min, cfg.regions_max);
  for (int k = 0; k < region_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
      LatentRegion region;
      region.region_shape = rng.Pick(std::vector<Shape>(kAllShapes.begin(), kAllShapes.end()));
      region.size = CanonicalReal(rng.Uniform(cfg.region_size_min, cfg.region_size_max));
      region.cx = CanonicalReal(rng.Uniform(region.size / 2, 1 - region.size / 2));
      region.cy = CanonicalReal(rng.Uniform(region.size / 2, 1 - region.size / 2));
      if (region.cx < region.size / 2 || region.cx > 1 - region.size / 2 ||
          region.cy < region.size / 2 || region.cy > 1 - region.size / 2) {
        continue;
      }
      placed = std::none_of(inst.regions.begin(), inst.regions.end(), [&](const LatentRegion& o) {
        return std::hypot(region.cx - o.cx, region.cy - o.cy) < (region.size + o.size) / 2;
      });
      if (placed) inst.regions.push_back(region);
    }
    if (!placed) return std::nullopt;
  }
  for (auto& region : inst.regions) {
    const auto colors = AllowedColors(region.region_shape);
    std::vector<Shape> shapes;
    for (Shape s : kAllShapes) {
      if (s != region.region_shape) shapes.push_back(s);
    }
    const int members = rng.Between(cfg.members_min, cfg.members_max);
    for (int m = 0; m < members; ++m) {
      bool placed = false;
      for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
        ObjectSpec o;
        o.shape = rng.Pick(shapes);
        o.color = colors[rng.Below(2)];
        o.size = CanonicalReal(rng.Uniform(cfg.member_size_min, cfg.member_size_max));
        const Point p = SampleInRegion(region, o.size / 2, cfg.mode, rng, 1);
        o.x = p.x;
        o.y = p.y;
        if (!region.Contains(p) || !InsideCanvas(o)) continue;
        placed = std::none_of(inst.figure.objects.begin(), inst.figure.objects.end(),
                              [&](const ObjectSpec& other) {
                                return Overlaps(o, other, cfg.min_gap);
                              });
        if (placed) {
          region.members.push_back(inst.figure.objects.size());
          inst.figure.objects.push_back(o);
        }
      }
      if (!placed) return std::nullopt;
    }
  }
  return inst;
}

}  // namespace internal

// One challenge-1 figure drawn from `rng`; restarts the whole layout when a
// region or member cannot be placed.
inline Challenge1Instance SampleChallenge1(const Challenge1Config& cfg, Rng& rng) {
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    if (auto inst = internal::TryChallenge1(cfg, rng)) {
      inst->stream_seed = rng.seed();
      return std::move(*inst);
    }
  }
  throw Error(ErrorCode::kPlacementExhausted,
              "challenge-1: could not lay out regions and members after " +
                  std::to_string(cfg.restarts) + " restarts");
}

inline std::vector<Challenge1Instance> GenerateChallenge1(std::size_t count, std::uint64_t seed,
                                                          const Challenge1Config& cfg = {}) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "challenge-1: count must be >= 1");
  std::vector<Challenge1Instance> out(count);
  ParallelFor(count, cfg.threads, [&](std::size_t i) {
    Rng rng = Rng::Stream(seed, StreamDomain::kChallenge, i);
    out[i] = SampleChallenge1(cfg, rng);
  });
  return out;
}

// An edit that breaks exactly one member's rule: recolor to the region's
// excluded color, or reshape to the region's own shape.
inline EditOp Challenge1Violation(const Challenge1Instance& inst, Rng& rng,
                                  const std::vector<std::size_t>& exclude = {}) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (region, member)
  for (std::size_t r = 0; r < inst.regions.size(); ++r) {
    for (std::size_t m : inst.regions[r].members) {
      if (std::find(exclude.begin(), exclude.end(), m) == exclude.end()) slots.push_back({r, m});
    }
  }
  const auto [r, m] = slots[rng.Below(slots.size())];
  const LatentRegion& region = inst.regions[r];
  ObjectSpec value = inst.figure.objects[m];
  if (rng.Coin()) {
    value.color = ForbiddenColor(region.region_shape);
    return {EditKind::kRecolor, m, value};
  }
  value.shape = region.region_shape;
  return {EditKind::kReshape, m, value};
}

// Ground-truth violators with the same layout: at least two members (about a
// third of them) break a rule.
inline Challenge1Instance Challenge1Negative(const Challenge1Instance& positive, Rng& rng) {
  Challenge1Instance out = positive;
  const std::size_t total = positive.figure.objects.size();
  const std::size_t corrupt = std::clamp<std::size_t>(total / 3, 2, total);
  std::vector<std::size_t> touched;
  for (std::size_t k = 0; k < corrupt; ++k) {
    const EditOp e = Challenge1Violation(out, rng, touched);
    touched.push_back(e.target);
    out.figure = sampler::ApplyEdit(out.figure, e);
  }
  return out;
}

struct Challenge1NearMiss {
  Challenge1Instance instance;
  EditOp edit;
  std::size_t source_index = 0;
};

inline Challenge1NearMiss Challenge1Counterfactual(const Challenge1Instance& positive,
                                                   std::size_t source_index, Rng& rng) {
  Challenge1NearMiss out{positive, Challenge1Violation(positive, rng), source_index};
  out.instance.figure = sampler::ApplyEdit(positive.figure, out.edit);
  return out;
}

// ---------------------------------------------------------------------------
// Challenge 2: nine circles on a regular grid.
// ---------------------------------------------------------------------------

struct GridLayout {
  std::vector<Point> points;
};

struct GridUniverse {
  UniverseConfig universe;
  GridLayout grid;
};

inline constexpr double kGridSnapTolerance = 1e-12;

inline GridUniverse Challenge2Universe() {
  GridUniverse g;
  g.universe.n_min = 9;
  g.universe.n_max = 9;
  g.universe.allowed_shapes = {Shape::kCircle};
  g.universe.size_min = 0.16;
  g.universe.size_max = 0.16;
  g.universe.small_big_threshold = 0.16;
  for (double y : {0.25, 0.5, 0.75}) {
    for (double x : {0.25, 0.5, 0.75}) g.grid.points.push_back({x, y});
  }
  return g;
}

// Every object sits on a distinct grid point and every grid point is used.
inline ValidationReport ValidateGrid(const Figure& f, const GridLayout& grid) {
  ValidationReport report;
  std::vector<int> used(grid.points.size(), 0);
  for (std::size_t i = 0; i < f.objects.size(); ++i) {
    bool snapped = false;
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
      if (std::abs(f.objects[i].x - grid.points[k].x) <= kGridSnapTolerance &&
          std::abs(f.objects[i].y - grid.points[k].y) <= kGridSnapTolerance) {
        ++used[k];
        snapped = true;
        break;
      }
    }
    if (!snapped) {
      report.violations.push_back(
          {Rule::kCount, i, std::nullopt, "object " + std::to_string(i) + " is off the grid"});
    }
  }
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (used[k] != 1) {
      report.violations.push_back({Rule::kCount, std::nullopt, std::nullopt,
                                   "grid point " + std::to_string(k) + " holds " +
                                       std::to_string(used[k]) + " objects"});
    }
  }
  return report;
}

inline Figure SampleGridFigure(const GridUniverse& g, Rng& rng) {
  Figure f;
  for (const Point& p : g.grid.points) {
    f.objects.push_back({rng.Pick(g.universe.allowed_shapes), rng.Pick(g.universe.allowed_colors),
                         g.universe.size_min, p.x, p.y});
  }
  return f;
}

// A pattern over the challenge-2 universe for a user-supplied ground truth.
inline sampler::Pattern Challenge2Pattern(std::string id, dsl::Statement statement,
                                          const gestalt::GestaltConfig& gcfg = {}) {
  const GridUniverse g = Challenge2Universe();
  sampler::Pattern p = sampler::MakePattern(std::move(id), std::move(statement), g.universe, gcfg);
  p.source = [g](std::optional<int>, Rng& rng) { return SampleGridFigure(g, rng); };
  p.structure = [grid = g.grid](const Figure& f) { return ValidateGrid(f, grid); };
  return p;
}

// ---------------------------------------------------------------------------
// Challenge 3: equal-size blue and yellow circles.
// ---------------------------------------------------------------------------

inline UniverseConfig Challenge3Universe() {
  UniverseConfig u;
  u.n_min = 2;
  u.n_max = 20;
  u.allowed_shapes = {Shape::kCircle};
  u.allowed_colors = {Color::kBlue, Color::kYellow};
  u.size_min = 0.08;
  u.size_max = 0.08;
  u.small_big_threshold = 0.08;
  return u;
}

inline sampler::Pattern Challenge3Pattern(std::string id, dsl::Statement statement,
                                          const gestalt::GestaltConfig& gcfg = {}) {
  return sampler::MakePattern(std::move(id), std::move(statement), Challenge3Universe(), gcfg);
}

// ---------------------------------------------------------------------------
// The worked ground-truth example.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kGroundTruthText =
    "EXISTS a,b,c,d DISTINCT IN objects : SAME_SHAPE(a,b) AND SAME_COLOR(a,b) "
    "AND SAME_SHAPE(c,d) AND NOT SAME_COLOR(c,d)";

inline constexpr std::string_view kHypothesis2Text =
    "COUNT(objects) = 4 AND COUNT(objects WHERE shape = triangle) = 2 "
    "AND COUNT(objects WHERE shape = circle) = 2 "
    "AND (EXISTS a,b DISTINCT IN objects WHERE shape = triangle : NOT SAME_COLOR(a,b)) "
    "AND (EXISTS c,d DISTINCT IN objects WHERE shape = circle : SAME_COLOR(c,d))";

struct DefinitionsExample {
  dsl::Statement gt;
  dsl::Statement h2;
};

inline DefinitionsExample DefinitionsExampleStatements() {
  return {dsl::ParseStatement(kGroundTruthText), dsl::ParseStatement(kHypothesis2Text)};
}

inline UniverseConfig DefinitionsUniverse() {
  UniverseConfig u;
  u.n_min = 2;
  u.n_max = 6;
  u.size_min = 0.08;
  u.size_max = 0.16;
  u.small_big_threshold = 0.12;
  return u;
}

// Two triangles of different colors and two circles sharing a color.
inline Figure SampleHypothesis2Figure(const UniverseConfig& u, Rng& rng, int retries = 1000) {
  std::vector<Color> colors(kAllColors.begin(), kAllColors.end());
  rng.Shuffle(colors);
  const Color circle_color = rng.Pick(colors);
  UniverseConfig four = u;
  four.n_min = four.n_max = 4;
  Figure f = sampler::SampleFigureWithCount(four, 4, rng, retries);
  f.objects[0].shape = f.objects[1].shape = Shape::kTriangle;
  f.objects[0].color = colors[0];
  f.objects[1].color = colors[1];
  f.objects[2].shape = f.objects[3].shape = Shape::kCircle;
  f.objects[2].color = f.objects[3].color = circle_color;
  return f;
}

// ---------------------------------------------------------------------------
// Bundles.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& ChallengeIds() {
  static const std::vector<std::string> ids = {"definitions-example", "challenge-1",
                                               "challenge-2", "challenge-3"};
  return ids;
}

struct ChallengeSpec {
  std::string id;
  UniverseConfig universe;
  std::optional<dsl::Statement> gt;  // nullopt: latent generator (challenge-1) or user plug-in
  std::vector<std::pair<std::string, dsl::Statement>> hypotheses;
};

inline ChallengeSpec GetChallenge(const std::string& id) {
  ChallengeSpec spec;
  spec.id = id;
  auto hyp = [&](std::string name, std::string_view text) {
    spec.hypotheses.emplace_back(std::move(name), dsl::ParseStatement(text));
  };
  if (id == "definitions-example") {
    const auto ex = DefinitionsExampleStatements();
    spec.universe = DefinitionsUniverse();
    spec.gt = ex.gt;
    spec.hypotheses = {{"gt", ex.gt}, {"h2", ex.h2}};
  } else if (id == "challenge-1") {
    spec.universe = Challenge1Universe();
    hyp("no-yellow-squares", "COUNT(objects WHERE color = yellow AND shape = square) = 0");
    hyp("two-colors-only", "COUNT(objects WHERE color = red) = 0 OR COUNT(objects WHERE color = blue) = 0 OR COUNT(objects WHERE color = yellow) = 0");
    hyp("mixed-shapes", "EXISTS a,b IN objects : NOT SAME_SHAPE(a,b)");
  } else if (id == "challenge-2") {
    spec.universe = Challenge2Universe().universe;
    hyp("more-blue-than-red", "COUNT(objects WHERE color = blue) > COUNT(objects WHERE color = red)");
    hyp("symmetric-colors", "SYMMETRIC(objects)");
    hyp("red-left-column", "FORALL o IN objects WHERE side = left : o.color = red");
  } else if (id == "challenge-3") {
    spec.universe = Challenge3Universe();
    hyp("more-yellow-than-blue", "COUNT(objects WHERE color = yellow) > COUNT(objects WHERE color = blue)");
    hyp("yellow-ring", "CIRCULAR(objects WHERE color = yellow)");
    hyp("two-groups", "CLUSTERED(objects, 2)");
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown challenge id '" + id + "'");
  }
  return spec;
}

// Constructive generators made available to the sampler by name.
inline void RegisterBuiltinGenerators(sampler::GeneratorRegistry& registry) {
  registry.Register("challenge-2-grid", [g = Challenge2Universe()](std::optional<int>, Rng& rng) {
    return SampleGridFigure(g, rng);
  });
  registry.Register("definitions-h2", [u = DefinitionsUniverse()](std::optional<int>, Rng& rng) {
    return SampleHypothesis2Figure(u, rng);
  });
}

}  // namespace kandinsky::challenges
