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

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "kandinsky/challenges.hpp"
#include "support/brute_force.hpp"
#include "support/containment.hpp"
#include "support/edit_distance.hpp"
#include "support/fixtures.hpp"

namespace kandinsky::challenges {
namespace {

using testing::Obj;

LatentRegion BigSquare(std::vector<std::size_t> members) {
  LatentRegion r;
  r.region_shape = Shape::kSquare;
  r.cx = r.cy = 0.5;
  r.size = 0.6;
  r.members = std::move(members);
  return r;
}

TEST(Challenge1ValidatorTest, SquareWithBlueCirclesAndRedTrianglesIsValid) {
  const Figure f{{Obj(Shape::kCircle, Color::kBlue, 0.04, 0.4, 0.4),
                  Obj(Shape::kCircle, Color::kBlue, 0.04, 0.6, 0.4),
                  Obj(Shape::kTriangle, Color::kRed, 0.04, 0.5, 0.6)}};
  EXPECT_TRUE(ValidateChallenge1(f, {BigSquare({0, 1, 2})}).ok());
}

TEST(Challenge1ValidatorTest, YellowInsideSquareIsAViolation) {
  const Figure f{{Obj(Shape::kCircle, Color::kYellow, 0.04, 0.4, 0.4)}};
  const Challenge1Report r = ValidateChallenge1(f, {BigSquare({0})});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, RegionRule::kColorExcluded);
  EXPECT_EQ(r.violations[0].object, 0u);
}

TEST(Challenge1ValidatorTest, TriangleInsideBigTriangleIsAViolation) {
  LatentRegion tri;
  tri.region_shape = Shape::kTriangle;
  tri.cx = tri.cy = 0.5;
  tri.size = 0.6;
  tri.members = {0};
  const Figure f{{Obj(Shape::kTriangle, Color::kYellow, 0.04, 0.5, 0.55)}};
  const Challenge1Report r = ValidateChallenge1(f, {tri});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, RegionRule::kShapeExcluded);
}

TEST(Challenge1ValidatorTest, GeometryAndBookkeepingRules) {
  const Figure f{{Obj(Shape::kCircle, Color::kBlue, 0.04, 0.05, 0.05),
                  Obj(Shape::kCircle, Color::kBlue, 0.04, 0.5, 0.5)}};
  LatentRegion a = BigSquare({0, 7});
  LatentRegion b = BigSquare({});
  b.cx = 0.8;
  const Challenge1Report r = ValidateChallenge1(f, {a, b});
  EXPECT_TRUE(r.Has(RegionRule::kOutsideRegion));
  EXPECT_TRUE(r.Has(RegionRule::kBadMemberIndex));
  EXPECT_TRUE(r.Has(RegionRule::kUnassigned));
  EXPECT_TRUE(r.Has(RegionRule::kRegionsOverlap));
  EXPECT_TRUE(r.Has(RegionRule::kRegionCropped));
}

TEST(Challenge1ValidatorTest, ColorPairs) {
  auto allowed = [](Shape s) {
    const auto a = AllowedColors(s);
    return std::set<Color>(a.begin(), a.end());
  };
  EXPECT_EQ(allowed(Shape::kSquare), (std::set<Color>{Color::kBlue, Color::kRed}));
  EXPECT_EQ(allowed(Shape::kTriangle), (std::set<Color>{Color::kYellow, Color::kRed}));
  EXPECT_EQ(allowed(Shape::kCircle), (std::set<Color>{Color::kYellow, Color::kBlue}));
  EXPECT_EQ(ForbiddenColor(Shape::kSquare), Color::kYellow);
  EXPECT_EQ(ForbiddenColor(Shape::kTriangle), Color::kBlue);
  EXPECT_EQ(ForbiddenColor(Shape::kCircle), Color::kRed);
}

TEST(ContainmentTest, ExactTestAgreesWithReferenceAndMonteCarloArea) {
  Rng rng(71);
  for (Shape s : kAllShapes) {
    const double cx = 0.45, cy = 0.55, size = 0.4;
    const double r = size / 2;
    int inside = 0;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
      const double px = rng.Uniform(cx - r, cx + r), py = rng.Uniform(cy - r, cy + r);
      const bool exact = InsideShape(s, cx, cy, size, {px, py});
      const bool ref = testing::ReferenceInside(s, cx, cy, size, px, py);
      if (std::abs(InteriorDistance(s, cx, cy, size, {px, py})) > 1e-9) {
        ASSERT_EQ(exact, ref) << ShapeName(s) << " " << px << "," << py;
      }
      inside += exact;
    }
    const double p = testing::ReferenceArea(s, size) / (size * size);
    const double sigma = std::sqrt(p * (1 - p) / samples);
    EXPECT_NEAR(static_cast<double>(inside) / samples, p, 4 * sigma) << ShapeName(s);
  }
}

TEST(Challenge1GenerationTest, InstancesAreValidAndColorRulesHold) {
  const auto instances = GenerateChallenge1(100, 72);
  const UniverseConfig u = Challenge1Universe();
  for (const auto& inst : instances) {
    const Challenge1Report r = ValidateChallenge1(inst.figure, inst.regions);
    ASSERT_TRUE(r.ok()) << r.violations.front().message;
    EXPECT_TRUE(ValidateFigure(inst.figure, u).ok());
    ASSERT_GE(inst.regions.size(), 1u);
    ASSERT_LE(inst.regions.size(), 3u);
    for (const auto& region : inst.regions) {
      EXPECT_GE(region.members.size(), 3u);
      EXPECT_LE(region.members.size(), 6u);
      for (std::size_t m : region.members) {
        const ObjectSpec& o = inst.figure.objects[m];
        EXPECT_NE(o.shape, region.region_shape);
        EXPECT_NE(o.color, ForbiddenColor(region.region_shape));
        EXPECT_TRUE(testing::ReferenceInside(region.region_shape, region.cx, region.cy,
                                             region.size, o.x, o.y));
      }
    }
  }
}

TEST(Challenge1GenerationTest, OutlineModeIsValid) {
  Challenge1Config cfg;
  cfg.mode = PlacementMode::kOutline;
  for (const auto& inst : GenerateChallenge1(50, 73, cfg)) {
    EXPECT_TRUE(ValidateChallenge1(inst.figure, inst.regions).ok());
    for (const auto& region : inst.regions) {
      for (std::size_t m : region.members) {
        const ObjectSpec& o = inst.figure.objects[m];
        EXPECT_LT(InteriorDistance(region.region_shape, region.cx, region.cy, region.size,
                                   {o.x, o.y}),
                  1e-6);
      }
    }
  }
}

TEST(Challenge1GenerationTest, DeterministicAcrossThreads) {
  Challenge1Config one, four;
  four.threads = 4;
  const auto a = GenerateChallenge1(20, 74, one);
  const auto b = GenerateChallenge1(20, 74, four);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].figure, b[i].figure);
    EXPECT_EQ(a[i].regions, b[i].regions);
  }
}

TEST(Challenge1GenerationTest, OverDenseConfigExhaustsPlacement) {
  Challenge1Config cfg;
  cfg.regions_min = cfg.regions_max = 3;
  cfg.region_size_min = cfg.region_size_max = 0.6;
  cfg.placement_retries = 20;
  cfg.restarts = 2;
  try {
    GenerateChallenge1(1, 75, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlacementExhausted);
  }
  EXPECT_THROW(GenerateChallenge1(0, 75), Error);
}

TEST(Challenge1GenerationTest, NegativesAndCounterfactualsBreakTheRules) {
  const auto instances = GenerateChallenge1(50, 76);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    Rng rng = Rng::Stream(76, StreamDomain::kFree, i);
    const Challenge1Instance neg = Challenge1Negative(instances[i], rng);
    const Challenge1Report nr = ValidateChallenge1(neg.figure, neg.regions);
    EXPECT_GE(nr.violations.size(), 2u);
    const Challenge1NearMiss cf = Challenge1Counterfactual(instances[i], i, rng);
    const Challenge1Report cr = ValidateChallenge1(cf.instance.figure, cf.instance.regions);
    EXPECT_EQ(cr.violations.size(), 1u);
    EXPECT_TRUE(testing::WithinOneEdit(instances[i].figure, cf.instance.figure));
    EXPECT_TRUE(ValidateFigure(cf.instance.figure, Challenge1Universe()).ok());
  }
}

TEST(Challenge2Test, GeneratedFiguresSitOnTheGrid) {
  const GridUniverse g = Challenge2Universe();
  for (int i = 0; i < 200; ++i) {
    Rng rng = Rng::Stream(81, StreamDomain::kFree, i);
    const Figure f = SampleGridFigure(g, rng);
    ASSERT_EQ(f.objects.size(), 9u);
    EXPECT_TRUE(ValidateFigure(f, g.universe).ok());
    EXPECT_TRUE(ValidateGrid(f, g.grid).ok());
    std::set<std::pair<double, double>> centers;
    for (const auto& o : f.objects) {
      EXPECT_EQ(o.shape, Shape::kCircle);
      bool on_grid = false;
      for (double x : {0.25, 0.5, 0.75})
        for (double y : {0.25, 0.5, 0.75})
          on_grid |= std::abs(o.x - x) <= 1e-12 && std::abs(o.y - y) <= 1e-12;
      EXPECT_TRUE(on_grid);
      centers.insert({o.x, o.y});
    }
    EXPECT_EQ(centers.size(), 9u);
  }
}

TEST(Challenge2Test, EightObjectsOrNonCirclesAreRejected) {
  const GridUniverse g = Challenge2Universe();
  Rng rng(82);
  Figure f = SampleGridFigure(g, rng);
  Figure eight = f;
  eight.objects.pop_back();
  EXPECT_TRUE(ValidateFigure(eight, g.universe).Has(Rule::kCount));
  EXPECT_FALSE(ValidateGrid(eight, g.grid).ok());
  Figure square = f;
  square.objects[4].shape = Shape::kSquare;
  EXPECT_TRUE(ValidateFigure(square, g.universe).Has(Rule::kShapeNotAllowed));
  Figure off = f;
  off.objects[0].x += 1e-9;
  EXPECT_FALSE(ValidateGrid(off, g.grid).ok());
}

TEST(Challenge2Test, PatternGeneratesGridPositivesAndNegatives) {
  const sampler::Pattern p = Challenge2Pattern(
      "grid", dsl::ParseStatement("COUNT(objects WHERE color = red) > COUNT(objects WHERE color = blue)"));
  const auto pos = sampler::GeneratePositives(p, 30, 83);
  const auto neg = sampler::GenerateNegatives(p, 30, 83, {}, &pos.figures);
  for (const auto* set : {&pos.figures, &neg.figures}) {
    for (const auto& f : *set) EXPECT_TRUE(p.Validate(f).ok());
  }
}

TEST(Challenge3Test, EqualSizeBlueAndYellowCircles) {
  const UniverseConfig u = Challenge3Universe();
  const sampler::Pattern p =
      Challenge3Pattern("c3", dsl::ParseStatement("COUNT(objects WHERE color = yellow) > 3"));
  for (const auto& f : sampler::GeneratePositives(p, 100, 84).figures) {
    EXPECT_TRUE(ValidateFigure(f, u).ok());
    for (const auto& o : f.objects) {
      EXPECT_EQ(o.shape, Shape::kCircle);
      EXPECT_TRUE(o.color == Color::kBlue || o.color == Color::kYellow);
      EXPECT_EQ(o.size, f.objects.front().size);
    }
  }
  Figure red{{Obj(Shape::kCircle, Color::kRed, 0.08, 0.3, 0.3), Obj(Shape::kCircle, Color::kBlue, 0.08, 0.7, 0.7)}};
  EXPECT_TRUE(ValidateFigure(red, u).Has(Rule::kColorNotAllowed));
  Figure mixed{{Obj(Shape::kCircle, Color::kBlue, 0.1, 0.3, 0.3), Obj(Shape::kCircle, Color::kBlue, 0.08, 0.7, 0.7)}};
  EXPECT_TRUE(ValidateFigure(mixed, u).Has(Rule::kSize));
  Figure tri{{Obj(Shape::kTriangle, Color::kBlue, 0.08, 0.3, 0.3), Obj(Shape::kCircle, Color::kBlue, 0.08, 0.7, 0.7)}};
  EXPECT_TRUE(ValidateFigure(tri, u).Has(Rule::kShapeNotAllowed));
}

TEST(DefinitionsExampleTest, Hypothesis2FiguresSatisfyGroundTruth) {
  const auto ex = DefinitionsExampleStatements();
  const UniverseConfig u = DefinitionsUniverse();
  for (int i = 0; i < 1000; ++i) {
    Rng rng = Rng::Stream(91, StreamDomain::kFree, i);
    const Figure f = SampleHypothesis2Figure(u, rng);
    ASSERT_TRUE(ValidateFigure(f, u).ok());
    ASSERT_TRUE(dsl::Evaluate(ex.h2, f));
    ASSERT_TRUE(testing::BruteEvaluate(ex.gt, f, {}));
  }
}

TEST(DefinitionsExampleTest, SquaresAndCirclesFigureSeparatesTheHypotheses) {
  const auto ex = DefinitionsExampleStatements();
  const Figure f{{Obj(Shape::kSquare, Color::kRed, 0.1, 0.2, 0.2),
                  Obj(Shape::kSquare, Color::kRed, 0.1, 0.8, 0.2),
                  Obj(Shape::kCircle, Color::kBlue, 0.1, 0.2, 0.8),
                  Obj(Shape::kCircle, Color::kYellow, 0.1, 0.8, 0.8)}};
  EXPECT_TRUE(dsl::Evaluate(ex.gt, f));
  EXPECT_FALSE(dsl::Evaluate(ex.h2, f));
}

TEST(DefinitionsExampleTest, GroundTruthFailuresFailHypothesis2) {
  const auto ex = DefinitionsExampleStatements();
  const sampler::Pattern p = sampler::MakePattern("gt", ex.gt, DefinitionsUniverse());
  const auto neg = sampler::GenerateNegatives(p, 1000, 92);
  for (const auto& f : neg.figures) {
    ASSERT_FALSE(testing::BruteEvaluate(ex.gt, f, {}));
    ASSERT_FALSE(dsl::Evaluate(ex.h2, f));
  }
}

TEST(RegistryTest, BundledChallenges) {
  for (const auto& id : ChallengeIds()) {
    const ChallengeSpec spec = GetChallenge(id);
    EXPECT_EQ(spec.id, id);
    EXPECT_NO_THROW(CheckUniverse(spec.universe));
    EXPECT_FALSE(spec.hypotheses.empty());
    for (const auto& [name, s] : spec.hypotheses) {
      EXPECT_EQ(dsl::ToSource(dsl::ParseStatement(s.source)), dsl::ToSource(s)) << name;
    }
    EXPECT_EQ(spec.gt.has_value(), id == "definitions-example");
  }
  try {
    GetChallenge("challenge-9");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

}  // namespace
}  // namespace kandinsky::challenges
