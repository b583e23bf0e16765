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

#include <numeric>
#include <string>

#include "gtest/gtest.h"
#include "kandinsky/challenges.hpp"
#include "kandinsky/sampler.hpp"
#include "support/brute_force.hpp"
#include "support/edit_distance.hpp"
#include "support/fixtures.hpp"

namespace kandinsky::sampler {
namespace {

using testing::Obj;

Pattern MakeTextPattern(const std::string& text, UniverseConfig u = {}) {
  return MakePattern("p", dsl::ParseStatement(text), std::move(u));
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

TEST(SampleFigureTest, SingleObjectUniverse) {
  UniverseConfig u;
  u.n_min = u.n_max = 1;
  for (int i = 0; i < 200; ++i) {
    Rng rng = Rng::Stream(1, StreamDomain::kFree, i);
    const Figure f = SampleFigure(u, rng);
    ASSERT_EQ(f.objects.size(), 1u);
    EXPECT_TRUE(ValidateFigure(f, u).ok());
  }
}

TEST(SampleFigureTest, OverDenseUniverseExhaustsPlacement) {
  UniverseConfig u;
  u.n_min = u.n_max = 50;
  u.size_min = u.size_max = 0.5;
  Rng rng(1);
  EXPECT_EQ(CodeOf([&] { SampleFigure(u, rng, 100); }), ErrorCode::kPlacementExhausted);
}

TEST(SampleFigureTest, SameSeedSameFigure) {
  UniverseConfig u;
  Rng a(42), b(42);
  EXPECT_EQ(SampleFigure(u, a), SampleFigure(u, b));
}

TEST(SampleFigureTest, CountsCoverTheConfiguredRange) {
  UniverseConfig u;
  u.n_min = 2;
  u.n_max = 6;
  std::set<std::size_t> seen;
  for (int i = 0; i < 300; ++i) {
    Rng rng = Rng::Stream(2, StreamDomain::kFree, i);
    const Figure f = SampleFigure(u, rng);
    ASSERT_TRUE(ValidateFigure(f, u).ok());
    seen.insert(f.objects.size());
  }
  EXPECT_EQ(seen, (std::set<std::size_t>{2, 3, 4, 5, 6}));
}

TEST(SampleFigureTest, RespectsRestrictedVocabularyAndGap) {
  UniverseConfig u;
  u.allowed_shapes = {Shape::kTriangle};
  u.allowed_colors = {Color::kBlue, Color::kYellow};
  u.min_gap = 0.02;
  u.n_max = 10;
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::Stream(3, StreamDomain::kFree, i);
    EXPECT_TRUE(ValidateFigure(SampleFigure(u, rng), u).ok());
  }
}

TEST(GeneratePositivesTest, CountStatement) {
  const Pattern p = MakeTextPattern("COUNT(objects)=2");
  const Generated g = GeneratePositives(p, 100, 5);
  ASSERT_EQ(g.figures.size(), 100u);
  for (const auto& f : g.figures) {
    EXPECT_EQ(f.objects.size(), 2u);
    EXPECT_TRUE(ValidateFigure(f, p.universe).ok());
  }
  EXPECT_EQ(g.report.requested, 100u);
  EXPECT_EQ(g.report.produced, 100u);
  EXPECT_GE(g.report.attempts, g.report.produced);
  EXPECT_GT(g.report.rejection_rate, 0.5);
}

TEST(GeneratePositivesTest, GroundTruthVerifiedByBruteForce) {
  const Pattern p = MakePattern("gt", dsl::ParseStatement(challenges::kGroundTruthText),
                                challenges::DefinitionsUniverse());
  const Generated g = GeneratePositives(p, 50, 6);
  for (const auto& f : g.figures) EXPECT_TRUE(testing::BruteEvaluate(p.statement, f, p.context));
}

TEST(GeneratePositivesTest, ContradictionHasTooLowYield) {
  UniverseConfig u;
  u.n_max = 4;
  const Pattern p = MakeTextPattern("COUNT(objects)=1 AND COUNT(objects)=2", u);
  EXPECT_EQ(CodeOf([&] { GeneratePositives(p, 1, 7); }), ErrorCode::kYieldTooLow);
}

TEST(GeneratePositivesTest, ConstructiveGeneratorIsUsedAndChecked) {
  GeneratorRegistry registry;
  challenges::RegisterBuiltinGenerators(registry);
  const auto ex = challenges::DefinitionsExampleStatements();
  Pattern p = MakePattern("h2", ex.h2, challenges::DefinitionsUniverse());
  AttachConstructive(p, registry, "definitions-h2");
  const Generated g = GeneratePositives(p, 50, 8);
  for (const auto& f : g.figures) EXPECT_TRUE(p.Member(f));
  EXPECT_EQ(CodeOf([&] { AttachConstructive(p, registry, "nope"); }), ErrorCode::kInvalidArgument);
}

TEST(GenerateNegativesTest, CountStatementMatchesPositiveMean) {
  const Pattern p = MakeTextPattern("COUNT(objects)=2");
  const Generated pos = GeneratePositives(p, 100, 9);
  const Generated neg = GenerateNegatives(p, 200, 9, {}, &pos.figures);
  double mean = 0;
  for (const auto& f : neg.figures) {
    EXPECT_NE(f.objects.size(), 2u);
    EXPECT_FALSE(p.Member(f));
    mean += static_cast<double>(f.objects.size()) / neg.figures.size();
  }
  EXPECT_NEAR(mean, 2.0, 1.0);
}

TEST(GenerateNegativesTest, TautologyHasNoNegatives) {
  UniverseConfig u;
  u.n_max = 4;
  const Pattern p = MakeTextPattern("COUNT(objects) >= 1", u);
  EXPECT_EQ(CodeOf([&] { GenerateNegatives(p, 1, 10); }), ErrorCode::kYieldTooLow);
  const Generated pos = GeneratePositives(p, 5, 10);
  EXPECT_EQ(CodeOf([&] { GenerateNegatives(p, 1, 10, {}, &pos.figures); }),
            ErrorCode::kYieldTooLow);
}

TEST(GenerateNegativesTest, GroundTruthNegativesVerifiedByBruteForce) {
  const Pattern p = MakePattern("gt", dsl::ParseStatement(challenges::kGroundTruthText),
                                challenges::DefinitionsUniverse());
  const Generated pos = GeneratePositives(p, 50, 11);
  const Generated neg = GenerateNegatives(p, 50, 11, {}, &pos.figures);
  for (const auto& f : neg.figures) {
    EXPECT_FALSE(testing::BruteEvaluate(p.statement, f, p.context));
    EXPECT_TRUE(ValidateFigure(f, p.universe).ok());
  }
}

TEST(GenerationTest, ThreadCountDoesNotChangeOutput) {
  const Pattern p = MakeTextPattern("EXISTS a IN objects : a.color = red AND a.size = big");
  SamplerConfig one, four;
  four.threads = 4;
  const auto a = GeneratePositives(p, 64, 12, one);
  const auto b = GeneratePositives(p, 64, 12, four);
  EXPECT_EQ(a.figures, b.figures);
  EXPECT_EQ(a.stream_seeds, b.stream_seeds);
  EXPECT_EQ(GenerateNegatives(p, 64, 12, one, &a.figures).figures,
            GenerateNegatives(p, 64, 12, four, &a.figures).figures);
}

TEST(GenerationTest, StreamsAreIndependentOfBatchSize) {
  const Pattern p = MakeTextPattern("COUNT(objects) > 3");
  const auto small = GeneratePositives(p, 10, 13);
  const auto large = GeneratePositives(p, 30, 13);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(small.figures[i], large.figures[i]);
}

TEST(SamplerConfigTest, RejectsBadValues) {
  SamplerConfig cfg;
  EXPECT_NO_THROW(CheckSamplerConfig(cfg));
  cfg.yield_floor = 0;
  EXPECT_EQ(CodeOf([&] { CheckSamplerConfig(cfg); }), ErrorCode::kInvalidArgument);
  cfg = {};
  cfg.max_edits = 0;
  EXPECT_EQ(CodeOf([&] { CheckSamplerConfig(cfg); }), ErrorCode::kInvalidArgument);
}

TEST(EditTest, ApplyEditChangesOneThing) {
  const Figure f{{Obj(Shape::kCircle, Color::kRed, 0.1, 0.2, 0.2),
                  Obj(Shape::kSquare, Color::kBlue, 0.1, 0.7, 0.7)}};
  ObjectSpec v = f.objects[1];
  v.color = Color::kYellow;
  Figure g = ApplyEdit(f, {EditKind::kRecolor, 1, v});
  EXPECT_EQ(g.objects[1].color, Color::kYellow);
  EXPECT_TRUE(testing::WithinOneEdit(f, g));
  g = ApplyEdit(f, {EditKind::kRemove, 0, {}});
  ASSERT_EQ(g.objects.size(), 1u);
  EXPECT_EQ(g.objects[0], f.objects[1]);
  g = ApplyEdit(f, {EditKind::kAdd, 2, Obj(Shape::kTriangle, Color::kRed, 0.1, 0.5, 0.2)});
  EXPECT_EQ(g.objects.size(), 3u);
  EXPECT_TRUE(testing::WithinOneEdit(f, g));
  EXPECT_EQ(DescribeEdit({EditKind::kRecolor, 1, v}), "recolor object 1 to yellow");
  for (EditKind k : {EditKind::kRecolor, EditKind::kReshape, EditKind::kResize, EditKind::kMove,
                     EditKind::kAdd, EditKind::kRemove}) {
    EXPECT_EQ(ParseEditKind(EditKindName(k)), k);
  }
}

TEST(NearMissTest, UniversalColorStatement) {
  UniverseConfig u;
  const Pattern p = MakeTextPattern("FORALL o IN objects: o.color = red", u);
  const Figure f{{Obj(Shape::kCircle, Color::kRed, 0.1, 0.2, 0.2),
                  Obj(Shape::kSquare, Color::kRed, 0.1, 0.5, 0.5),
                  Obj(Shape::kTriangle, Color::kRed, 0.1, 0.8, 0.8)}};
  ASSERT_TRUE(p.Member(f));
  Rng rng(14);
  const NearMiss m = FindNearMiss(p, f, rng);
  EXPECT_FALSE(p.Member(m.figure));
  ASSERT_EQ(m.trail.size(), 1u);
  EXPECT_TRUE(testing::WithinOneEdit(f, m.figure));
  EXPECT_TRUE(m.trail[0].kind == EditKind::kRecolor || m.trail[0].kind == EditKind::kAdd);
}

TEST(NearMissTest, CountStatement) {
  const Pattern p = MakeTextPattern("COUNT(objects)=3");
  const Figure f{{Obj(Shape::kCircle, Color::kRed, 0.1, 0.2, 0.2),
                  Obj(Shape::kSquare, Color::kRed, 0.1, 0.5, 0.5),
                  Obj(Shape::kTriangle, Color::kRed, 0.1, 0.8, 0.8)}};
  Rng rng(15);
  const NearMiss m = FindNearMiss(p, f, rng);
  EXPECT_NE(m.figure.objects.size(), 3u);
  EXPECT_TRUE(m.trail[0].kind == EditKind::kRemove || m.trail[0].kind == EditKind::kAdd);
}

TEST(NearMissTest, GroundTruthNearMissesVerifiedByBruteForce) {
  const Pattern p = MakePattern("gt", dsl::ParseStatement(challenges::kGroundTruthText),
                                challenges::DefinitionsUniverse());
  const Generated pos = GeneratePositives(p, 40, 16);
  const NearMissBatch batch = GenerateNearMisses(p, pos.figures, 16);
  EXPECT_EQ(batch.items.size() + batch.report.skipped, batch.report.attempts);
  EXPECT_GT(batch.items.size(), 30u);
  for (const auto& m : batch.items) {
    EXPECT_TRUE(testing::BruteEvaluate(p.statement, pos.figures[m.source_index], p.context));
    EXPECT_FALSE(testing::BruteEvaluate(p.statement, m.figure, p.context));
    EXPECT_TRUE(testing::WithinOneEdit(pos.figures[m.source_index], m.figure));
    EXPECT_TRUE(ValidateFigure(m.figure, p.universe).ok());
    EXPECT_EQ(ApplyEdit(pos.figures[m.source_index], m.trail[0]), m.figure);
  }
}

TEST(NearMissTest, TautologyHasNoNearMiss) {
  UniverseConfig u;
  u.n_min = u.n_max = 2;
  const Pattern p = MakeTextPattern("COUNT(objects) >= 1", u);
  Rng rng(17);
  const Figure f = SampleFigure(u, rng);
  EXPECT_EQ(CodeOf([&] { FindNearMiss(p, f, rng); }), ErrorCode::kNoNearMissFound);
  const NearMissBatch batch = GenerateNearMisses(p, {f, f}, 17);
  EXPECT_TRUE(batch.items.empty());
  EXPECT_EQ(batch.report.skipped, 2u);
}

TEST(NearMissTest, TwoEditSearchStaysWithinBudget) {
  const Pattern p = MakeTextPattern("COUNT(objects WHERE color = red) >= 1");
  const Figure f{{Obj(Shape::kCircle, Color::kRed, 0.1, 0.2, 0.2),
                  Obj(Shape::kSquare, Color::kRed, 0.1, 0.5, 0.5)}};
  SamplerConfig cfg;
  cfg.max_edits = 2;
  Rng rng(18);
  const NearMiss m = FindNearMiss(p, f, rng, cfg);
  EXPECT_FALSE(p.Member(m.figure));
  EXPECT_EQ(m.trail.size(), 2u);
  Figure replay = f;
  for (const auto& e : m.trail) replay = ApplyEdit(replay, e);
  EXPECT_EQ(replay, m.figure);
}

}  // namespace
}  // namespace kandinsky::sampler
