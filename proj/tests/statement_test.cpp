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

#include <string>
#include <variant>

#include "gtest/gtest.h"
#include "kandinsky/describe.hpp"
#include "kandinsky/statement.hpp"
#include "kandinsky/statement_file.hpp"
#include "support/random_statements.hpp"

namespace kandinsky::dsl {
namespace {

constexpr const char* kCountsText =
    "COUNT(objects WHERE color=red AND shape=triangle) = 4 AND "
    "COUNT(objects WHERE color=yellow) > COUNT(objects WHERE shape=circle)";

ParseError ExpectParseError(const std::string& text) {
  try {
    ParseStatement(text);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseFailure);
    return e;
  }
  ADD_FAILURE() << "parsed: " << text;
  return ParseError(ParseError::Kind::kSyntax, 0, 0, "");
}

TEST(ParseTest, TwoCountComparisonsUnderAnd) {
  const Statement s = ParseStatement(kCountsText);
  const auto* j = std::get_if<Junction>(&s.root->payload);
  ASSERT_NE(j, nullptr);
  EXPECT_TRUE(j->is_and);
  ASSERT_EQ(j->children.size(), 2u);
  const auto* first = std::get_if<CountCompare>(&j->children[0]->payload);
  const auto* second = std::get_if<CountCompare>(&j->children[1]->payload);
  ASSERT_NE(first, nullptr);
  ASSERT_NE(second, nullptr);
  EXPECT_EQ(first->op, CmpOp::kEq);
  EXPECT_EQ(std::get<std::int64_t>(first->rhs), 4);
  EXPECT_EQ(second->op, CmpOp::kGt);
  EXPECT_TRUE(std::holds_alternative<Selector>(second->rhs));
  EXPECT_EQ(s.source, kCountsText);
}

TEST(ParseTest, NegatedExistential) {
  const Statement s = ParseStatement("NOT (EXISTS o IN objects: o.color = red)");
  const auto* n = std::get_if<Negation>(&s.root->payload);
  ASSERT_NE(n, nullptr);
  const auto* q = std::get_if<Quantified>(&n->child->payload);
  ASSERT_NE(q, nullptr);
  EXPECT_EQ(q->quantifier, Quantifier::kExists);
  EXPECT_EQ(q->vars, std::vector<std::string>{"o"});
}

TEST(ParseTest, UnknownColorIsAVocabularyError) {
  const ParseError e = ExpectParseError("COUNT(objects WHERE color=green) = 1");
  EXPECT_EQ(e.kind(), ParseError::Kind::kVocabulary);
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 27u);
}

TEST(ParseTest, ErrorsCarryKindAndPosition) {
  ParseError e = ExpectParseError("COUNT(objects) =");
  EXPECT_EQ(e.kind(), ParseError::Kind::kSyntax);
  EXPECT_EQ(e.column(), 17u);
  e = ExpectParseError("COUNT(objects) = red");
  EXPECT_EQ(e.kind(), ParseError::Kind::kType);
  EXPECT_EQ(e.column(), 18u);
  e = ExpectParseError("EXISTS a IN objects :\n  b.color = red");
  EXPECT_EQ(e.kind(), ParseError::Kind::kUndeclaredVariable);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 3u);
  EXPECT_EQ(ExpectParseError("   ").kind(), ParseError::Kind::kSyntax);
  EXPECT_EQ(ExpectParseError("EXISTS a,a IN objects : a.color = red").kind(),
            ParseError::Kind::kSyntax);
  EXPECT_EQ(ExpectParseError("COUNT(objects WHERE LEFT_OF(a,b)) = 1").kind(),
            ParseError::Kind::kSyntax);
  EXPECT_EQ(ExpectParseError("EXISTS a IN objects : a.size > 3").kind(), ParseError::Kind::kType);
  EXPECT_EQ(ExpectParseError("(COUNT(objects) = 1").kind(), ParseError::Kind::kSyntax);
}

TEST(ParseTest, KeywordsAreCaseInsensitiveAndWhitespaceIsFree) {
  const Statement a = ParseStatement("count(OBJECTS where Color = RED)\n>=\t2 or exists x in objects : x.shape=circle");
  const Statement b = ParseStatement("COUNT(objects WHERE color = red) >= 2 OR EXISTS x IN objects : x.shape = circle");
  EXPECT_EQ(ToSource(a), ToSource(b));
}

TEST(ParseTest, GestaltAndSideAtoms) {
  const Statement s = ParseStatement(
      "CIRCULAR(objects WHERE color = yellow) AND SYMMETRIC(objects) AND "
      "CLUSTERED(objects, 3) AND FLOWER(objects) AND "
      "COUNT(objects WHERE side = left AND size = small) = 2");
  const auto& j = std::get<Junction>(s.root->payload);
  ASSERT_EQ(j.children.size(), 5u);
  EXPECT_EQ(std::get<GestaltAtom>(j.children[2]->payload).k, 3);
  EXPECT_EQ(std::get<GestaltAtom>(j.children[3]->payload).kind, GestaltKind::kFlower);
}

TEST(ToSourceTest, ReparsesToTheSameText) {
  Rng rng(21);
  testing::StatementGenerator gen(rng);
  for (int i = 0; i < 500; ++i) {
    const std::string text = gen.Statement(3);
    const Statement s = ParseStatement(text);
    const std::string once = ToSource(s);
    EXPECT_EQ(ToSource(ParseStatement(once)), once) << text;
    const std::string canon = ToSource(s, {true, 0});
    EXPECT_EQ(ToSource(ParseStatement(canon), {true, 0}), canon) << text;
  }
}

TEST(ToSourceTest, CanonicalFormIgnoresOperandOrderAndVariableNames) {
  auto canon = [](const char* text) { return ToSource(ParseStatement(text), {true, 0}); };
  EXPECT_EQ(canon("COUNT(objects) = 1 AND CLUSTERED(objects, 2)"),
            canon("CLUSTERED(objects, 2) AND COUNT(objects) = 1"));
  EXPECT_EQ(canon("EXISTS a,b IN objects : SAME_COLOR(a,b)"),
            canon("EXISTS p,q IN objects : SAME_COLOR(q,p)"));
  EXPECT_NE(canon("EXISTS a,b IN objects : LEFT_OF(a,b)"),
            canon("EXISTS a,b IN objects : LEFT_OF(b,a)"));
}

TEST(DescribeTest, FixedTemplates) {
  EXPECT_EQ(RenderStatementText(ParseStatement("COUNT(objects WHERE color=red AND shape=triangle) = 4")),
            "the figure contains exactly 4 red triangles");
  EXPECT_EQ(RenderStatementText(ParseStatement("NOT (EXISTS o IN objects: o.color = red)")),
            "there is no red object");
  const std::string a = RenderStatementText(ParseStatement("COUNT(objects) = 2"));
  const std::string b = RenderStatementText(ParseStatement("CLUSTERED(objects, 2)"));
  EXPECT_EQ(RenderStatementText(ParseStatement("COUNT(objects) = 2 AND CLUSTERED(objects, 2)")),
            a + " and " + b);
}

TEST(DescribeTest, StableAcrossCalls) {
  Rng rng(4);
  testing::StatementGenerator gen(rng);
  for (int i = 0; i < 200; ++i) {
    const Statement s = ParseStatement(gen.Statement(3));
    const std::string text = RenderStatementText(s);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text.find('?'), std::string::npos) << s.source;
    EXPECT_EQ(RenderStatementText(ParseStatement(s.source)), text);
  }
}

TEST(FreeVariablesTest, ParseExamplesAreClean) {
  for (const char* text : {kCountsText, "NOT (EXISTS o IN objects: o.color = red)"}) {
    const VariableReport r = FreeVariables(ParseStatement(text));
    EXPECT_TRUE(r.declared_unused.empty());
    EXPECT_TRUE(r.used_undeclared.empty());
  }
}

TEST(FreeVariablesTest, ReportsUnusedAndUndeclared) {
  VariableReport r = FreeVariables(ParseStatement("EXISTS a,b IN objects : a.color = red"));
  EXPECT_EQ(r.declared_unused, (std::set<std::string>{"b"}));
  EXPECT_TRUE(r.used_undeclared.empty());
  r = FreeVariables(ParseStatement("EXISTS a IN objects : a.color = red AND LEFT_OF(a, z)",
                                   ParseOptions{true}));
  EXPECT_EQ(r.used_undeclared, (std::set<std::string>{"z"}));
}

TEST(ResolveTest, UnknownIdThrows) {
  StatementLibrary lib{{"a", ParseStatement("COUNT(objects) = 1")}};
  EXPECT_EQ(Resolve(lib, "a").source, "COUNT(objects) = 1");
  try {
    Resolve(lib, "b");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownStatementId);
  }
}

TEST(StatementFileTest, SingleMultiLineStatement) {
  const auto all = ParseStatementFile("# ground truth\nCOUNT(objects) = 2\n  AND CLUSTERED(objects, 1)\n", "gt");
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].id, "gt");
  EXPECT_EQ(ToSource(all[0].statement), "COUNT(objects) = 2 AND CLUSTERED(objects, 1)");
}

TEST(StatementFileTest, NamedList) {
  const auto all = ParseStatementFile(
      "# list\n\nred: EXISTS o IN objects : o.color = red\ntwo: COUNT(objects) = 2\n", "x");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].id, "red");
  EXPECT_EQ(all[1].id, "two");
}

TEST(StatementFileTest, ListErrorsPointIntoTheFile) {
  try {
    ParseStatementFile("a: COUNT(objects) = 1\nb: COUNT(objects WHERE color = green) = 1\n", "x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 32u);
    EXPECT_EQ(e.kind(), ParseError::Kind::kVocabulary);
  }
  EXPECT_THROW(ParseStatementFile("a: COUNT(objects) = 1\na: COUNT(objects) = 2\n", "x"), ParseError);
  EXPECT_THROW(ParseStatementFile("a: COUNT(objects) = 1\nCOUNT(objects) = 2\n", "x"), ParseError);
  try {
    ParseStatementFile("# nothing\n\n", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingStatement);
  }
}

TEST(StatementFileTest, MissingFileIsAnIoFailure) {
  try {
    LoadStatementFile("/nonexistent/kandinsky.kps");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoFailure);
  }
}

}  // namespace
}  // namespace kandinsky::dsl
