#include <gtest/gtest.h>

#include <sstream>

#include "candy/biocodec.hpp"
#include "candy/metrics.hpp"
#include "generators.hpp"

using namespace candy;
using candy::testing::Gen;
using candy::testing::uniform;

namespace {

constexpr auto C = CandyType::compliment;
constexpr auto G = CandyType::gratitude;

const CommentKey k1{"d", 1};
const CommentKey k2{"d", 2};
const CommentKey k3{"d", 3};
const CommentKey k4{"d", 4};

}  // namespace

TEST(Counts, ZeroDenominatorsGiveZero) {
  const Counts c;
  EXPECT_EQ(c.precision(), Rational(0));
  EXPECT_EQ(c.recall(), Rational(0));
  EXPECT_EQ(c.f1(), Rational(0));
}

TEST(Counts, F1IsHarmonicMean) {
  const Counts c{3, 2, 5};
  const auto p = c.precision().to_double(), r = c.recall().to_double();
  EXPECT_DOUBLE_EQ(c.f1().to_double(), 2 * p * r / (p + r));
}

TEST(StrictSpanF1, PerfectPrediction) {
  const SpanTable gold{{k1, {{0, 4, C}}}, {k2, {{1, 3, G}, {5, 9, C}}}};
  const auto rep = strict_span_f1(gold, gold).report;
  EXPECT_EQ(rep.precision(), Rational(1));
  EXPECT_EQ(rep.recall(), Rational(1));
  EXPECT_EQ(rep.f1(), Rational(1));
}

TEST(StrictSpanF1, OneOfTwoFound) {
  const SpanTable gold{{k1, {{0, 4, C}, {5, 8, G}}}};
  const SpanTable pred{{k1, {{0, 4, C}}}};
  const auto rep = strict_span_f1(gold, pred).report;
  EXPECT_EQ(rep.precision(), Rational(1));
  EXPECT_EQ(rep.recall(), Rational(1, 2));
  EXPECT_EQ(rep.f1(), Rational(2, 3));
  EXPECT_EQ(rep.per_type.at(G).false_negatives, 1);
  EXPECT_EQ(rep.per_type.at(C).true_positives, 1);
}

TEST(StrictSpanF1, OffByOneIsAMiss) {
  const SpanTable gold{{k1, {{0, 4, C}}}};
  const SpanTable pred{{k1, {{0, 5, C}}}};
  const auto rep = strict_span_f1(gold, pred).report;
  EXPECT_EQ(rep.overall, (Counts{0, 1, 1}));
}

TEST(StrictSpanF1, WrongTypeIsAMiss) {
  const SpanTable gold{{k1, {{0, 4, C}}}};
  const SpanTable pred{{k1, {{0, 4, G}}}};
  EXPECT_EQ(strict_span_f1(gold, pred).report.overall, (Counts{0, 1, 1}));
}

TEST(StrictSpanF1, DuplicatePredictionsCollapse) {
  const SpanTable gold{{k1, {{0, 4, C}}}};
  const SpanTable pred{{k1, {{0, 4, C}, {0, 4, C}}}};
  EXPECT_EQ(strict_span_f1(gold, pred).report.overall, (Counts{1, 0, 0}));
}

TEST(StrictSpanF1, UnknownKeysCountAndWarn) {
  const SpanTable gold{{k1, {{0, 4, C}}}};
  const SpanTable pred{{k1, {{0, 4, C}}}, {k2, {{0, 1, G}}}};
  const auto score = strict_span_f1(gold, pred);
  EXPECT_EQ(score.report.overall, (Counts{1, 1, 0}));
  EXPECT_EQ(score.unknown_keys, (std::vector<CommentKey>{k2}));
  const std::set<CommentKey> known{k1, k2};
  EXPECT_TRUE(strict_span_f1(gold, pred, &known).unknown_keys.empty());
}

TEST(StrictSpanF1, SymmetryAndMonotonicity) {
  Gen g(8);
  for (int round = 0; round < 300; ++round) {
    const auto gc = candy::testing::random_corpus(g, uniform(g, 1, 10));
    auto pc = gc;
    for (auto& ac : pc)
      if (candy::testing::coin(g, 0.5) && !ac.spans.empty()) ac.spans.pop_back();
    const auto gold = span_table(gc);
    auto pred = span_table(pc);
    const auto a = strict_span_f1(gold, pred).report;
    const auto b = strict_span_f1(pred, gold).report;
    ASSERT_EQ(a.precision(), b.recall());
    ASSERT_EQ(a.recall(), b.precision());
    ASSERT_EQ(a.f1(), b.f1());

    // Add one gold span that pred is missing, if any.
    for (const auto& [k, spans] : gold) {
      bool added = false;
      for (const auto& s : spans) {
        auto& p = pred[k];
        if (std::find(p.begin(), p.end(), s) == p.end()) {
          p.push_back(s);
          added = true;
          break;
        }
      }
      if (added) break;
    }
    const auto c = strict_span_f1(gold, pred).report;
    ASSERT_GE(c.overall.true_positives, a.overall.true_positives);
    ASSERT_LE(c.overall.false_negatives, a.overall.false_negatives);
  }
}

TEST(StrictSpanF1, ShardMergeEqualsWhole) {
  Gen g(31);
  const auto gold = span_table(candy::testing::random_corpus(g, 20, 3, 0, 4));
  const auto pred = span_table(candy::testing::random_corpus(g, 20, 3, 0, 4));
  EvalReport merged;
  std::set<std::string> docs;
  for (const auto& [k, v] : gold) docs.insert(k.document);
  for (const auto& [k, v] : pred) docs.insert(k.document);
  for (const auto& d : docs) {
    SpanTable gs, ps;
    for (const auto& [k, v] : gold)
      if (k.document == d) gs[k] = v;
    for (const auto& [k, v] : pred)
      if (k.document == d) ps[k] = v;
    merged += strict_span_f1(gs, ps).report;
  }
  const auto whole = strict_span_f1(gold, pred).report;
  EXPECT_EQ(merged.overall, whole.overall);
  for (const auto& [t, c] : whole.per_type) EXPECT_EQ(merged.per_type[t], c);
}

TEST(PositiveF1, PerfectPrediction) {
  const LabelTable gold{{k1, true}, {k2, false}};
  EXPECT_EQ(positive_f1(gold, gold).f1(), Rational(1));
}

TEST(PositiveF1, MixedCase) {
  const LabelTable gold{{k1, true}, {k2, true}, {k3, false}, {k4, false}};
  const LabelTable pred{{k1, true}, {k2, false}, {k3, true}, {k4, false}};
  const auto rep = positive_f1(gold, pred);
  EXPECT_EQ(rep.precision(), Rational(1, 2));
  EXPECT_EQ(rep.recall(), Rational(1, 2));
  EXPECT_EQ(rep.f1(), Rational(1, 2));
}

TEST(PositiveF1, AllNegativePredictionsScoreZero) {
  const LabelTable gold{{k1, true}, {k2, false}};
  const LabelTable pred{{k1, false}, {k2, false}};
  EXPECT_EQ(positive_f1(gold, pred).f1(), Rational(0));
}

TEST(PositiveF1, KeyMismatchIsAnError) {
  const LabelTable gold{{k1, true}, {k2, false}};
  EXPECT_THROW(positive_f1(gold, LabelTable{{k1, true}}), DataError);
  EXPECT_THROW(positive_f1(LabelTable{{k1, true}}, gold), DataError);
}

TEST(DeriveBinary, AnySpanMeansCandy) {
  const SpanTable pred{{k1, {{0, 3, CandyType::ambiguous}}}, {k2, {}}};
  const auto labels = derive_binary(pred, {k1, k2, k3});
  EXPECT_TRUE(labels.at(k1));
  EXPECT_FALSE(labels.at(k2));
  EXPECT_FALSE(labels.at(k3));
}

TEST(DeriveBinary, AllOutsideDecodesToNo) {
  const std::vector<TokenOffset> tokens{{0, 2, false}, {3, 5, false}};
  const std::vector<BioTag> tags{BioTag::outside(), BioTag::outside()};
  const SpanTable pred{{k1, decode_basic(tokens, tags)}};
  EXPECT_FALSE(derive_binary(pred, {k1}).at(k1));
}

TEST(Report, RecordsAndTable) {
  EvalReport rep;
  rep.overall = {1, 0, 1};
  rep.per_type[C] = {1, 0, 1};
  std::ostringstream rec, table;
  write_report_records(rec, rep);
  write_report_table(table, rep);
  EXPECT_EQ(rec.str().substr(0, rec.str().find('\n')),
            R"({"scope":"overall","tp":1,"fp":0,"fn":1,"precision":"1.0000","recall":"0.5000","f1":"0.6667"})");
  EXPECT_NE(table.str().find("0.6667"), std::string::npos);
}
