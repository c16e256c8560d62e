#include <random>
#include <variant>

#include <gtest/gtest.h>

#include "gapdim/error.h"
#include "gapdim/function_class.h"
#include "gapdim/shatter.h"
#include "test_util.h"

namespace gapdim {
namespace {

using testing::Q;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

Function RampFunction() { return Ramp(8)[0]; }

TEST(KOfGamma, Branches) {
  EXPECT_EQ(KOfGamma(Q("1/4")), 4);
  EXPECT_EQ(KOfGamma(Q("3/10")), 4);
  EXPECT_EQ(KOfGamma(Q("1")), 1);
  EXPECT_EQ(KOfGamma(Q("2/5")), 3);
  EXPECT_EQ(CodeOf([] { KOfGamma(Q("0")); }), ErrorCode::kInvalidResolution);
  EXPECT_EQ(CodeOf([] { KOfGamma(Q("3/2")); }), ErrorCode::kInvalidResolution);
}

TEST(BandOf, TopBandIsClosed) {
  EXPECT_EQ(BandOf(Q("0"), Q("1/4")), 1);
  EXPECT_EQ(BandOf(Q("1/4"), Q("1/4")), 2);
  EXPECT_EQ(BandOf(Q("3/4"), Q("1/4")), 4);
  EXPECT_EQ(BandOf(Q("1"), Q("1/4")), 4);
  // gamma = 3/10: bands [0,3/10) [3/10,3/5) [3/5,9/10) [9/10,1].
  EXPECT_EQ(BandOf(Q("9/10"), Q("3/10")), 4);
  EXPECT_EQ(BandOf(Q("1"), Q("3/10")), 4);
}

TEST(Segment, Examples) {
  const Function ramp = RampFunction();
  EXPECT_EQ(StepSegment(ramp, Q("1/4"), 2), IntervalUnion::Parse("[1/4,1/2)"));
  EXPECT_EQ(StepSegment(Function::Constant(Q("0")), Q("1/4"), 1), IntervalUnion::Full());
  EXPECT_EQ(StepSegment(Function::Constant(Q("1")), Q("1/4"), 4), IntervalUnion::Full());
  EXPECT_EQ(CodeOf([&] { SegmentOf(ramp, Q("1/4"), 5); }),
            ErrorCode::kSegmentIndexOutOfRange);
  EXPECT_EQ(CodeOf([&] { SegmentOf(ramp, Q("1/4"), 0); }),
            ErrorCode::kSegmentIndexOutOfRange);
}

TEST(Segment, Tabular) {
  const auto cls = AllPatterns(2);
  const auto seg = SegmentOf(cls[2], Q("1/4"), 4);
  ASSERT_TRUE(std::holds_alternative<TabularSubset>(seg));
  EXPECT_EQ(std::get<TabularSubset>(seg).points, std::vector<Rational>{Q("1/2")});
}

TEST(SegmentPartition, Examples) {
  const auto whole = StepSegmentPartition(RampFunction(), Q("1"));
  ASSERT_EQ(whole.size(), 1u);
  EXPECT_EQ(whole[0], IntervalUnion::Full());

  const auto half = StepSegmentPartition(Function::Constant(Q("1/2")), Q("1/4"));
  ASSERT_EQ(half.size(), 4u);
  EXPECT_TRUE(half[0].empty());
  EXPECT_TRUE(half[1].empty());
  EXPECT_EQ(half[2], IntervalUnion::Full());
  EXPECT_TRUE(half[3].empty());

  const auto quarters = StepSegmentPartition(RampFunction(), Q("1/4"));
  ASSERT_EQ(quarters.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(quarters[static_cast<size_t>(k)],
              IntervalUnion::Of(Q(k, 4), Q(k + 1, 4)));
  }
}

TEST(NonAdjacent, Examples) {
  EXPECT_TRUE(NonAdjacent(1, 3));
  EXPECT_TRUE(NonAdjacent(4, 1));
  EXPECT_FALSE(NonAdjacent(2, 3));
  EXPECT_FALSE(NonAdjacent(2, 2));
}

TEST(RegularSets, Examples) {
  const FunctionClass half("half", {Function::Constant(Q("1/2"))});
  const std::vector<std::pair<Rational, Rational>> pairs = {
      {Q("0"), Q("1/2")}, {Q("1/2"), Q("3/2")}};
  const auto sets = RegularSets(half, pairs);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_TRUE(sets[0].empty());
  EXPECT_EQ(sets[1], IntervalUnion::Full());

  const std::vector<std::pair<Rational, Rational>> mid = {{Q("1/4"), Q("3/4")}};
  EXPECT_EQ(RegularSets(Ramp(8), mid)[0], IntervalUnion::Parse("[1/4,3/4)"));

  EXPECT_EQ(CodeOf([&] { RegularSets(AllPatterns(2), mid); }),
            ErrorCode::kRegularityUndefined);
  const std::vector<std::pair<Rational, Rational>> bad = {{Q("1/2"), Q("1/4")}};
  EXPECT_EQ(CodeOf([&] { RegularSets(Ramp(8), bad); }), ErrorCode::kInvalidLevelPair);
}

TEST(RegularSets, ValueOneNeedsBAboveOne) {
  const FunctionClass one("one", {Function::Constant(Q("1"))});
  const std::vector<std::pair<Rational, Rational>> pairs = {{Q("1/2"), Q("1")},
                                                            {Q("1/2"), Q("5/4")}};
  const auto sets = RegularSets(one, pairs);
  EXPECT_TRUE(sets[0].empty());
  EXPECT_EQ(sets[1], IntervalUnion::Full());
}

TEST(Quantize, Examples) {
  const Function ramp = RampFunction();
  const Function once = Quantize(ramp, Q("1/4"), Q("1/8"));
  EXPECT_TRUE(Quantize(once, Q("1/4"), Q("1/8")) == once);
  EXPECT_TRUE(Quantize(Ramp(4)[0], Q("1/4"), Q("1/8")) == Ramp(4)[0]);

  const auto grid = QuantizationGrid(Q("1/4"), Q("1/8"));
  const Function h = Quantize(Function::Constant(Q("37/100")), Q("1/4"), Q("1/8"));
  const Rational v = h.Evaluate(Q("0"));
  // The grid cell holding 37/100 starts at v.
  const auto it = std::upper_bound(grid.begin(), grid.end(), Q("37/100"));
  EXPECT_EQ(*(it - 1), v);
  EXPECT_LE(v, Q("37/100"));
  EXPECT_LT(Q("37/100") - v, Q("1/8"));

  const Function top = Quantize(Function::Constant(Q("1")), Q("1/4"), Q("1/8"));
  EXPECT_EQ(top.Evaluate(Q("1/2")), grid[grid.size() - 2]);

  EXPECT_EQ(CodeOf([&] { Quantize(ramp, Q("1/4"), Q("0")); }), ErrorCode::kInvalidMesh);
}

TEST(Quantize, GridContainsBandEdgesAndSmallGaps) {
  for (const char* g : {"1/5", "1/4", "1/3", "3/10"}) {
    for (const char* mesh : {"1/8", "1/10", "1/3"}) {
      const auto grid = QuantizationGrid(Q(g), Q(mesh));
      EXPECT_EQ(grid.front(), Q("0"));
      EXPECT_EQ(grid.back(), Q("1"));
      for (int k = 1; k < KOfGamma(Q(g)); ++k) {
        EXPECT_TRUE(std::binary_search(grid.begin(), grid.end(), Q(g) * Rational(k)));
      }
      for (size_t i = 0; i + 1 < grid.size(); ++i) {
        EXPECT_LT(grid[i], grid[i + 1]);
        EXPECT_LT(grid[i + 1] - grid[i], Q(mesh));
      }
    }
  }
}

TEST(Quantize, ErrorBoundAndBandAgreement) {
  std::mt19937_64 rng(17);
  const Rational gamma = Q("1/4");
  const Rational mesh = Q("1/16");
  const auto grid = QuantizationGrid(gamma, mesh);
  for (int trial = 0; trial < 30; ++trial) {
    const Function f = testing::RandomStepFunction(rng, 12, 60, 6);
    const Function h = Quantize(f, gamma, mesh);
    for (int p = 0; p < 200; ++p) {
      const Rational x = testing::RandomLattice(rng, 997);
      const Rational fv = f.Evaluate(x);
      const Rational hv = h.Evaluate(x);
      EXPECT_LT((fv - hv).Abs(), mesh);
      EXPECT_TRUE(std::binary_search(grid.begin(), grid.end(), hv));
      // Band edges are grid points, so quantizing never crosses a band.
      EXPECT_EQ(BandOf(fv, gamma), BandOf(hv, gamma));
    }
  }
}

TEST(Generate, Thresholds) {
  const auto cls = Generate("thresholds(4)");
  ASSERT_EQ(cls.size(), 4u);
  EXPECT_EQ(cls.kind(), FunctionKind::kStep);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(StepSegment(cls[static_cast<size_t>(j)], Q("1"), 1), IntervalUnion::Full());
    EXPECT_EQ(cls[static_cast<size_t>(j)].Evaluate(Q(j, 4)), Q("1"));
    if (j > 0) EXPECT_EQ(cls[static_cast<size_t>(j)].Evaluate(Q(2 * j - 1, 8)), Q("0"));
  }
}

TEST(Generate, AllPatterns) {
  const auto cls = Generate("all_patterns(2)");
  ASSERT_EQ(cls.size(), 4u);
  EXPECT_EQ(cls.kind(), FunctionKind::kTabular);
  std::set<std::pair<std::string, std::string>> patterns;
  for (const auto& f : cls.functions()) {
    patterns.insert({f.values()[0].ToString(), f.values()[1].ToString()});
  }
  EXPECT_EQ(patterns.size(), 4u);
}

TEST(Generate, FullJoinFamily) {
  const auto cls = Generate("full_join_family(2, 1, 3, 1/5)");
  ASSERT_EQ(cls.size(), 4u);
  EXPECT_EQ(cls.kind(), FunctionKind::kStep);
  std::vector<std::vector<IntervalUnion>> families;
  for (const auto& f : cls.functions()) {
    families.push_back({StepSegment(f, Q("1/5"), 1), StepSegment(f, Q("1/5"), 3)});
  }
  const auto cells = Join(families);
  EXPECT_EQ(cells.size(), 16u);
  for (const auto& c : cells) EXPECT_EQ(c.cell.Measure(), Q("1/16"));
}

TEST(Generate, IntervalIndicatorsAndRandomStep) {
  EXPECT_EQ(Generate("interval_indicators(4)").size(), 10u);
  const auto a = Generate("random_step(7, 5, 3, 8)");
  const auto b = Generate("random_step(7,5,3,8)");
  ASSERT_EQ(a.size(), 5u);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  const auto c = Generate("random_step(8, 5, 3, 8)");
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= !(a[i] == c[i]);
  EXPECT_TRUE(differs);
}

TEST(Generate, TrajectoryIndicators) {
  const auto cls = Generate("trajectory_indicators(3/10, 1, 1/10, 1/7)");
  ASSERT_EQ(cls.size(), 2u);
  EXPECT_EQ(cls.kind(), FunctionKind::kTabular);
  // Orbit window of 1/10: {4/5, 1/10, 2/5}; of 1/7: three more points.
  EXPECT_EQ(cls.domain().size(), 6u);
  EXPECT_EQ(cls[0].Evaluate(Q("2/5")), Q("1"));
  EXPECT_EQ(cls[1].Evaluate(Q("2/5")), Q("0"));
}

TEST(Generate, Errors) {
  for (const char* bad : {"thresholds", "thresholds(0)", "nope(3)", "thresholds(a)",
                          "full_join_family(2,1,2,1/5)", "random_step(1,2)",
                          "all_patterns(3", "full_join_family(9,1,3,1/5)"}) {
    EXPECT_EQ(CodeOf([&] { Generate(bad); }), ErrorCode::kInvalidGeneratorSpec) << bad;
  }
}

TEST(Function, Validation) {
  EXPECT_EQ(CodeOf([] { Function::Constant(Q("3/2")); }), ErrorCode::kInvalidFunction);
  EXPECT_EQ(CodeOf([] {
              Function::Step({{IntervalUnion::Parse("[0,1/2)"), Q("0")},
                              {IntervalUnion::Parse("[1/4,1)"), Q("1")}});
            }),
            ErrorCode::kInvalidFunction);
  EXPECT_EQ(CodeOf([] { Function::Step({{IntervalUnion::Parse("[0,1/2)"), Q("0")}}); }),
            ErrorCode::kInvalidFunction);
  EXPECT_EQ(CodeOf([] { Function::Tabular({Q("1/2"), Q("1/4")}, {Q("0"), Q("0")}); }),
            ErrorCode::kInvalidFunction);
  EXPECT_EQ(CodeOf([] { FunctionClass("empty", {}); }), ErrorCode::kInvalidClass);
  EXPECT_EQ(CodeOf([] {
              FunctionClass("mixed", {Function::Constant(Q("0")),
                                      Function::Tabular({Q("0")}, {Q("0")})});
            }),
            ErrorCode::kInvalidClass);
}

class SegmentProperty : public ::testing::TestWithParam<uint64_t> {};

TEST_P(SegmentProperty, PartitionAndProbes) {
  std::mt19937_64 rng(GetParam());
  for (const char* g : {"1/5", "1/4", "1/3", "3/10"}) {
    const Rational gamma = Q(g);
    for (int trial = 0; trial < 10; ++trial) {
      const Function f = testing::RandomStepFunction(rng, 20, 30, 8);
      const auto parts = StepSegmentPartition(f, gamma);
      ASSERT_EQ(static_cast<int>(parts.size()), KOfGamma(gamma));
      Rational total(0);
      IntervalUnion all;
      for (size_t i = 0; i < parts.size(); ++i) {
        total += parts[i].Measure();
        for (size_t j = i + 1; j < parts.size(); ++j) {
          EXPECT_TRUE(parts[i].Intersect(parts[j]).empty());
        }
        all = all.Union(parts[i]);
      }
      EXPECT_EQ(total, Q("1"));
      EXPECT_EQ(all, IntervalUnion::Full());
      for (int p = 0; p < 100; ++p) {
        const Rational x = testing::RandomLattice(rng, 1009);
        const int k = BandOf(f.Evaluate(x), gamma);
        EXPECT_TRUE(parts[static_cast<size_t>(k - 1)].Contains(x));
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SegmentProperty, ::testing::Values(11, 12, 13));

}  // namespace
}  // namespace gapdim
