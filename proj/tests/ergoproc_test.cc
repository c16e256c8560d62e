#include <random>

#include <gtest/gtest.h>

#include "gapdim/error.h"
#include "gapdim/function_class.h"
#include "gapdim/process.h"
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

MarkovChain TwoState() {
  MarkovChain chain;
  chain.transition = {{Q("1/2"), Q("1/2")}, {Q("1"), Q("0")}};
  chain.emissions = {Emission::Point(Q("1/10")), Emission::Point(Q("9/10"))};
  return chain;
}

MarkovChain ThreeState() {
  MarkovChain chain;
  chain.transition = {{Q("1/2"), Q("1/4"), Q("1/4")},
                      {Q("1/3"), Q("1/3"), Q("1/3")},
                      {Q("0"), Q("1/2"), Q("1/2")}};
  chain.emissions = {Emission::Uniform(Q("0"), Q("1/2")), Emission::Point(Q("3/4")),
                     Emission::Uniform(Q("1/4"), Q("1"))};
  return chain;
}

// Gamma_m by evaluating every function at every point.
Rational BruteGamma(const FunctionClass& cls, const std::vector<Rational>& path,
                    const ProcessSpec& spec) {
  Rational best(0);
  for (const auto& f : cls.functions()) {
    Rational sum(0);
    for (const auto& x : path) sum += f.Evaluate(x);
    const Rational d =
        (sum / Rational(static_cast<int64_t>(path.size())) - Expectation(f, spec)).Abs();
    best = Max(best, d);
  }
  return best;
}

TEST(GoldenTheta, Value) {
  EXPECT_EQ(GoldenTheta(), Q("956722026041/1548008755920"));
  EXPECT_GE(GoldenTheta().denominator(), BigInt(1) << 40);
}

TEST(SampleProcess, RotationArithmetic) {
  const auto path = RotationPath(Q("1/10"), Q("3/10"), 3);
  EXPECT_EQ(path, (std::vector<Rational>{Q("2/5"), Q("7/10"), Q("0")}));
}

TEST(SampleProcess, DeterministicAndPrefixConsistent) {
  for (const auto& spec : {ProcessSpec::IidUniform(), ProcessSpec::GoldenRotation(),
                           ProcessSpec::Markov(ThreeState())}) {
    const auto a = SampleProcess(spec, 200, 5);
    const auto b = SampleProcess(spec, 200, 5);
    const auto longer = SampleProcess(spec, 300, 5);
    const auto other = SampleProcess(spec, 200, 6);
    EXPECT_EQ(a.values, b.values);
    EXPECT_TRUE(std::equal(a.values.begin(), a.values.end(), longer.values.begin()));
    EXPECT_NE(a.values, other.values);
    for (const auto& x : longer.values) {
      EXPECT_GE(x, Q("0"));
      EXPECT_LT(x, Q("1"));
    }
  }
  EXPECT_EQ(CodeOf([] { SampleProcess(ProcessSpec::IidUniform(), 0, 1); }),
            ErrorCode::kInvalidArgument);
}

TEST(SampleProcess, RotationStepsByTheta) {
  const auto spec = ProcessSpec::Rotation(Q("1/3"));
  const auto path = SampleProcess(spec, 5, 11);
  for (size_t i = 1; i < path.values.size(); ++i) {
    EXPECT_EQ((path.values[i] - path.values[i - 1] - Q("1/3")).Frac(), Q("0"));
  }
}

TEST(SampleProcess, MarkovEmissions) {
  const auto path = SampleProcess(ProcessSpec::Markov(TwoState()), 500, 3);
  size_t high = 0;
  for (size_t i = 0; i < path.values.size(); ++i) {
    const auto& x = path.values[i];
    ASSERT_TRUE(x == Q("1/10") || x == Q("9/10"));
    // State 2 always returns to state 1.
    if (i > 0 && path.values[i - 1] == Q("9/10")) EXPECT_EQ(x, Q("1/10"));
    high += x == Q("9/10");
  }
  EXPECT_GT(high, 100u);
  EXPECT_LT(high, 230u);
}

TEST(StationaryDistribution, Examples) {
  EXPECT_EQ(StationaryDistribution(TwoState()), (std::vector<Rational>{Q("2/3"), Q("1/3")}));
  const auto chain = ThreeState();
  const auto pi = StationaryDistribution(chain);
  // pi P = pi exactly, and pi sums to one.
  Rational total(0);
  for (size_t j = 0; j < pi.size(); ++j) {
    Rational col(0);
    for (size_t i = 0; i < pi.size(); ++i) col += pi[i] * chain.transition[i][j];
    EXPECT_EQ(col, pi[j]);
    total += pi[j];
  }
  EXPECT_EQ(total, Q("1"));
}

TEST(ProcessSpec, Validation) {
  MarkovChain reducible;
  reducible.transition = {{Q("1"), Q("0")}, {Q("0"), Q("1")}};
  reducible.emissions = {Emission::Point(Q("0")), Emission::Point(Q("1/2"))};
  EXPECT_EQ(CodeOf([&] { ProcessSpec::Markov(reducible); }), ErrorCode::kNotErgodic);

  MarkovChain bad_row = TwoState();
  bad_row.transition[0][0] = Q("1/3");
  EXPECT_EQ(CodeOf([&] { ProcessSpec::Markov(bad_row); }), ErrorCode::kInvalidProcess);

  MarkovChain bad_emission = TwoState();
  bad_emission.emissions[1] = Emission::Point(Q("1"));
  EXPECT_EQ(CodeOf([&] { ProcessSpec::Markov(bad_emission); }), ErrorCode::kInvalidProcess);

  EXPECT_EQ(CodeOf([] { ProcessSpec::Rotation(Q("0")); }), ErrorCode::kInvalidProcess);
  EXPECT_EQ(CodeOf([] { ProcessSpec::Rotation(Q("1")); }), ErrorCode::kInvalidProcess);
}

TEST(Expectation, Examples) {
  const auto quarter = Function::StepFromBreaks(std::vector<Rational>{Q("0"), Q("1/4"), Q("1")},
                                                std::vector<Rational>{Q("1"), Q("0")});
  EXPECT_EQ(Expectation(quarter, ProcessSpec::IidUniform()), Q("1/4"));
  EXPECT_EQ(Expectation(quarter, ProcessSpec::GoldenRotation()), Q("1/4"));
  for (const auto& spec : {ProcessSpec::IidUniform(), ProcessSpec::Markov(ThreeState())}) {
    EXPECT_EQ(Expectation(Function::Constant(Q("2/7")), spec), Q("2/7"));
  }
  EXPECT_EQ(Expectation(Ramp(10)[0], ProcessSpec::Markov(TwoState())), Q("11/30"));
  // pi = (1/4, 3/8, 3/8) for the three-state chain; the [0,1/4) indicator
  // averages 1/2 over the first emission and 0 over the others.
  EXPECT_EQ(StationaryDistribution(ThreeState()),
            (std::vector<Rational>{Q("1/4"), Q("3/8"), Q("3/8")}));
  EXPECT_EQ(Expectation(quarter, ProcessSpec::Markov(ThreeState())), Q("1/8"));
  EXPECT_EQ(CodeOf([] { Expectation(AllPatterns(1)[0], ProcessSpec::IidUniform()); }),
            ErrorCode::kNoMarginalExpectation);
}

TEST(Discrepancy, Examples) {
  const FunctionClass stair("stair", {Ramp(10)[0]});
  const std::vector<Rational> path{Q("1/5"), Q("2/5"), Q("3/5")};
  const std::vector<Rational> half{Q("1/2")};
  EXPECT_EQ(ComputeDiscrepancy(stair, path, half).gamma_m, Q("1/10"));

  const FunctionClass left("left", {Function::StepFromBreaks(
                                        std::vector<Rational>{Q("0"), Q("1/2"), Q("1")},
                                        std::vector<Rational>{Q("1"), Q("0")})});
  const std::vector<Rational> inside{Q("0"), Q("1/8"), Q("1/3")};
  EXPECT_EQ(ComputeDiscrepancy(left, inside, ProcessSpec::IidUniform()).gamma_m, Q("1/2"));

  const auto cls = Thresholds(8);
  const auto sample = SampleProcess(ProcessSpec::IidUniform(), 100, 9);
  const auto d = ComputeDiscrepancy(cls, sample.values, ProcessSpec::IidUniform());
  EXPECT_EQ(d.gamma_m, BruteGamma(cls, sample.values, ProcessSpec::IidUniform()));
  EXPECT_EQ(d.pointwise[d.argmax], d.gamma_m);
  for (size_t i = 0; i < d.argmax; ++i) EXPECT_LT(d.pointwise[i], d.gamma_m);
}

TEST(Discrepancy, TabularNeedsSuppliedExpectations) {
  const auto cls = AllPatterns(2);
  const std::vector<Rational> path{Q("0"), Q("1/2"), Q("1/2")};
  const std::vector<Rational> zero(4, Q("0"));
  EXPECT_EQ(ComputeDiscrepancy(cls, path, zero).gamma_m, Q("1"));
  EXPECT_EQ(CodeOf([&] { ComputeDiscrepancy(cls, path, ProcessSpec::IidUniform()); }),
            ErrorCode::kNoMarginalExpectation);
}

class DiscrepancyProperty : public ::testing::TestWithParam<uint64_t> {};

TEST_P(DiscrepancyProperty, BoundsMonotonicityAndSingleton) {
  std::mt19937_64 rng(GetParam());
  const std::vector<ProcessSpec> specs = {ProcessSpec::IidUniform(),
                                          ProcessSpec::GoldenRotation(),
                                          ProcessSpec::Markov(ThreeState())};
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Function> fs;
    for (int f = 0; f < 5; ++f) fs.push_back(testing::RandomStepFunction(rng, 12, 6, 6));
    const FunctionClass big("big", fs);
    const FunctionClass small("small", {fs[1], fs[3]});
    const FunctionClass single("single", {fs[2]});
    for (const auto& spec : specs) {
      const auto path = SampleProcess(spec, 150, rng()).values;
      const auto whole = ComputeDiscrepancy(big, path, spec);
      EXPECT_GE(whole.gamma_m, Q("0"));
      EXPECT_LE(whole.gamma_m, Q("1"));
      EXPECT_EQ(whole.gamma_m, BruteGamma(big, path, spec));
      EXPECT_LE(ComputeDiscrepancy(small, path, spec).gamma_m, whole.gamma_m);
      EXPECT_EQ(ComputeDiscrepancy(single, path, spec).gamma_m, whole.pointwise[2]);

      const std::vector<size_t> lengths{1, 10, 77, 150};
      const auto expectations = whole.expectations;
      const auto prefixes = PrefixDiscrepancies(big, path, expectations, lengths);
      for (size_t i = 0; i < lengths.size(); ++i) {
        const std::vector<Rational> head(path.begin(), path.begin() + static_cast<long>(lengths[i]));
        EXPECT_EQ(prefixes[i], ComputeDiscrepancy(big, head, spec).gamma_m);
      }

      for (size_t split : {size_t{1}, size_t{40}, size_t{149}}) {
        const auto s = CheckSubadditivity(big, path, spec, split);
        EXPECT_TRUE(s.holds);
        EXPECT_LE(s.lhs, s.rhs);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DiscrepancyProperty, ::testing::Values(21, 22, 23));

TEST(Subadditivity, Examples) {
  const auto cls = Thresholds(4);
  const auto spec = ProcessSpec::IidUniform();
  auto path = SampleProcess(spec, 20, 4).values;
  auto doubled = path;
  doubled.insert(doubled.end(), path.begin(), path.end());
  const auto s = CheckSubadditivity(cls, doubled, spec, 20);
  EXPECT_TRUE(s.holds);
  // Identical halves have identical means, so both sides agree.
  EXPECT_EQ(s.lhs, s.rhs);
  EXPECT_EQ(CodeOf([&] { CheckSubadditivity(cls, path, spec, 0); }), ErrorCode::kInvalidSplit);
  EXPECT_EQ(CodeOf([&] { CheckSubadditivity(cls, path, spec, 20); }), ErrorCode::kInvalidSplit);
}

TEST(EstimateGamma, ConstantsAndDeterminism) {
  const FunctionClass constants("c", {Function::Constant(Q("1/3")), Function::Constant(Q("1"))});
  const std::vector<size_t> grid{1000, 10, 100};
  for (const auto& spec : {ProcessSpec::IidUniform(), ProcessSpec::Markov(ThreeState())}) {
    const auto est = EstimateGamma(constants, spec, grid, 3, 1);
    ASSERT_EQ(est.rows.size(), 3u);
    EXPECT_EQ(est.rows[0].m, 10u);
    EXPECT_EQ(est.rows[2].m, 1000u);
    for (const auto& row : est.rows) {
      for (const auto& g : row.replicates) EXPECT_EQ(g, Q("0"));
    }
    EXPECT_EQ(est.estimate, Q("0"));
  }
  const auto a = EstimateGamma(Thresholds(8), ProcessSpec::IidUniform(), grid, 3, 7);
  const auto b = EstimateGamma(Thresholds(8), ProcessSpec::IidUniform(), grid, 3, 7);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].replicates, b.rows[i].replicates);
    EXPECT_LE(a.rows[i].min, a.rows[i].mean);
    EXPECT_LE(a.rows[i].mean, a.rows[i].max);
  }
  // Replicate r is the path drawn with seed + r.
  const auto path = SampleProcess(ProcessSpec::IidUniform(), 1000, 9).values;
  EXPECT_EQ(a.rows[2].replicates[2],
            ComputeDiscrepancy(Thresholds(8), path, ProcessSpec::IidUniform()).gamma_m);
  EXPECT_EQ(a.estimate, a.rows[2].mean);
  EXPECT_EQ(CodeOf([&] { EstimateGamma(Thresholds(8), ProcessSpec::IidUniform(), grid, 0, 7); }),
            ErrorCode::kInvalidArgument);
}

TEST(RotationCounterexample, WindowHundred) {
  const auto r = RotationCounterexample(100, GoldenTheta(), 7);
  EXPECT_EQ(r.trajectory_gamma, Q("1"));
  EXPECT_EQ(r.fixed_gamma, Q("0"));
  EXPECT_TRUE(r.orbits_disjoint);
  EXPECT_EQ(r.combined_dimension, 1u);
  EXPECT_EQ(r.base_points.size(), 5u);
}

TEST(BoundCheck, Examples) {
  const auto pass = RunBoundCheck(Thresholds(8), ProcessSpec::IidUniform(), Q("1/10"), 10000, 2, 3);
  EXPECT_TRUE(pass.pass);
  EXPECT_TRUE(pass.dimension_finite);
  EXPECT_EQ(pass.dimension, 1u);
  EXPECT_EQ(pass.bound, Q("1"));
  EXPECT_LT(pass.estimate, Q("1/10"));

  const FunctionClass constants("c", {Function::Constant(Q("1/2"))});
  const auto zero = RunBoundCheck(constants, ProcessSpec::GoldenRotation(), Q("1/10"), 100, 1, 3);
  EXPECT_EQ(zero.estimate, Q("0"));
  EXPECT_TRUE(zero.pass);

  const auto rot = RunBoundCheck(Thresholds(8), ProcessSpec::GoldenRotation(), Q("1/10"), 10000, 2, 3);
  EXPECT_TRUE(rot.pass);
}

}  // namespace
}  // namespace gapdim
