#ifndef GAPDIM_PROCESS_H_
#define GAPDIM_PROCESS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gapdim/function_class.h"
#include "gapdim/rational.h"

namespace gapdim {

// What a Markov state emits: a fixed point, or a uniform draw on [a, b).
struct Emission {
  enum class Kind { kPoint, kUniform };
  Kind kind = Kind::kPoint;
  Rational a;
  Rational b;

  static Emission Point(const Rational& x) { return {Kind::kPoint, x, x}; }
  static Emission Uniform(const Rational& lo, const Rational& hi) {
    return {Kind::kUniform, lo, hi};
  }
};

struct MarkovChain {
  std::vector<std::vector<Rational>> transition;  // row-stochastic
  std::vector<Emission> emissions;
};

struct ProcessSpec {
  enum class Variant { kIidUniform, kRotation, kMarkov };
  Variant variant = Variant::kIidUniform;
  Rational theta;     // rotation angle in (0, 1)
  MarkovChain chain;

  static ProcessSpec IidUniform();
  // Rotation by theta; validates 0 < theta < 1.
  static ProcessSpec Rotation(const Rational& theta);
  // Rotation by the default golden-ratio convergent.
  static ProcessSpec GoldenRotation();
  // Validates the chain (square, exact row sums, emissions in [0,1),
  // irreducible).
  static ProcessSpec Markov(MarkovChain chain);

  std::string Describe() const;
};

// F_59 / F_60: the first continued-fraction convergent of (sqrt(5) - 1) / 2
// with denominator at least 2^40.
Rational GoldenTheta();

// Exact stationary distribution of an irreducible chain. Throws kNotErgodic
// for reducible chains and kInvalidProcess for malformed ones.
std::vector<Rational> StationaryDistribution(const MarkovChain& chain);

struct SamplePath {
  std::vector<Rational> values;
  uint64_t seed = 0;
  ProcessSpec spec;
};

// Deterministic in (spec, m, seed), using CounterRng(seed):
//   IID       x_i = unit draw i
//   ROTATION  x_0 = unit draw 0, x_i = frac(x_0 + i theta) for i = 1..m
//   MARKOV    state_1 ~ stationary law, state_{i+1} ~ row of state_i; one unit
//             draw per state choice, followed by one more for a uniform
//             emission
// Prefixes are consistent: the path for m is a prefix of the path for m' > m.
SamplePath SampleProcess(const ProcessSpec& spec, size_t m, uint64_t seed);

// frac(x0 + i theta) for i = 1..m.
std::vector<Rational> RotationPath(const Rational& x0, const Rational& theta,
                                   size_t m);

// Exact E f(X) under the process marginal. Step functions only
// (kNoMarginalExpectation for tabular ones).
Rational Expectation(const Function& f, const ProcessSpec& spec);

struct Discrepancy {
  Rational gamma_m;                  // max over the class
  size_t argmax = 0;                 // smallest index attaining it
  std::vector<Rational> pointwise;   // |mean - E f| per function
  std::vector<Rational> means;
  std::vector<Rational> expectations;
};

// Gamma_m of the class on a path: max_f |m^-1 sum f(x_i) - E f|, exact.
Discrepancy ComputeDiscrepancy(const FunctionClass& cls,
                               std::span<const Rational> path,
                               const ProcessSpec& spec);

// Same, with expectations supplied by the caller.
Discrepancy ComputeDiscrepancy(const FunctionClass& cls,
                               std::span<const Rational> path,
                               std::span<const Rational> expectations);

// Gamma at every prefix length in `lengths` (ascending), sharing one pass.
std::vector<Rational> PrefixDiscrepancies(const FunctionClass& cls,
                                          std::span<const Rational> path,
                                          std::span<const Rational> expectations,
                                          std::span<const size_t> lengths);

struct SubadditivityResult {
  bool holds = false;
  Rational lhs;  // (m+n) Gamma_{m+n}(x_1..x_{m+n})
  Rational rhs;  // m Gamma_m(x_1..x_m) + n Gamma_n(x_{m+1}..x_{m+n})
};

// Throws kInvalidSplit unless 1 <= split < path length.
SubadditivityResult CheckSubadditivity(const FunctionClass& cls,
                                       std::span<const Rational> path,
                                       const ProcessSpec& spec, size_t split);

struct GammaRow {
  size_t m = 0;
  std::vector<Rational> replicates;  // index r uses seed + r
  Rational mean;
  Rational min;
  Rational max;
};

struct GammaEstimate {
  std::vector<GammaRow> rows;  // one per grid value, ascending m
  Rational estimate;           // mean at the largest m
};

GammaEstimate EstimateGamma(const FunctionClass& cls, const ProcessSpec& spec,
                            std::span<const size_t> m_grid, size_t replicates,
                            uint64_t seed);

struct RotationReport {
  size_t m = 0;
  Rational theta;
  Rational x0;
  Rational trajectory_gamma;     // data-dependent family, expected 1
  std::vector<Rational> base_points;
  Rational fixed_gamma;          // fixed disjoint-orbit family, expected 0
  bool orbits_disjoint = false;  // fixed windows never meet the sampled one
  size_t combined_dimension = 0; // dim_{1/4} of the combined truncation
  bool dimension_exact = false;
};

// Rotation counterexample at window m: the indicator of the truncated orbit
// {T^i x0 : |i| <= m} has sample mean 1 and expectation 0.
RotationReport RotationCounterexample(size_t m, const Rational& theta,
                                      uint64_t seed);

// Five base points whose orbits avoid every dyadic starting point: j/7 for
// j = 1..5. The default theta has denominator F_60, which 7 does not divide.
std::vector<Rational> DefaultBasePoints();

struct BoundCheck {
  size_t dimension = 0;
  bool dimension_finite = true;
  Rational estimate;
  Rational bound;  // 10 gamma
  bool pass = false;
  GammaEstimate detail;
};

BoundCheck RunBoundCheck(const FunctionClass& cls, const ProcessSpec& spec,
                         const Rational& gamma, size_t m, size_t replicates,
                         uint64_t seed);

}  // namespace gapdim

#endif  // GAPDIM_PROCESS_H_
