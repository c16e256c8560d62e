#ifndef GAPDIM_FUNCTION_CLASS_H_
#define GAPDIM_FUNCTION_CLASS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gapdim/interval_union.h"
#include "gapdim/rational.h"

namespace gapdim {

enum class FunctionKind { kTabular, kStep };

struct StepPiece {
  IntervalUnion set;
  Rational value;
};

// A [0,1]-valued function, either tabulated on finitely many points or
// piecewise constant on a partition of [0, 1) into interval unions.
class Function {
 public:
  // `points` must be strictly increasing in [0, 1); one value per point.
  static Function Tabular(std::vector<Rational> points,
                          std::vector<Rational> values);
  // Pieces must be pairwise disjoint with measures summing to 1. Empty pieces
  // are allowed and kept.
  static Function Step(std::vector<StepPiece> pieces);
  // Convenience: value[i] on [breaks[i], breaks[i+1]); breaks start at 0 and
  // end at 1.
  static Function StepFromBreaks(std::span<const Rational> breaks,
                                 std::span<const Rational> values);
  static Function Constant(const Rational& value);

  FunctionKind kind() const { return kind_; }
  std::span<const Rational> points() const { return points_; }
  std::span<const Rational> values() const { return values_; }
  std::span<const StepPiece> pieces() const { return pieces_; }

  // Sorted left endpoints of the elementary intervals of a step function;
  // elementary interval i is [breakpoints()[i], breakpoints()[i+1]) (last one
  // ends at 1) and carries value cell_values()[i].
  std::span<const Rational> breakpoints() const { return cell_starts_; }
  std::span<const Rational> cell_values() const { return cell_values_; }

  // Tabular functions are only defined on their domain points; evaluating
  // elsewhere throws kInvalidArgument. Step functions accept any x in [0, 1).
  const Rational& Evaluate(const Rational& x) const;

  friend bool operator==(const Function& a, const Function& b);

 private:
  Function() = default;

  FunctionKind kind_ = FunctionKind::kTabular;
  std::vector<Rational> points_;
  std::vector<Rational> values_;
  std::vector<StepPiece> pieces_;
  std::vector<Rational> cell_starts_;
  std::vector<Rational> cell_values_;
};

class FunctionClass {
 public:
  FunctionClass(std::string name, std::vector<Function> functions);

  const std::string& name() const { return name_; }
  FunctionKind kind() const { return functions_.front().kind(); }
  size_t size() const { return functions_.size(); }
  const Function& operator[](size_t i) const { return functions_[i]; }
  std::span<const Function> functions() const { return functions_; }

  // Shared domain points (tabular classes only).
  std::span<const Rational> domain() const { return functions_.front().points(); }

 private:
  std::string name_;
  std::vector<Function> functions_;
};

// Band count for resolution gamma: 1/gamma when that is an integer, otherwise
// floor(1/gamma) + 1. Throws kInvalidResolution unless 0 < gamma <= 1.
int KOfGamma(const Rational& gamma);

// Band index in [1, K] of a value in [0, 1]. Bands are [(k-1)g, kg) except
// the top band [(K-1)g, 1], which contains 1.
int BandOf(const Rational& value, const Rational& gamma);

struct TabularSubset {
  std::vector<Rational> points;
  friend bool operator==(const TabularSubset&, const TabularSubset&) = default;
};

using Segment = std::variant<IntervalUnion, TabularSubset>;

// Preimage of band k. IntervalUnion for step functions, domain subset for
// tabular ones.
Segment SegmentOf(const Function& f, const Rational& gamma, int k);
// Step-only shortcut; throws kInvalidFunction for tabular input.
IntervalUnion StepSegment(const Function& f, const Rational& gamma, int k);

// All K segments, index k-1 holding s_k(f).
std::vector<Segment> SegmentPartition(const Function& f, const Rational& gamma);
std::vector<IntervalUnion> StepSegmentPartition(const Function& f,
                                                const Rational& gamma);

inline bool NonAdjacent(int k, int k2) { return k - k2 >= 2 || k2 - k >= 2; }

// f^{-1}[a, b) for each function and each pair, function-major; b > 1 also
// captures the value 1. Pairs need 0 <= a < b < 2.
std::vector<IntervalUnion> RegularSets(
    const FunctionClass& cls,
    std::span<const std::pair<Rational, Rational>> level_pairs);

// Value grid 0 = a_0 < ... < a_N = 1 containing every k*gamma and with all
// gaps strictly below mesh.
std::vector<Rational> QuantizationGrid(const Rational& gamma,
                                       const Rational& mesh);

// Replaces each value v by the grid point a_{j-1} with a_{j-1} <= v < a_j
// (v = 1 maps to a_{N-1}).
Function Quantize(const Function& f, const Rational& gamma,
                  const Rational& mesh);

// Generators. Accepted forms:
//   thresholds(n)                      indicators of [j/n, 1), j = 0..n-1
//   interval_indicators(n)             indicators of [i/n, j/n), 0 <= i < j <= n
//   all_patterns(p)                    2^p binary tabular functions on p points
//   random_step(seed, count, pieces, grid)
//   trajectory_indicators(theta, window, b1, b2, ...)
//   full_join_family(L, k, k2, gamma)
//   ramp(n)                            value j/n on [j/n, (j+1)/n)
//   constant(v)
FunctionClass Generate(std::string_view spec);

FunctionClass Thresholds(int n);
FunctionClass IntervalIndicators(int n);
FunctionClass AllPatterns(int p);
FunctionClass RandomStep(uint64_t seed, int count, int pieces, int grid);
FunctionClass TrajectoryIndicators(const Rational& theta,
                                   std::span<const Rational> base_points,
                                   int window);
FunctionClass FullJoinFamily(int depth, int k, int k2, const Rational& gamma);
FunctionClass Ramp(int n);

// Points {frac(x + i*theta) : |i| <= window}, sorted and deduplicated.
std::vector<Rational> OrbitWindow(const Rational& x, const Rational& theta,
                                  int window);

}  // namespace gapdim

#endif  // GAPDIM_FUNCTION_CLASS_H_
