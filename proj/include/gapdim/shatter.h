#ifndef GAPDIM_SHATTER_H_
#define GAPDIM_SHATTER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gapdim/function_class.h"
#include "gapdim/interval_union.h"
#include "gapdim/rational.h"

namespace gapdim {

// Proof that a class gamma-shatters `points`: for every mask m over the
// points, selector[m] names a function f with f(x_j) > alpha + gamma when bit
// j of m is set and f(x_j) < alpha - gamma otherwise.
struct ShatterCertificate {
  std::vector<Rational> points;
  Rational alpha;
  std::vector<size_t> selector;  // size 2^points.size()

  size_t size() const { return points.size(); }
  friend bool operator==(const ShatterCertificate&,
                         const ShatterCertificate&) = default;
};

// Exact re-check. Throws kMalformedCertificate for a selector of the wrong
// length, out-of-range function indices, or points outside the domain.
bool VerifyCertificate(const FunctionClass& cls, const Rational& gamma,
                       const ShatterCertificate& cert);

// Sweeps the midpoints of the sorted critical values {f(x) +- gamma} plus one
// sentinel on each side; the (above, below, blocked) pattern of every (f, x)
// is constant between consecutive critical values, so this is exhaustive.
std::optional<ShatterCertificate> Shatters(const FunctionClass& cls,
                                           std::span<const Rational> points,
                                           const Rational& gamma);

enum class SearchMode { kNaive, kPruned };

struct DimResult {
  size_t dimension = 0;
  // The search stopped at the point cap with a set of that size shattered and
  // larger sets still possible: "arbitrarily large" at this scale.
  bool capped = false;
  bool exact = true;
  std::optional<ShatterCertificate> certificate;
};

inline constexpr size_t kDefaultCap = 20;

// Candidate points: tabular domain points, or one interior point per cell of
// the common refinement of all step partitions; in both cases points with
// identical value columns are merged (such points can never be separated).
std::vector<Rational> CandidatePoints(const FunctionClass& cls);

// dim_gamma(cls). NAIVE tries every subset size by size; PRUNED runs a DFS
// that only extends shattered sets and stops at floor(log2 |F|). Both return
// the lexicographically least maximal shattered set and the same certificate.
DimResult GapDimension(const FunctionClass& cls, const Rational& gamma,
                       size_t cap = kDefaultCap,
                       SearchMode mode = SearchMode::kPruned);

struct JoinCell {
  IntervalUnion cell;
  std::vector<size_t> signature;  // chosen member index per family
};

// All non-empty intersections picking one set per family, in lexicographic
// signature order. Throws kNotDisjointFamily if a family has overlapping
// members.
std::vector<JoinCell> Join(std::span<const std::vector<IntervalUnion>> families);

// The constructive step behind the join/shattering connection: `family` has
// 2^L step functions, function i indexed by the subset of [L] encoded by the
// bits of i. Picks x_i in the cell where exactly the functions whose subset
// contains i sit in band k, and the others in band k2, then certifies
// dim_{gamma/2} >= L with alpha = gamma (k + k2 - 1) / 2 (k < k2 after
// ordering).
//
// Throws kJoinNotFull naming the first empty prescribed cell, kNotNonAdjacent,
// and kStrictnessLost if some selected value sits exactly on a band boundary
// so the strict inequalities fail.
ShatterCertificate JoinShatter(const FunctionClass& family, int k, int k2,
                               const Rational& gamma);

}  // namespace gapdim

#endif  // GAPDIM_SHATTER_H_
