#ifndef GAPDIM_INTERVAL_UNION_H_
#define GAPDIM_INTERVAL_UNION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gapdim/rational.h"

namespace gapdim {

// Half-open interval [lo, hi) inside [0, 1).
struct Interval {
  Rational lo;
  Rational hi;

  Rational Length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// A finite union of half-open rational intervals in [0, 1), kept normalized:
// sorted, pairwise disjoint, and non-touching (hi_i < lo_{i+1}). With this
// representation a set is non-empty iff it has positive measure iff it has
// non-empty interior.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  // Normalizes an arbitrary list: drops empty intervals, sorts, merges
  // overlapping or touching ones. Throws kInvalidInterval if some interval
  // leaves [0, 1] or has lo > hi.
  static IntervalUnion FromIntervals(std::vector<Interval> intervals);
  static IntervalUnion Of(const Rational& lo, const Rational& hi);
  static IntervalUnion Full();

  // "[a,b),[c/d,e/f)"; "{}" or "" for the empty set.
  static IntervalUnion Parse(std::string_view text);
  std::string ToString() const;

  std::span<const Interval> intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  Rational Measure() const;
  bool Contains(const Rational& x) const;
  bool Includes(const IntervalUnion& other) const;

  IntervalUnion Intersect(const IntervalUnion& other) const;
  IntervalUnion Union(const IntervalUnion& other) const;
  IntervalUnion Complement() const;
  IntervalUnion Difference(const IntervalUnion& other) const;

  // Midpoint of the longest constituent interval (leftmost on ties);
  // nullopt iff the set is empty.
  std::optional<Rational> InteriorPoint() const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace gapdim

#endif  // GAPDIM_INTERVAL_UNION_H_
