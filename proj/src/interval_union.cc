#include "gapdim/interval_union.h"

#include <algorithm>
#include <cctype>

#include "gapdim/error.h"

namespace gapdim {

IntervalUnion IntervalUnion::FromIntervals(std::vector<Interval> intervals) {
  const Rational zero(0);
  const Rational one(1);
  std::vector<Interval> kept;
  kept.reserve(intervals.size());
  for (auto& iv : intervals) {
    if (iv.lo > iv.hi || iv.lo < zero || iv.hi > one) {
      throw Error(ErrorCode::kInvalidInterval,
                  "[" + iv.lo.ToString() + "," + iv.hi.ToString() +
                      ") is not a sub-interval of [0,1)");
    }
    if (iv.lo < iv.hi) kept.push_back(std::move(iv));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion out;
  for (auto& iv : kept) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      if (iv.hi > out.intervals_.back().hi) out.intervals_.back().hi = iv.hi;
    } else {
      out.intervals_.push_back(std::move(iv));
    }
  }
  return out;
}

IntervalUnion IntervalUnion::Of(const Rational& lo, const Rational& hi) {
  return FromIntervals({Interval{lo, hi}});
}

IntervalUnion IntervalUnion::Full() { return Of(Rational(0), Rational(1)); }

IntervalUnion IntervalUnion::Parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty() || s == "{}") return IntervalUnion();
  std::vector<Interval> out;
  size_t pos = 0;
  auto fail = [&]() {
    throw Error(ErrorCode::kParse,
                "bad interval union '" + std::string(text) + "'");
  };
  while (pos < s.size()) {
    if (s[pos] != '[') fail();
    const size_t comma = s.find(',', pos);
    const size_t close = s.find(')', pos);
    if (comma == std::string::npos || close == std::string::npos ||
        comma > close) {
      fail();
    }
    out.push_back(Interval{Rational::Parse(s.substr(pos + 1, comma - pos - 1)),
                           Rational::Parse(s.substr(comma + 1, close - comma - 1))});
    pos = close + 1;
    if (pos < s.size()) {
      if (s[pos] != ',') fail();
      ++pos;
      if (pos == s.size()) fail();
    }
  }
  return FromIntervals(std::move(out));
}

std::string IntervalUnion::ToString() const {
  if (intervals_.empty()) return "{}";
  std::string out;
  for (size_t i = 0; i < intervals_.size(); ++i) {
    if (i) out += ",";
    out += "[" + intervals_[i].lo.ToString() + "," + intervals_[i].hi.ToString() + ")";
  }
  return out;
}

Rational IntervalUnion::Measure() const {
  Rational total(0);
  for (const auto& iv : intervals_) total += iv.Length();
  return total;
}

bool IntervalUnion::Contains(const Rational& x) const {
  // First interval whose hi is > x.
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), x,
      [](const Rational& v, const Interval& iv) { return v < iv.hi; });
  return it != intervals_.end() && it->lo <= x;
}

bool IntervalUnion::Includes(const IntervalUnion& other) const {
  return other.Difference(*this).empty();
}

IntervalUnion IntervalUnion::Intersect(const IntervalUnion& other) const {
  IntervalUnion out;
  size_t i = 0;
  size_t j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const Rational& lo = Max(a[i].lo, b[j].lo);
    const Rational& hi = Min(a[i].hi, b[j].hi);
    if (lo < hi) out.intervals_.push_back(Interval{lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  // Inputs are normalized and non-touching, so pieces cannot touch either.
  return out;
}

IntervalUnion IntervalUnion::Union(const IntervalUnion& other) const {
  std::vector<Interval> all(intervals_);
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return FromIntervals(std::move(all));
}

IntervalUnion IntervalUnion::Complement() const {
  std::vector<Interval> out;
  Rational cursor(0);
  for (const auto& iv : intervals_) {
    if (cursor < iv.lo) out.push_back(Interval{cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < Rational(1)) out.push_back(Interval{cursor, Rational(1)});
  return FromIntervals(std::move(out));
}

IntervalUnion IntervalUnion::Difference(const IntervalUnion& other) const {
  return Intersect(other.Complement());
}

std::optional<Rational> IntervalUnion::InteriorPoint() const {
  if (intervals_.empty()) return std::nullopt;
  const Interval* best = &intervals_.front();
  for (const auto& iv : intervals_) {
    if (iv.Length() > best->Length()) best = &iv;
  }
  return (best->lo + best->hi) / Rational(2);
}

}  // namespace gapdim
