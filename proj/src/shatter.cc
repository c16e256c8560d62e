#include "gapdim/shatter.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>

#include "gapdim/error.h"

namespace gapdim {

namespace {

// Witness levels for a sorted, deduplicated critical set: one below, the
// midpoints, one above.
std::vector<Rational> AlphaCandidates(std::vector<Rational> critical) {
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
  std::vector<Rational> alphas;
  if (critical.empty()) return alphas;
  alphas.reserve(critical.size() + 1);
  alphas.push_back(critical.front() - Rational(1));
  const Rational two(2);
  for (size_t i = 0; i + 1 < critical.size(); ++i) {
    alphas.push_back((critical[i] + critical[i + 1]) / two);
  }
  alphas.push_back(critical.back() + Rational(1));
  return alphas;
}

void CheckPointInDomain(const FunctionClass& cls, const Rational& x,
                        ErrorCode code) {
  if (cls.kind() == FunctionKind::kTabular) {
    const auto dom = cls.domain();
    if (!std::binary_search(dom.begin(), dom.end(), x)) {
      throw Error(code, x.ToString() + " is not a domain point");
    }
  } else if (x < Rational(0) || x >= Rational(1)) {
    throw Error(code, x.ToString() + " outside [0,1)");
  }
}

// Ternary states of every (alpha, function, point) triple, laid out
// state[(a * functions + f) * points + p]: +1 above alpha + gamma, -1 below
// alpha - gamma, 0 blocked.
class PatternTable {
 public:
  PatternTable(const std::vector<std::vector<Rational>>& values,
               const Rational& gamma)
      : functions_(values.size()),
        points_(values.empty() ? 0 : values.front().size()) {
    std::vector<Rational> critical;
    for (const auto& row : values) {
      for (const auto& v : row) {
        critical.push_back(v - gamma);
        critical.push_back(v + gamma);
      }
    }
    alphas_ = AlphaCandidates(std::move(critical));
    state_.resize(alphas_.size() * functions_ * points_);
    for (size_t a = 0; a < alphas_.size(); ++a) {
      const Rational upper = alphas_[a] + gamma;
      const Rational lower = alphas_[a] - gamma;
      for (size_t f = 0; f < functions_; ++f) {
        for (size_t p = 0; p < points_; ++p) {
          const Rational& v = values[f][p];
          int8_t s = 0;
          if (v > upper) {
            s = 1;
          } else if (v < lower) {
            s = -1;
          }
          state_[(a * functions_ + f) * points_ + p] = s;
        }
      }
    }
  }

  // Tries every witness level in ascending order; the first one realizing all
  // 2^|subset| patterns wins, each pattern taking its lowest-index function.
  bool Check(std::span<const size_t> subset, size_t* alpha_index,
             std::vector<size_t>* selector) const {
    const size_t d = subset.size();
    const size_t masks = size_t{1} << d;
    if (masks > functions_) return false;
    std::vector<int64_t> realized(masks);
    for (size_t a = 0; a < alphas_.size(); ++a) {
      std::fill(realized.begin(), realized.end(), -1);
      size_t count = 0;
      const int8_t* base = &state_[a * functions_ * points_];
      for (size_t f = 0; f < functions_ && count < masks; ++f) {
        const int8_t* row = base + f * points_;
        size_t mask = 0;
        bool blocked = false;
        for (size_t j = 0; j < d; ++j) {
          const int8_t s = row[subset[j]];
          if (s == 0) {
            blocked = true;
            break;
          }
          if (s > 0) mask |= size_t{1} << j;
        }
        if (!blocked && realized[mask] < 0) {
          realized[mask] = static_cast<int64_t>(f);
          ++count;
        }
      }
      if (count == masks) {
        *alpha_index = a;
        selector->assign(realized.begin(), realized.end());
        return true;
      }
    }
    return false;
  }

  const Rational& alpha(size_t a) const { return alphas_[a]; }

 private:
  size_t functions_;
  size_t points_;
  std::vector<Rational> alphas_;
  std::vector<int8_t> state_;
};

std::vector<std::vector<Rational>> ValueMatrix(const FunctionClass& cls,
                                               std::span<const Rational> points) {
  std::vector<std::vector<Rational>> values(cls.size());
  for (size_t f = 0; f < cls.size(); ++f) {
    values[f].reserve(points.size());
    for (const auto& x : points) values[f].push_back(cls[f].Evaluate(x));
  }
  return values;
}

}  // namespace

bool VerifyCertificate(const FunctionClass& cls, const Rational& gamma,
                       const ShatterCertificate& cert) {
  const size_t d = cert.points.size();
  if (d >= 63 || cert.selector.size() != (size_t{1} << d)) {
    throw Error(ErrorCode::kMalformedCertificate,
                "selector must have 2^d entries");
  }
  for (size_t idx : cert.selector) {
    if (idx >= cls.size()) {
      throw Error(ErrorCode::kMalformedCertificate,
                  "function index " + std::to_string(idx) + " out of range");
    }
  }
  for (const auto& x : cert.points) {
    CheckPointInDomain(cls, x, ErrorCode::kMalformedCertificate);
  }
  const Rational upper = cert.alpha + gamma;
  const Rational lower = cert.alpha - gamma;
  for (size_t mask = 0; mask < cert.selector.size(); ++mask) {
    const Function& f = cls[cert.selector[mask]];
    for (size_t j = 0; j < d; ++j) {
      const Rational& v = f.Evaluate(cert.points[j]);
      const bool ok = ((mask >> j) & 1u) ? v > upper : v < lower;
      if (!ok) return false;
    }
  }
  return true;
}

std::optional<ShatterCertificate> Shatters(const FunctionClass& cls,
                                           std::span<const Rational> points,
                                           const Rational& gamma) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyPointSet, "shattering needs a non-empty set");
  }
  if (points.size() >= 63) return std::nullopt;
  for (const auto& x : points) {
    CheckPointInDomain(cls, x, ErrorCode::kInvalidArgument);
  }
  const auto values = ValueMatrix(cls, points);
  const PatternTable table(values, gamma);
  std::vector<size_t> subset(points.size());
  for (size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  size_t alpha_index = 0;
  std::vector<size_t> selector;
  if (!table.Check(subset, &alpha_index, &selector)) return std::nullopt;
  return ShatterCertificate{{points.begin(), points.end()},
                            table.alpha(alpha_index),
                            std::move(selector)};
}

std::vector<Rational> CandidatePoints(const FunctionClass& cls) {
  std::map<std::vector<Rational>, std::vector<Interval>> by_column;
  std::vector<Rational> out;
  if (cls.kind() == FunctionKind::kTabular) {
    std::map<std::vector<Rational>, bool> seen;
    const auto dom = cls.domain();
    for (size_t p = 0; p < dom.size(); ++p) {
      std::vector<Rational> column;
      for (const auto& f : cls.functions()) column.push_back(f.values()[p]);
      if (seen.emplace(std::move(column), true).second) out.push_back(dom[p]);
    }
    return out;
  }
  std::vector<Rational> breaks;
  for (const auto& f : cls.functions()) {
    breaks.insert(breaks.end(), f.breakpoints().begin(), f.breakpoints().end());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(Rational(1));
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    std::vector<Rational> column;
    for (const auto& f : cls.functions()) column.push_back(f.Evaluate(breaks[i]));
    by_column[std::move(column)].push_back(Interval{breaks[i], breaks[i + 1]});
  }
  for (auto& [column, parts] : by_column) {
    out.push_back(*IntervalUnion::FromIntervals(std::move(parts)).InteriorPoint());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

size_t FloorLog2(size_t n) {
  size_t e = 0;
  while ((n >> (e + 1)) != 0) ++e;
  return e;
}

class DimensionSearch {
 public:
  DimensionSearch(const FunctionClass& cls, const Rational& gamma, size_t cap)
      : points_(CandidatePoints(cls)),
        table_(ValueMatrix(cls, points_), gamma),
        functions_(cls.size()),
        cap_(cap) {}

  DimResult Run(SearchMode mode) {
    if (mode == SearchMode::kNaive) {
      Naive();
    } else {
      pruned_bound_ = std::min({cap_, FloorLog2(functions_), points_.size()});
      std::vector<size_t> current;
      Dfs(&current, 0);
    }
    DimResult result;
    result.dimension = best_.size();
    if (!best_.empty()) {
      ShatterCertificate cert;
      for (size_t i : best_) cert.points.push_back(points_[i]);
      cert.alpha = table_.alpha(best_alpha_);
      cert.selector = best_selector_;
      result.certificate = std::move(cert);
    }
    // Hitting the cap only says something if a larger set was still possible.
    const bool larger_possible = points_.size() > cap_ && cap_ + 1 < 63 &&
                                 (size_t{1} << (cap_ + 1)) <= functions_;
    result.capped = best_.size() == cap_ && larger_possible;
    result.exact = !result.capped;
    return result;
  }

 private:
  bool Try(std::span<const size_t> subset) {
    size_t alpha_index = 0;
    std::vector<size_t> selector;
    if (!table_.Check(subset, &alpha_index, &selector)) return false;
    if (subset.size() > best_.size()) {
      best_.assign(subset.begin(), subset.end());
      best_alpha_ = alpha_index;
      best_selector_ = std::move(selector);
    }
    return true;
  }

  void Naive() {
    const size_t n = points_.size();
    for (size_t s = 1; s <= std::min(cap_, n); ++s) {
      // Level s needs 2^s distinct functions.
      if (s >= 63 || (size_t{1} << s) > functions_) break;
      std::vector<size_t> combo(s);
      for (size_t i = 0; i < s; ++i) combo[i] = i;
      bool found = false;
      while (true) {
        if (Try(combo)) {
          found = true;
          break;
        }
        // Next combination in lexicographic order.
        size_t i = s;
        while (i > 0 && combo[i - 1] == n - s + (i - 1)) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (size_t j = i; j < s; ++j) combo[j] = combo[j - 1] + 1;
      }
      if (!found) break;
    }
  }

  // Returns true once the bound is reached so the whole search can stop.
  bool Dfs(std::vector<size_t>* current, size_t start) {
    if (current->size() >= pruned_bound_) return false;
    for (size_t i = start; i < points_.size(); ++i) {
      current->push_back(i);
      if (Try(*current)) {
        if (best_.size() == pruned_bound_) return true;
        if (Dfs(current, i + 1)) return true;
      }
      current->pop_back();
    }
    return false;
  }

  std::vector<Rational> points_;
  PatternTable table_;
  size_t functions_;
  size_t cap_;
  size_t pruned_bound_ = 0;
  std::vector<size_t> best_;
  size_t best_alpha_ = 0;
  std::vector<size_t> best_selector_;
};

}  // namespace

DimResult GapDimension(const FunctionClass& cls, const Rational& gamma,
                       size_t cap, SearchMode mode) {
  if (cap < 1) throw Error(ErrorCode::kInvalidCap, "cap must be >= 1");
  if (gamma.sign() <= 0) {
    throw Error(ErrorCode::kInvalidResolution, "gamma must be positive");
  }
  DimensionSearch search(cls, gamma, cap);
  return search.Run(mode);
}

std::vector<JoinCell> Join(std::span<const std::vector<IntervalUnion>> families) {
  for (size_t i = 0; i < families.size(); ++i) {
    const auto& fam = families[i];
    for (size_t a = 0; a < fam.size(); ++a) {
      for (size_t b = a + 1; b < fam.size(); ++b) {
        if (!fam[a].Intersect(fam[b]).empty()) {
          throw Error(ErrorCode::kNotDisjointFamily,
                      "family " + std::to_string(i) + " members " +
                          std::to_string(a) + " and " + std::to_string(b) +
                          " overlap");
        }
      }
    }
  }
  std::vector<JoinCell> cells;
  if (families.empty()) return cells;
  cells.push_back(JoinCell{IntervalUnion::Full(), {}});
  for (const auto& fam : families) {
    std::vector<JoinCell> next;
    for (const auto& cell : cells) {
      for (size_t m = 0; m < fam.size(); ++m) {
        IntervalUnion meet = cell.cell.Intersect(fam[m]);
        if (meet.empty()) continue;
        std::vector<size_t> signature = cell.signature;
        signature.push_back(m);
        next.push_back(JoinCell{std::move(meet), std::move(signature)});
      }
    }
    cells = std::move(next);
  }
  return cells;
}

ShatterCertificate JoinShatter(const FunctionClass& family, int k, int k2,
                               const Rational& gamma) {
  const size_t n = family.size();
  if (n < 2 || (n & (n - 1)) != 0 || n > 64) {
    throw Error(ErrorCode::kInvalidArgument,
                "family size must be 2^L with 1 <= L <= 6");
  }
  if (family.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kInvalidArgument, "join_shatter needs a step class");
  }
  const int big_k = KOfGamma(gamma);
  if (k < 1 || k > big_k || k2 < 1 || k2 > big_k) {
    throw Error(ErrorCode::kSegmentIndexOutOfRange, "segment index outside [1,K]");
  }
  if (!NonAdjacent(k, k2)) {
    throw Error(ErrorCode::kNotNonAdjacent,
                "(" + std::to_string(k) + "," + std::to_string(k2) +
                    ") are adjacent");
  }
  const size_t depth = FloorLog2(n);
  std::vector<IntervalUnion> seg_k;
  std::vector<IntervalUnion> seg_k2;
  for (const auto& f : family.functions()) {
    seg_k.push_back(StepSegment(f, gamma, k));
    seg_k2.push_back(StepSegment(f, gamma, k2));
  }

  ShatterCertificate cert;
  for (size_t i = 0; i < depth; ++i) {
    IntervalUnion cell = IntervalUnion::Full();
    std::string signature;
    for (size_t beta = 0; beta < n && !cell.empty(); ++beta) {
      const bool member = (beta >> i) & 1u;
      cell = cell.Intersect(member ? seg_k[beta] : seg_k2[beta]);
    }
    if (cell.empty()) {
      for (size_t beta = 0; beta < n; ++beta) {
        signature += (beta ? "," : "") + std::to_string(((beta >> i) & 1u) ? k : k2);
      }
      throw Error(ErrorCode::kJoinNotFull,
                  "cell for point " + std::to_string(i + 1) + " with bands (" +
                      signature + ") is empty");
    }
    cert.points.push_back(*cell.InteriorPoint());
  }

  const int low = std::min(k, k2);
  const int high = std::max(k, k2);
  cert.alpha = gamma * Rational(low + high - 1) / Rational(2);
  // Point i is above alpha for f_beta exactly when it sits in the high band.
  const size_t all = n - 1;
  cert.selector.resize(n);
  for (size_t mask = 0; mask < n; ++mask) {
    cert.selector[mask] = k < k2 ? (~mask & all) : mask;
  }
  if (!VerifyCertificate(family, gamma / Rational(2), cert)) {
    throw Error(ErrorCode::kStrictnessLost,
                "a selected value lies on the boundary of band " +
                    std::to_string(high));
  }
  return cert;
}

}  // namespace gapdim
