#include "gapdim/function_class.h"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "gapdim/error.h"
#include "gapdim/random.h"

namespace gapdim {

namespace {

void CheckUnitValue(const Rational& v) {
  if (v < Rational(0) || v > Rational(1)) {
    throw Error(ErrorCode::kInvalidFunction,
                "value " + v.ToString() + " outside [0,1]");
  }
}

}  // namespace

Function Function::Tabular(std::vector<Rational> points,
                           std::vector<Rational> values) {
  if (points.size() != values.size()) {
    throw Error(ErrorCode::kInvalidFunction, "points/values length mismatch");
  }
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidFunction, "tabular function without points");
  }
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i] < Rational(0) || points[i] >= Rational(1)) {
      throw Error(ErrorCode::kInvalidFunction,
                  "domain point " + points[i].ToString() + " outside [0,1)");
    }
    if (i > 0 && !(points[i - 1] < points[i])) {
      throw Error(ErrorCode::kInvalidFunction,
                  "domain points must be strictly increasing");
    }
    CheckUnitValue(values[i]);
  }
  Function f;
  f.kind_ = FunctionKind::kTabular;
  f.points_ = std::move(points);
  f.values_ = std::move(values);
  return f;
}

Function Function::Step(std::vector<StepPiece> pieces) {
  Rational total(0);
  IntervalUnion covered;
  for (const auto& piece : pieces) {
    CheckUnitValue(piece.value);
    total += piece.set.Measure();
    covered = covered.Union(piece.set);
  }
  // Sum of measures equals measure of the union iff the pieces are disjoint
  // (overlaps of half-open intervals always have positive length).
  if (total != Rational(1) || covered.Measure() != Rational(1)) {
    throw Error(ErrorCode::kInvalidFunction,
                "step pieces must be disjoint and cover [0,1)");
  }
  Function f;
  f.kind_ = FunctionKind::kStep;
  std::vector<std::pair<Rational, Rational>> cells;
  for (const auto& piece : pieces) {
    for (const auto& iv : piece.set.intervals()) {
      cells.emplace_back(iv.lo, piece.value);
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [start, value] : cells) {
    f.cell_starts_.push_back(std::move(start));
    f.cell_values_.push_back(std::move(value));
  }
  f.pieces_ = std::move(pieces);
  return f;
}

Function Function::StepFromBreaks(std::span<const Rational> breaks,
                                  std::span<const Rational> values) {
  if (breaks.size() != values.size() + 1) {
    throw Error(ErrorCode::kInvalidFunction, "need one more break than values");
  }
  std::vector<StepPiece> pieces;
  for (size_t i = 0; i < values.size(); ++i) {
    pieces.push_back({IntervalUnion::Of(breaks[i], breaks[i + 1]), values[i]});
  }
  return Step(std::move(pieces));
}

Function Function::Constant(const Rational& value) {
  return Step({{IntervalUnion::Full(), value}});
}

const Rational& Function::Evaluate(const Rational& x) const {
  if (kind_ == FunctionKind::kTabular) {
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.end() || *it != x) {
      throw Error(ErrorCode::kInvalidArgument,
                  x.ToString() + " is not a domain point");
    }
    return values_[static_cast<size_t>(it - points_.begin())];
  }
  if (x < Rational(0) || x >= Rational(1)) {
    throw Error(ErrorCode::kInvalidArgument, x.ToString() + " outside [0,1)");
  }
  auto it = std::upper_bound(cell_starts_.begin(), cell_starts_.end(), x);
  return cell_values_[static_cast<size_t>(it - cell_starts_.begin()) - 1];
}

bool operator==(const Function& a, const Function& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == FunctionKind::kTabular) {
    return a.points_ == b.points_ && a.values_ == b.values_;
  }
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (size_t i = 0; i < a.pieces_.size(); ++i) {
    if (a.pieces_[i].set != b.pieces_[i].set ||
        a.pieces_[i].value != b.pieces_[i].value) {
      return false;
    }
  }
  return true;
}

FunctionClass::FunctionClass(std::string name, std::vector<Function> functions)
    : name_(std::move(name)), functions_(std::move(functions)) {
  if (functions_.empty()) {
    throw Error(ErrorCode::kInvalidClass, "function class is empty");
  }
  const FunctionKind kind = functions_.front().kind();
  for (const auto& f : functions_) {
    if (f.kind() != kind) {
      throw Error(ErrorCode::kInvalidClass, "mixed function kinds");
    }
    if (kind == FunctionKind::kTabular &&
        !std::equal(f.points().begin(), f.points().end(),
                    functions_.front().points().begin(),
                    functions_.front().points().end())) {
      throw Error(ErrorCode::kInvalidClass,
                  "tabular functions must share domain points");
    }
  }
}

int KOfGamma(const Rational& gamma) {
  if (gamma.sign() <= 0 || gamma > Rational(1)) {
    throw Error(ErrorCode::kInvalidResolution,
                "gamma must lie in (0,1], got " + gamma.ToString());
  }
  const Rational inv = Rational(1) / gamma;
  const BigInt floor = inv.Floor();
  const BigInt k = inv.is_integer() ? floor : floor + 1;
  return static_cast<int>(k.get_si());
}

int BandOf(const Rational& value, const Rational& gamma) {
  const int big_k = KOfGamma(gamma);
  CheckUnitValue(value);
  const BigInt k = (value / gamma).Floor() + 1;
  return k >= big_k ? big_k : static_cast<int>(k.get_si());
}

namespace {

void CheckSegmentIndex(const Rational& gamma, int k) {
  const int big_k = KOfGamma(gamma);
  if (k < 1 || k > big_k) {
    throw Error(ErrorCode::kSegmentIndexOutOfRange,
                "k = " + std::to_string(k) + " outside [1," +
                    std::to_string(big_k) + "]");
  }
}

}  // namespace

Segment SegmentOf(const Function& f, const Rational& gamma, int k) {
  CheckSegmentIndex(gamma, k);
  if (f.kind() == FunctionKind::kTabular) {
    TabularSubset out;
    for (size_t i = 0; i < f.points().size(); ++i) {
      if (BandOf(f.values()[i], gamma) == k) out.points.push_back(f.points()[i]);
    }
    return out;
  }
  std::vector<Interval> parts;
  for (const auto& piece : f.pieces()) {
    if (BandOf(piece.value, gamma) == k) {
      parts.insert(parts.end(), piece.set.intervals().begin(),
                   piece.set.intervals().end());
    }
  }
  return IntervalUnion::FromIntervals(std::move(parts));
}

IntervalUnion StepSegment(const Function& f, const Rational& gamma, int k) {
  if (f.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kInvalidFunction, "step function required");
  }
  return std::get<IntervalUnion>(SegmentOf(f, gamma, k));
}

std::vector<Segment> SegmentPartition(const Function& f, const Rational& gamma) {
  const int big_k = KOfGamma(gamma);
  std::vector<Segment> out;
  out.reserve(static_cast<size_t>(big_k));
  for (int k = 1; k <= big_k; ++k) out.push_back(SegmentOf(f, gamma, k));
  return out;
}

std::vector<IntervalUnion> StepSegmentPartition(const Function& f,
                                                const Rational& gamma) {
  if (f.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kInvalidFunction, "step function required");
  }
  const int big_k = KOfGamma(gamma);
  std::vector<std::vector<Interval>> parts(static_cast<size_t>(big_k));
  for (const auto& piece : f.pieces()) {
    auto& bucket = parts[static_cast<size_t>(BandOf(piece.value, gamma) - 1)];
    bucket.insert(bucket.end(), piece.set.intervals().begin(),
                  piece.set.intervals().end());
  }
  std::vector<IntervalUnion> out;
  out.reserve(parts.size());
  for (auto& p : parts) out.push_back(IntervalUnion::FromIntervals(std::move(p)));
  return out;
}

std::vector<IntervalUnion> RegularSets(
    const FunctionClass& cls,
    std::span<const std::pair<Rational, Rational>> level_pairs) {
  if (cls.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kRegularityUndefined,
                "regular sets are only computable for step classes");
  }
  for (const auto& [a, b] : level_pairs) {
    if (a < Rational(0) || !(a < b) || !(b < Rational(2))) {
      throw Error(ErrorCode::kInvalidLevelPair,
                  "(" + a.ToString() + "," + b.ToString() +
                      ") violates 0 <= a < b < 2");
    }
  }
  std::vector<IntervalUnion> out;
  for (const auto& f : cls.functions()) {
    for (const auto& [a, b] : level_pairs) {
      std::vector<Interval> parts;
      for (const auto& piece : f.pieces()) {
        const bool below_top = b > Rational(1) ? piece.value <= Rational(1)
                                               : piece.value < b;
        if (piece.value >= a && below_top) {
          parts.insert(parts.end(), piece.set.intervals().begin(),
                       piece.set.intervals().end());
        }
      }
      out.push_back(IntervalUnion::FromIntervals(std::move(parts)));
    }
  }
  return out;
}

std::vector<Rational> QuantizationGrid(const Rational& gamma,
                                       const Rational& mesh) {
  if (mesh.sign() <= 0) {
    throw Error(ErrorCode::kInvalidMesh, "mesh must be positive");
  }
  const int big_k = KOfGamma(gamma);
  std::vector<Rational> anchors{Rational(0)};
  for (int k = 1; k < big_k; ++k) anchors.push_back(gamma * Rational(k));
  if (anchors.back() != Rational(1)) anchors.push_back(Rational(1));

  std::vector<Rational> grid{Rational(0)};
  for (size_t i = 0; i + 1 < anchors.size(); ++i) {
    const Rational width = anchors[i + 1] - anchors[i];
    // Smallest n with width / n < mesh.
    const BigInt n = (width / mesh).Floor() + 1;
    const Rational step = width / Rational(n, BigInt(1));
    for (BigInt j = 1; j <= n; ++j) {
      grid.push_back(anchors[i] + step * Rational(j, BigInt(1)));
    }
  }
  return grid;
}

namespace {

Rational QuantizeValue(const Rational& v, std::span<const Rational> grid) {
  // grid.back() == 1; v == 1 falls in the closed top cell.
  auto it = std::upper_bound(grid.begin(), grid.end(), v);
  if (it == grid.end()) return grid[grid.size() - 2];
  return *(it - 1);
}

}  // namespace

Function Quantize(const Function& f, const Rational& gamma,
                  const Rational& mesh) {
  const std::vector<Rational> grid = QuantizationGrid(gamma, mesh);
  if (f.kind() == FunctionKind::kTabular) {
    std::vector<Rational> values;
    for (const auto& v : f.values()) values.push_back(QuantizeValue(v, grid));
    return Function::Tabular({f.points().begin(), f.points().end()},
                             std::move(values));
  }
  std::vector<StepPiece> pieces;
  for (const auto& piece : f.pieces()) {
    pieces.push_back({piece.set, QuantizeValue(piece.value, grid)});
  }
  return Function::Step(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Generators

namespace {

Rational Frac(int64_t num, int64_t den) { return Rational(BigInt(num), BigInt(den)); }

Function Indicator(const IntervalUnion& set) {
  std::vector<StepPiece> pieces;
  pieces.push_back({set.Complement(), Rational(0)});
  pieces.push_back({set, Rational(1)});
  return Function::Step(std::move(pieces));
}

}  // namespace

FunctionClass Thresholds(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidGeneratorSpec, "thresholds needs n >= 1");
  std::vector<Function> fs;
  for (int j = 0; j < n; ++j) {
    fs.push_back(Indicator(IntervalUnion::Of(Frac(j, n), Rational(1))));
  }
  return FunctionClass("thresholds(" + std::to_string(n) + ")", std::move(fs));
}

FunctionClass IntervalIndicators(int n) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidGeneratorSpec, "interval_indicators needs n >= 1");
  }
  std::vector<Function> fs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      fs.push_back(Indicator(IntervalUnion::Of(Frac(i, n), Frac(j, n))));
    }
  }
  return FunctionClass("interval_indicators(" + std::to_string(n) + ")",
                       std::move(fs));
}

FunctionClass AllPatterns(int p) {
  if (p < 1 || p > 16) {
    throw Error(ErrorCode::kInvalidGeneratorSpec, "all_patterns needs 1 <= p <= 16");
  }
  std::vector<Rational> points;
  for (int i = 0; i < p; ++i) points.push_back(Frac(i, p));
  std::vector<Function> fs;
  for (uint32_t mask = 0; mask < (1u << p); ++mask) {
    std::vector<Rational> values;
    for (int i = 0; i < p; ++i) values.push_back(Rational((mask >> i) & 1u));
    fs.push_back(Function::Tabular(points, std::move(values)));
  }
  return FunctionClass("all_patterns(" + std::to_string(p) + ")", std::move(fs));
}

FunctionClass RandomStep(uint64_t seed, int count, int pieces, int grid) {
  if (count < 1 || pieces < 1 || grid < 1 || pieces > grid) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "random_step needs count >= 1 and 1 <= pieces <= grid");
  }
  CounterRng rng(seed);
  std::vector<Function> fs;
  for (int c = 0; c < count; ++c) {
    // Partial Fisher-Yates over the interior lattice points 1..grid-1.
    std::vector<int> interior(static_cast<size_t>(grid - 1));
    std::iota(interior.begin(), interior.end(), 1);
    for (int i = 0; i < pieces - 1; ++i) {
      const uint64_t j = static_cast<uint64_t>(i) +
                         rng.NextBelow(static_cast<uint64_t>(grid - 1 - i));
      std::swap(interior[static_cast<size_t>(i)], interior[j]);
    }
    std::vector<int> cut(interior.begin(), interior.begin() + (pieces - 1));
    std::sort(cut.begin(), cut.end());
    std::vector<Rational> breaks{Rational(0)};
    for (int b : cut) breaks.push_back(Frac(b, grid));
    breaks.push_back(Rational(1));
    std::vector<Rational> values;
    for (int i = 0; i < pieces; ++i) {
      values.push_back(Frac(static_cast<int64_t>(
                                rng.NextBelow(static_cast<uint64_t>(grid + 1))),
                            grid));
    }
    fs.push_back(Function::StepFromBreaks(breaks, values));
  }
  return FunctionClass("random_step(" + std::to_string(seed) + "," +
                           std::to_string(count) + "," + std::to_string(pieces) +
                           "," + std::to_string(grid) + ")",
                       std::move(fs));
}

std::vector<Rational> OrbitWindow(const Rational& x, const Rational& theta,
                                  int window) {
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(2 * window + 1));
  for (int i = -window; i <= window; ++i) {
    out.push_back((x + theta * Rational(i)).Frac());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FunctionClass TrajectoryIndicators(const Rational& theta,
                                   std::span<const Rational> base_points,
                                   int window) {
  if (base_points.empty() || window < 0 || theta.sign() <= 0 ||
      theta >= Rational(1)) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "trajectory_indicators needs theta in (0,1), window >= 0 and "
                "at least one base point");
  }
  std::vector<std::vector<Rational>> orbits;
  std::vector<Rational> domain;
  for (const auto& b : base_points) {
    if (b < Rational(0) || b >= Rational(1)) {
      throw Error(ErrorCode::kInvalidGeneratorSpec, "base point outside [0,1)");
    }
    orbits.push_back(OrbitWindow(b, theta, window));
    domain.insert(domain.end(), orbits.back().begin(), orbits.back().end());
  }
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  std::vector<Function> fs;
  for (const auto& orbit : orbits) {
    std::vector<Rational> values;
    values.reserve(domain.size());
    for (const auto& p : domain) {
      values.push_back(std::binary_search(orbit.begin(), orbit.end(), p)
                           ? Rational(1)
                           : Rational(0));
    }
    fs.push_back(Function::Tabular(domain, std::move(values)));
  }
  std::string name = "trajectory_indicators(" + theta.ToString() + "," +
                     std::to_string(window);
  for (const auto& b : base_points) name += "," + b.ToString();
  return FunctionClass(name + ")", std::move(fs));
}

FunctionClass FullJoinFamily(int depth, int k, int k2, const Rational& gamma) {
  if (depth < 1 || depth > 4) {
    throw Error(ErrorCode::kInvalidGeneratorSpec, "full_join_family needs 1 <= L <= 4");
  }
  const int big_k = KOfGamma(gamma);
  if (k < 1 || k > big_k || k2 < 1 || k2 > big_k || !NonAdjacent(k, k2)) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "full_join_family needs non-adjacent k, k2 in [1,K]");
  }
  const Rational half(BigInt(1), BigInt(2));
  const Rational low = (Rational(k) - half) * gamma;
  const Rational high = (Rational(k2) - half) * gamma;
  if (high > Rational(1) || BandOf(low, gamma) != k || BandOf(high, gamma) != k2) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "band midpoints do not fit in [0,1] for this gamma");
  }
  const size_t functions = size_t{1} << depth;
  const size_t cells = size_t{1} << functions;
  const BigInt cell_den = BigInt(1) << static_cast<unsigned>(functions);
  std::vector<Function> fs;
  for (size_t beta = 0; beta < functions; ++beta) {
    std::vector<Interval> low_parts;
    std::vector<Interval> high_parts;
    for (size_t sigma = 0; sigma < cells; ++sigma) {
      Interval cell{Rational(BigInt(static_cast<unsigned long>(sigma)), cell_den),
                    Rational(BigInt(static_cast<unsigned long>(sigma + 1)), cell_den)};
      ((sigma >> beta) & 1u ? low_parts : high_parts).push_back(std::move(cell));
    }
    std::vector<StepPiece> pieces;
    pieces.push_back({IntervalUnion::FromIntervals(std::move(low_parts)), low});
    pieces.push_back({IntervalUnion::FromIntervals(std::move(high_parts)), high});
    fs.push_back(Function::Step(std::move(pieces)));
  }
  return FunctionClass("full_join_family(" + std::to_string(depth) + "," +
                           std::to_string(k) + "," + std::to_string(k2) + "," +
                           gamma.ToString() + ")",
                       std::move(fs));
}

FunctionClass Ramp(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidGeneratorSpec, "ramp needs n >= 1");
  std::vector<Rational> breaks;
  std::vector<Rational> values;
  for (int j = 0; j <= n; ++j) breaks.push_back(Frac(j, n));
  for (int j = 0; j < n; ++j) values.push_back(Frac(j, n));
  std::vector<Function> fs;
  fs.push_back(Function::StepFromBreaks(breaks, values));
  return FunctionClass("ramp(" + std::to_string(n) + ")", std::move(fs));
}

namespace {

std::string Trimmed(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

int64_t ParseInt(const std::string& s, std::string_view spec) {
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "bad integer '" + s + "' in '" + std::string(spec) + "'");
  }
}

Rational ParseRationalArg(const std::string& s, std::string_view spec) {
  try {
    return Rational::Parse(s);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "bad rational '" + s + "' in '" + std::string(spec) + "'");
  }
}

}  // namespace

FunctionClass Generate(std::string_view spec) {
  const std::string text = Trimmed(spec);
  const size_t open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    throw Error(ErrorCode::kInvalidGeneratorSpec,
                "expected name(args...), got '" + text + "'");
  }
  const std::string name = Trimmed(std::string_view(text).substr(0, open));
  std::vector<std::string> args;
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  if (!Trimmed(inner).empty()) {
    size_t start = 0;
    while (true) {
      const size_t comma = inner.find(',', start);
      args.push_back(Trimmed(std::string_view(inner).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  auto need = [&](size_t n) {
    if (args.size() != n) {
      throw Error(ErrorCode::kInvalidGeneratorSpec,
                  name + " takes " + std::to_string(n) + " argument(s)");
    }
  };
  auto as_int = [&](size_t i) { return static_cast<int>(ParseInt(args[i], spec)); };

  if (name == "thresholds") {
    need(1);
    return Thresholds(as_int(0));
  }
  if (name == "interval_indicators") {
    need(1);
    return IntervalIndicators(as_int(0));
  }
  if (name == "all_patterns") {
    need(1);
    return AllPatterns(as_int(0));
  }
  if (name == "random_step") {
    need(4);
    return RandomStep(static_cast<uint64_t>(ParseInt(args[0], spec)), as_int(1),
                      as_int(2), as_int(3));
  }
  if (name == "trajectory_indicators") {
    if (args.size() < 3) {
      throw Error(ErrorCode::kInvalidGeneratorSpec,
                  "trajectory_indicators takes theta, window, base points...");
    }
    std::vector<Rational> bases;
    for (size_t i = 2; i < args.size(); ++i) {
      bases.push_back(ParseRationalArg(args[i], spec));
    }
    return TrajectoryIndicators(ParseRationalArg(args[0], spec), bases, as_int(1));
  }
  if (name == "full_join_family") {
    need(4);
    return FullJoinFamily(as_int(0), as_int(1), as_int(2),
                          ParseRationalArg(args[3], spec));
  }
  if (name == "ramp") {
    need(1);
    return Ramp(as_int(0));
  }
  if (name == "constant") {
    need(1);
    const Rational v = ParseRationalArg(args[0], spec);
    if (v < Rational(0) || v > Rational(1)) {
      throw Error(ErrorCode::kInvalidGeneratorSpec, "constant outside [0,1]");
    }
    std::vector<Function> fs;
    fs.push_back(Function::Constant(v));
    return FunctionClass("constant(" + v.ToString() + ")", std::move(fs));
  }
  throw Error(ErrorCode::kInvalidGeneratorSpec, "unknown generator '" + name + "'");
}

}  // namespace gapdim
