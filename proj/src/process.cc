#include "gapdim/process.h"

#include <algorithm>
#include <string>

#include "gapdim/error.h"
#include "gapdim/random.h"
#include "gapdim/shatter.h"

namespace gapdim {

Rational GoldenTheta() {
  BigInt a = 0;
  BigInt b = 1;
  // Consecutive Fibonacci numbers until the larger one reaches 2^40.
  const BigInt limit = BigInt(1) << 40;
  while (b < limit) {
    BigInt next = a + b;
    a = b;
    b = next;
  }
  return Rational(a, b);
}

ProcessSpec ProcessSpec::IidUniform() { return ProcessSpec{}; }

ProcessSpec ProcessSpec::Rotation(const Rational& theta) {
  if (theta.sign() <= 0 || theta >= Rational(1)) {
    throw Error(ErrorCode::kInvalidProcess, "rotation needs 0 < theta < 1");
  }
  ProcessSpec spec;
  spec.variant = Variant::kRotation;
  spec.theta = theta;
  return spec;
}

ProcessSpec ProcessSpec::GoldenRotation() { return Rotation(GoldenTheta()); }

ProcessSpec ProcessSpec::Markov(MarkovChain chain) {
  const size_t n = chain.transition.size();
  if (n == 0 || chain.emissions.size() != n) {
    throw Error(ErrorCode::kInvalidProcess,
                "markov chain needs n >= 1 states and one emission per state");
  }
  for (const auto& row : chain.transition) {
    if (row.size() != n) {
      throw Error(ErrorCode::kInvalidProcess, "transition matrix must be square");
    }
    Rational sum(0);
    for (const auto& p : row) {
      if (p.sign() < 0) {
        throw Error(ErrorCode::kInvalidProcess, "negative transition probability");
      }
      sum += p;
    }
    if (sum != Rational(1)) {
      throw Error(ErrorCode::kInvalidProcess,
                  "transition row sums to " + sum.ToString());
    }
  }
  for (const auto& e : chain.emissions) {
    const bool point_ok = e.kind == Emission::Kind::kPoint && e.a.sign() >= 0 &&
                          e.a < Rational(1);
    const bool uniform_ok = e.kind == Emission::Kind::kUniform && e.a.sign() >= 0 &&
                            e.a < e.b && e.b <= Rational(1);
    if (!point_ok && !uniform_ok) {
      throw Error(ErrorCode::kInvalidProcess, "emission outside [0,1)");
    }
  }
  StationaryDistribution(chain);  // irreducibility check
  ProcessSpec spec;
  spec.variant = Variant::kMarkov;
  spec.chain = std::move(chain);
  return spec;
}

std::string ProcessSpec::Describe() const {
  switch (variant) {
    case Variant::kIidUniform: return "iid";
    case Variant::kRotation: return "rotation(" + theta.ToString() + ")";
    case Variant::kMarkov:
      return "markov(" + std::to_string(chain.transition.size()) + " states)";
  }
  return "?";
}

std::vector<Rational> StationaryDistribution(const MarkovChain& chain) {
  const size_t n = chain.transition.size();
  // Strong connectivity over positive transitions.
  for (size_t start = 0; start < n; ++start) {
    std::vector<char> seen(n, 0);
    std::vector<size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const size_t s = stack.back();
      stack.pop_back();
      for (size_t t = 0; t < n; ++t) {
        if (!seen[t] && chain.transition[s][t].sign() > 0) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n)) {
      throw Error(ErrorCode::kNotErgodic,
                  "state " + std::to_string(start) + " does not reach every state");
    }
  }
  // pi (P - I) = 0 with the last equation replaced by sum(pi) = 1, i.e. the
  // system A pi = e_n with A = (P^T - I) and a row of ones at the bottom.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      a[i][j] = chain.transition[j][i] - (i == j ? Rational(1) : Rational(0));
    }
  }
  for (size_t j = 0; j < n; ++j) a[n - 1][j] = Rational(1);
  a[n - 1][n] = Rational(1);
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw Error(ErrorCode::kNotErgodic, "singular stationary system");
    std::swap(a[pivot], a[col]);
    const Rational inv = Rational(1) / a[col][col];
    for (size_t j = col; j <= n; ++j) a[col][j] *= inv;
    for (size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col].is_zero()) continue;
      const Rational factor = a[i][col];
      for (size_t j = col; j <= n; ++j) a[i][j] -= factor * a[col][j];
    }
  }
  std::vector<Rational> pi(n);
  for (size_t i = 0; i < n; ++i) pi[i] = a[i][n];
  return pi;
}

std::vector<Rational> RotationPath(const Rational& x0, const Rational& theta,
                                   size_t m) {
  std::vector<Rational> out;
  out.reserve(m);
  Rational x = x0;
  const Rational one(1);
  for (size_t i = 0; i < m; ++i) {
    x += theta;
    if (x >= one) x -= one;
    out.push_back(x);
  }
  return out;
}

namespace {

size_t PickIndex(const Rational& u, std::span<const Rational> weights) {
  Rational cumulative(0);
  for (size_t s = 0; s < weights.size(); ++s) {
    cumulative += weights[s];
    if (u < cumulative) return s;
  }
  return weights.size() - 1;
}

}  // namespace

SamplePath SampleProcess(const ProcessSpec& spec, size_t m, uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "path length must be >= 1");
  SamplePath path;
  path.seed = seed;
  path.spec = spec;
  CounterRng rng(seed);
  switch (spec.variant) {
    case ProcessSpec::Variant::kIidUniform:
      path.values.reserve(m);
      for (size_t i = 0; i < m; ++i) path.values.push_back(rng.NextUnit());
      break;
    case ProcessSpec::Variant::kRotation:
      path.values = RotationPath(rng.NextUnit(), spec.theta, m);
      break;
    case ProcessSpec::Variant::kMarkov: {
      const auto pi = StationaryDistribution(spec.chain);
      path.values.reserve(m);
      size_t state = PickIndex(rng.NextUnit(), pi);
      for (size_t i = 0; i < m; ++i) {
        if (i > 0) state = PickIndex(rng.NextUnit(), spec.chain.transition[state]);
        const Emission& e = spec.chain.emissions[state];
        if (e.kind == Emission::Kind::kPoint) {
          path.values.push_back(e.a);
        } else {
          path.values.push_back(e.a + (e.b - e.a) * rng.NextUnit());
        }
      }
      break;
    }
  }
  return path;
}

namespace {

// Average of a step function over [lo, hi).
Rational AverageOver(const Function& f, const Rational& lo, const Rational& hi) {
  const IntervalUnion window = IntervalUnion::Of(lo, hi);
  Rational integral(0);
  for (const auto& piece : f.pieces()) {
    integral += piece.value * piece.set.Intersect(window).Measure();
  }
  return integral / (hi - lo);
}

}  // namespace

Rational Expectation(const Function& f, const ProcessSpec& spec) {
  if (f.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kNoMarginalExpectation,
                "expectations need a step function");
  }
  if (spec.variant != ProcessSpec::Variant::kMarkov) {
    return AverageOver(f, Rational(0), Rational(1));
  }
  const auto pi = StationaryDistribution(spec.chain);
  Rational total(0);
  for (size_t s = 0; s < pi.size(); ++s) {
    const Emission& e = spec.chain.emissions[s];
    total += pi[s] * (e.kind == Emission::Kind::kPoint ? f.Evaluate(e.a)
                                                       : AverageOver(f, e.a, e.b));
  }
  return total;
}

namespace {

// Counts path points per cell of the common refinement of a step class, so
// every function's sample sum is a short dot product.
class CellCounter {
 public:
  explicit CellCounter(const FunctionClass& cls) : cls_(cls) {
    if (cls.kind() == FunctionKind::kStep) {
      for (const auto& f : cls.functions()) {
        starts_.insert(starts_.end(), f.breakpoints().begin(), f.breakpoints().end());
      }
      std::sort(starts_.begin(), starts_.end());
      starts_.erase(std::unique(starts_.begin(), starts_.end()), starts_.end());
    } else {
      starts_.assign(cls.domain().begin(), cls.domain().end());
    }
    values_.resize(cls.size());
    for (size_t f = 0; f < cls.size(); ++f) {
      for (const auto& s : starts_) values_[f].push_back(cls[f].Evaluate(s));
    }
    counts_.assign(starts_.size(), 0);
  }

  void Add(const Rational& x) {
    if (cls_.kind() == FunctionKind::kStep) {
      if (x.sign() < 0 || x >= Rational(1)) {
        throw Error(ErrorCode::kInvalidArgument, "path value outside [0,1)");
      }
      auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
      ++counts_[static_cast<size_t>(it - starts_.begin()) - 1];
    } else {
      auto it = std::lower_bound(starts_.begin(), starts_.end(), x);
      if (it == starts_.end() || *it != x) {
        throw Error(ErrorCode::kInvalidArgument,
                    "path value " + x.ToString() + " is not a domain point");
      }
      ++counts_[static_cast<size_t>(it - starts_.begin())];
    }
    ++total_;
  }

  Discrepancy Evaluate(std::span<const Rational> expectations) const {
    Discrepancy out;
    const Rational m(static_cast<int64_t>(total_));
    for (size_t f = 0; f < values_.size(); ++f) {
      Rational sum(0);
      for (size_t c = 0; c < counts_.size(); ++c) {
        if (counts_[c] != 0 && !values_[f][c].is_zero()) {
          sum += values_[f][c] * Rational(static_cast<int64_t>(counts_[c]));
        }
      }
      Rational mean = sum / m;
      Rational delta = (mean - expectations[f]).Abs();
      if (f == 0 || delta > out.gamma_m) {
        out.gamma_m = delta;
        out.argmax = f;
      }
      out.means.push_back(std::move(mean));
      out.pointwise.push_back(std::move(delta));
    }
    out.expectations.assign(expectations.begin(), expectations.end());
    return out;
  }

 private:
  const FunctionClass& cls_;
  std::vector<Rational> starts_;
  std::vector<std::vector<Rational>> values_;
  std::vector<uint64_t> counts_;
  uint64_t total_ = 0;
};

std::vector<Rational> AllExpectations(const FunctionClass& cls,
                                      const ProcessSpec& spec) {
  std::vector<Rational> out;
  for (const auto& f : cls.functions()) out.push_back(Expectation(f, spec));
  return out;
}

}  // namespace

Discrepancy ComputeDiscrepancy(const FunctionClass& cls,
                               std::span<const Rational> path,
                               std::span<const Rational> expectations) {
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "empty path");
  if (expectations.size() != cls.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one expectation per function");
  }
  CellCounter counter(cls);
  for (const auto& x : path) counter.Add(x);
  return counter.Evaluate(expectations);
}

Discrepancy ComputeDiscrepancy(const FunctionClass& cls,
                               std::span<const Rational> path,
                               const ProcessSpec& spec) {
  const auto expectations = AllExpectations(cls, spec);
  return ComputeDiscrepancy(cls, path, expectations);
}

std::vector<Rational> PrefixDiscrepancies(const FunctionClass& cls,
                                          std::span<const Rational> path,
                                          std::span<const Rational> expectations,
                                          std::span<const size_t> lengths) {
  CellCounter counter(cls);
  std::vector<Rational> out;
  size_t consumed = 0;
  for (size_t len : lengths) {
    if (len < consumed || len > path.size() || len == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "prefix lengths must be ascending, positive and within the path");
    }
    for (; consumed < len; ++consumed) counter.Add(path[consumed]);
    out.push_back(counter.Evaluate(expectations).gamma_m);
  }
  return out;
}

SubadditivityResult CheckSubadditivity(const FunctionClass& cls,
                                       std::span<const Rational> path,
                                       const ProcessSpec& spec, size_t split) {
  if (split < 1 || split >= path.size()) {
    throw Error(ErrorCode::kInvalidSplit,
                "split " + std::to_string(split) + " outside [1, " +
                    std::to_string(path.size()) + ")");
  }
  const auto expectations = AllExpectations(cls, spec);
  const size_t m = split;
  const size_t n = path.size() - split;
  SubadditivityResult out;
  out.lhs = Rational(static_cast<int64_t>(m + n)) *
            ComputeDiscrepancy(cls, path, expectations).gamma_m;
  out.rhs = Rational(static_cast<int64_t>(m)) *
                ComputeDiscrepancy(cls, path.first(m), expectations).gamma_m +
            Rational(static_cast<int64_t>(n)) *
                ComputeDiscrepancy(cls, path.subspan(m), expectations).gamma_m;
  out.holds = out.lhs <= out.rhs;
  return out;
}

GammaEstimate EstimateGamma(const FunctionClass& cls, const ProcessSpec& spec,
                            std::span<const size_t> m_grid, size_t replicates,
                            uint64_t seed) {
  if (replicates < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one replicate");
  }
  std::vector<size_t> grid(m_grid.begin(), m_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.front() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "m grid must be non-empty and positive");
  }
  const auto expectations = AllExpectations(cls, spec);

  GammaEstimate out;
  out.rows.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) out.rows[i].m = grid[i];
  for (size_t r = 0; r < replicates; ++r) {
    const SamplePath path = SampleProcess(spec, grid.back(), seed + r);
    const auto gammas = PrefixDiscrepancies(cls, path.values, expectations, grid);
    for (size_t i = 0; i < grid.size(); ++i) out.rows[i].replicates.push_back(gammas[i]);
  }
  for (auto& row : out.rows) {
    Rational sum(0);
    row.min = row.replicates.front();
    row.max = row.replicates.front();
    for (const auto& g : row.replicates) {
      sum += g;
      row.min = Min(row.min, g);
      row.max = Max(row.max, g);
    }
    row.mean = sum / Rational(static_cast<int64_t>(replicates));
  }
  out.estimate = out.rows.back().mean;
  return out;
}

std::vector<Rational> DefaultBasePoints() {
  std::vector<Rational> out;
  for (int j = 1; j <= 5; ++j) out.push_back(Rational(BigInt(j), BigInt(7)));
  return out;
}

RotationReport RotationCounterexample(size_t m, const Rational& theta,
                                      uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  ProcessSpec::Rotation(theta);  // validates theta
  CounterRng rng(seed);
  RotationReport report;
  report.m = m;
  report.theta = theta;
  report.x0 = rng.NextUnit();
  report.base_points = DefaultBasePoints();
  const auto path = RotationPath(report.x0, theta, m);
  const int window = static_cast<int>(m);

  // Finite orbit windows have Lebesgue measure zero, so E f = 0 for every
  // indicator below and Gamma_m is just the largest hit frequency.
  auto frequency = [&](const std::vector<Rational>& support) {
    size_t hits = 0;
    for (const auto& x : path) {
      if (std::binary_search(support.begin(), support.end(), x)) ++hits;
    }
    return Rational(BigInt(static_cast<unsigned long>(hits)),
                    BigInt(static_cast<unsigned long>(m)));
  };
  const auto own = OrbitWindow(report.x0, theta, window);
  report.trajectory_gamma = frequency(own);

  report.fixed_gamma = Rational(0);
  report.orbits_disjoint = true;
  for (const auto& b : report.base_points) {
    const auto orbit = OrbitWindow(b, theta, window);
    report.fixed_gamma = Max(report.fixed_gamma, frequency(orbit));
    std::vector<Rational> common;
    std::set_intersection(own.begin(), own.end(), orbit.begin(), orbit.end(),
                          std::back_inserter(common));
    if (!common.empty()) report.orbits_disjoint = false;
  }

  std::vector<Rational> bases{report.x0};
  bases.insert(bases.end(), report.base_points.begin(), report.base_points.end());
  const FunctionClass combined = TrajectoryIndicators(theta, bases, window);
  const DimResult dim = GapDimension(combined, Rational(BigInt(1), BigInt(4)),
                                     kDefaultCap, SearchMode::kNaive);
  report.combined_dimension = dim.dimension;
  report.dimension_exact = dim.exact;
  return report;
}

BoundCheck RunBoundCheck(const FunctionClass& cls, const ProcessSpec& spec,
                         const Rational& gamma, size_t m, size_t replicates,
                         uint64_t seed) {
  BoundCheck out;
  const DimResult dim = GapDimension(cls, gamma, kDefaultCap, SearchMode::kPruned);
  out.dimension = dim.dimension;
  out.dimension_finite = !dim.capped;
  const size_t grid[] = {m};
  out.detail = EstimateGamma(cls, spec, grid, replicates, seed);
  out.estimate = out.detail.estimate;
  out.bound = Rational(10) * gamma;
  out.pass = out.dimension_finite && out.estimate <= out.bound;
  return out;
}

}  // namespace gapdim
