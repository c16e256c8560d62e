// gapdim: command-line front end. Every report embeds the resolved config and
// the library version; JSON keys are sorted so reruns are byte-identical.
//
// Exit codes: 0 success, 1 FAIL verdict (verify, itree verify, bound-check),
// 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapdim/error.h"
#include "gapdim/function_class.h"
#include "gapdim/io.h"
#include "gapdim/process.h"
#include "gapdim/random.h"
#include "gapdim/shatter.h"
#include "gapdim/tree.h"

#ifndef GAPDIM_VERSION
#define GAPDIM_VERSION "0.0.0"
#endif

namespace gapdim {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  UsageError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what) {}
};

struct Param {
  std::string name;
  std::string help;
  std::optional<std::string> fallback;
};

class Context {
 public:
  Context(std::string command, std::map<std::string, std::string> values)
      : command_(std::move(command)), values_(std::move(values)) {}

  const std::string& command() const { return command_; }
  bool Has(const std::string& name) const { return values_.count(name) > 0; }

  const std::string& Get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw UsageError(name, "required");
    return it->second;
  }

  Rational GetRational(const std::string& name) const {
    try {
      return Rational::Parse(Get(name));
    } catch (const Error& e) {
      throw UsageError(name, e.what());
    }
  }

  long long GetInt(const std::string& name, long long lo, long long hi) const {
    const std::string& text = Get(name);
    long long v = 0;
    try {
      size_t used = 0;
      v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw UsageError(name, "expected an integer, got '" + text + "'");
    }
    if (v < lo || v > hi) {
      throw UsageError(name, "must lie in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    }
    return v;
  }

  uint64_t GetSeed() const {
    const std::string& text = Get("seed");
    try {
      size_t used = 0;
      const uint64_t v = std::stoull(text, &used);
      if (used != text.size() || text.starts_with("-")) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw UsageError("seed", "expected a non-negative integer, got '" + text + "'");
    }
  }

  std::vector<long long> GetIntList(const std::string& name, long long lo, long long hi) const {
    std::vector<long long> out;
    std::stringstream ss(Get(name));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      long long v = 0;
      try {
        size_t used = 0;
        v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError(name, "expected a comma-separated integer list");
      }
      if (v < lo || v > hi) throw UsageError(name, "entry " + item + " out of range");
      out.push_back(v);
    }
    if (out.empty()) throw UsageError(name, "empty list");
    return out;
  }

  FunctionClass GetClass() const {
    try {
      return LoadClass(Get("class"));
    } catch (const Error& e) {
      throw UsageError("class", e.what());
    }
  }

  ProcessSpec GetProcess() const {
    try {
      return ParseProcess(Get("process"));
    } catch (const Error& e) {
      throw UsageError("process", e.what());
    }
  }

  Json ReadInput(const std::string& name) const {
    try {
      return ReadJsonFile(Get(name));
    } catch (const Error& e) {
      throw UsageError(name, e.what());
    }
  }

  Json Config() const {
    Json out = Json::object();
    for (const auto& [k, v] : values_) out[k] = v;
    out["command"] = command_;
    return out;
  }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

Json Num(const Rational& r) { return {{"exact", r.ToString()}, {"decimal", r.ToDecimal()}}; }

Json NumList(std::span<const Rational> values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(Num(v));
  return out;
}

Json Report(const Context& ctx) {
  return {{"command", ctx.command()}, {"version", GAPDIM_VERSION}, {"config", ctx.Config()}};
}

// ---- commands ---------------------------------------------------------------

int RunDim(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const Rational gamma = ctx.GetRational("gamma");
  const std::string& mode_text = ctx.Get("mode");
  SearchMode mode;
  if (mode_text == "naive") {
    mode = SearchMode::kNaive;
  } else if (mode_text == "pruned") {
    mode = SearchMode::kPruned;
  } else {
    throw UsageError("mode", "expected naive or pruned");
  }
  const auto cap = static_cast<size_t>(ctx.GetInt("cap", 1, 62));
  const DimResult r = GapDimension(cls, gamma, cap, mode);
  report["dimension"] = r.capped ? Json("INFINITE_CAP") : Json(r.dimension);
  report["achieved"] = r.dimension;
  report["capped"] = r.capped;
  report["exact"] = r.exact;
  report["class_size"] = cls.size();
  report["candidate_points"] = CandidatePoints(cls).size();
  if (r.certificate) report["certificate"] = ToJson(*r.certificate);
  return kExitOk;
}

int RunVerify(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const Rational gamma = ctx.GetRational("gamma");
  Json input = ctx.ReadInput("cert");
  // A dim report works too: take its certificate.
  if (input.is_object() && input.contains("certificate")) input = input["certificate"];
  bool valid = false;
  try {
    const ShatterCertificate cert = CertificateFromJson(input);
    valid = VerifyCertificate(cls, gamma, cert);
    report["points"] = cert.points.size();
  } catch (const Error& e) {
    report["reason"] = e.what();
  }
  report["verdict"] = valid ? "PASS" : "FAIL";
  return valid ? kExitOk : kExitFail;
}

int RunSegments(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const Rational gamma = ctx.GetRational("gamma");
  std::vector<size_t> which;
  if (ctx.Has("function")) {
    which.push_back(static_cast<size_t>(
        ctx.GetInt("function", 0, static_cast<long long>(cls.size()) - 1)));
  } else {
    for (size_t i = 0; i < cls.size(); ++i) which.push_back(i);
  }
  report["K"] = KOfGamma(gamma);
  Json fns = Json::array();
  for (size_t i : which) {
    Json segs = Json::array();
    for (const auto& seg : SegmentPartition(cls[i], gamma)) {
      if (const auto* set = std::get_if<IntervalUnion>(&seg)) {
        segs.push_back({{"set", set->ToString()}, {"measure", Num(set->Measure())}});
      } else {
        Json pts = Json::array();
        for (const auto& p : std::get<TabularSubset>(seg).points) pts.push_back(ToJson(p));
        segs.push_back({{"points", pts}});
      }
    }
    fns.push_back({{"index", i}, {"segments", segs}});
  }
  report["functions"] = fns;
  return kExitOk;
}

int RunJoin(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  if (cls.kind() != FunctionKind::kStep) throw UsageError("class", "join needs a step class");
  const Rational gamma = ctx.GetRational("gamma");
  const int big_k = KOfGamma(gamma);
  const int k = static_cast<int>(ctx.GetInt("k", 1, big_k));
  const int k2 = static_cast<int>(ctx.GetInt("k2", 1, big_k));
  std::vector<std::vector<IntervalUnion>> families;
  for (const auto& f : cls.functions()) {
    families.push_back({StepSegment(f, gamma, k), StepSegment(f, gamma, k2)});
  }
  const auto cells = Join(families);
  Json out = Json::array();
  for (const auto& c : cells) {
    out.push_back({{"set", c.cell.ToString()},
                   {"measure", Num(c.cell.Measure())},
                   {"signature", c.signature}});
  }
  report["cells"] = out;
  report["cell_count"] = cells.size();
  const bool small = cls.size() < 63;
  report["full"] = small && cells.size() == (size_t{1} << cls.size());
  // Shattering witness when the class is indexed by the subsets of [L].
  const size_t n = cls.size();
  if (n >= 2 && (n & (n - 1)) == 0) {
    try {
      const ShatterCertificate cert = JoinShatter(cls, k, k2, gamma);
      report["certificate"] = ToJson(cert);
      report["certificate_gamma"] = Num(gamma / Rational(2));
      report["certificate_valid"] = VerifyCertificate(cls, gamma / Rational(2), cert);
    } catch (const Error& e) {
      report["certificate"] = nullptr;
      report["shatter_error"] = e.what();
    }
  }
  return kExitOk;
}

int RunPtree(const Context& ctx, Json& report) {
  const int depth = static_cast<int>(ctx.GetInt("depth", 1, 24));
  const Rational c = ctx.GetRational("c");
  const size_t first = size_t{1} << depth;
  std::vector<size_t> leaves;
  if (ctx.Has("leaves")) {
    for (long long off : ctx.GetIntList("leaves", 0, static_cast<long long>(first) - 1)) {
      leaves.push_back(first + static_cast<size_t>(off));
    }
  } else {
    // Random leaf set of the requested size (partial Fisher-Yates).
    const auto size = static_cast<size_t>(ctx.GetInt("size", 1, static_cast<long long>(first)));
    CounterRng rng(ctx.GetSeed());
    std::vector<size_t> all(first);
    for (size_t i = 0; i < first; ++i) all[i] = first + i;
    for (size_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.NextBelow(first - i)]);
    leaves.assign(all.begin(), all.begin() + static_cast<long>(size));
  }
  std::sort(leaves.begin(), leaves.end());
  const PtreeWitness w = FindPtreeWitness(depth, leaves, c);
  const AncestorCounts counts = CountAncestors(depth, leaves);
  report["leaves"] = leaves;
  report["u"] = w.u;
  report["level"] = w.level;
  report["nodes"] = w.nodes;
  report["reach_counts"] = counts.reach;
  report["both_counts"] = counts.both;
  report["bound"] = Num(c * Rational(static_cast<int64_t>(first)) /
                        Rational(static_cast<int64_t>(4 * depth)));
  return kExitOk;
}

Json SubtreeJson(const UniformSubtree& sub) {
  Json stages = Json::array();
  for (const auto& s : sub.stages) {
    stages.push_back({{"level", s.level},
                      {"label", {s.label.k, s.label.k2}},
                      {"nodes", s.nodes.size()},
                      {"guaranteed", s.guaranteed}});
  }
  std::vector<size_t> embedding(sub.embedding.begin() + 1, sub.embedding.end());
  return {{"depth", sub.depth},
          {"label", {sub.label.k, sub.label.k2}},
          {"levels", sub.levels},
          {"embedding", embedding},
          {"stages", stages},
          {"stage_bound", sub.stage_bound}};
}

int RunSubtree(const Context& ctx, Json& report) {
  const int big_k = static_cast<int>(ctx.GetInt("k", 1, 64));
  CompleteTree tree(0);
  if (ctx.Has("tree")) {
    Json input = ctx.ReadInput("tree");
    if (input.is_object() && input.contains("tree")) input = input["tree"];
    try {
      tree = TreeFromJson(input);
    } catch (const Error& e) {
      throw UsageError("tree", e.what());
    }
  } else {
    const int depth = static_cast<int>(ctx.GetInt("depth", 1, 20));
    CounterRng rng(ctx.GetSeed());
    tree = CompleteTree(depth);
    for (size_t t = 1; t < CompleteTree::FirstAt(depth); ++t) {
      const int k = 1 + static_cast<int>(rng.NextBelow(static_cast<uint64_t>(big_k)));
      const int k2 = 1 + static_cast<int>(rng.NextBelow(static_cast<uint64_t>(big_k)));
      tree.set_label(t, {k, k2});
    }
  }
  const UniformSubtree sub = ExtractUniformSubtree(tree, big_k);
  report["subtree"] = SubtreeJson(sub);
  report["embedding_valid"] = IsUniformEmbedding(tree, sub);
  report["guarantee"] = Num(Rational(sub.stage_bound) / Rational(big_k * big_k));
  return kExitOk;
}

int RunItreeBuild(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const Rational gamma = ctx.GetRational("gamma");
  const int depth = static_cast<int>(ctx.GetInt("depth", 1, 20));
  const auto budget = static_cast<uint64_t>(ctx.GetInt("budget", 1, 1'000'000'000'000LL));
  const auto tree = BuildIntersectionTree(cls, gamma, depth, budget);
  report["built"] = tree.has_value();
  if (!tree) {
    report["tree"] = nullptr;
    return kExitOk;
  }
  report["tree"] = ToJson(*tree);
  report["verified"] = VerifyIntersectionTree(*tree, cls, gamma, tree->functions());
  const MaximalJoin join = MaximalJoinFromTree(*tree, cls, gamma);
  Json cells = Json::array();
  for (const auto& c : join.cells) {
    cells.push_back({{"set", c.cell.ToString()}, {"measure", Num(c.cell.Measure())},
                     {"signature", c.signature}});
  }
  Json mj = {{"functions", join.functions},
             {"label", {join.label.k, join.label.k2}},
             {"cells", cells},
             {"subtree", SubtreeJson(join.subtree)}};
  if (join.functions.size() >= 2) {
    const ShatterCertificate cert = ShatterFromMaximalJoin(join, cls, gamma);
    mj["certificate"] = ToJson(cert);
    mj["certificate_gamma"] = Num(gamma / Rational(2));
    mj["certificate_valid"] = VerifyCertificate(cls, gamma / Rational(2), cert);
  }
  report["maximal_join"] = mj;
  return kExitOk;
}

int RunItreeVerify(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const Rational gamma = ctx.GetRational("gamma");
  Json input = ctx.ReadInput("tree");
  if (input.is_object() && input.contains("tree")) input = input["tree"];
  bool valid = false;
  try {
    const CompleteTree tree = TreeFromJson(input);
    valid = VerifyIntersectionTree(tree, cls, gamma, tree.functions());
  } catch (const Error& e) {
    report["reason"] = e.what();
  }
  report["verdict"] = valid ? "PASS" : "FAIL";
  return valid ? kExitOk : kExitFail;
}

int RunDiscrepancy(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const ProcessSpec spec = ctx.GetProcess();
  const auto m = static_cast<size_t>(ctx.GetInt("m", 1, 100'000'000));
  const SamplePath path = SampleProcess(spec, m, ctx.GetSeed());
  const Discrepancy d = ComputeDiscrepancy(cls, path.values, spec);
  report["process"] = ToJson(spec);
  report["gamma_m"] = Num(d.gamma_m);
  report["argmax"] = d.argmax;
  report["pointwise"] = NumList(d.pointwise);
  report["means"] = NumList(d.means);
  report["expectations"] = NumList(d.expectations);
  return kExitOk;
}

Json GammaJson(const GammaEstimate& est) {
  Json rows = Json::array();
  for (const auto& row : est.rows) {
    rows.push_back({{"m", row.m},
                    {"replicates", NumList(row.replicates)},
                    {"mean", Num(row.mean)},
                    {"min", Num(row.min)},
                    {"max", Num(row.max)}});
  }
  return {{"rows", rows}, {"estimate", Num(est.estimate)}};
}

std::vector<size_t> GetGrid(const Context& ctx) {
  std::vector<size_t> grid;
  for (long long m : ctx.GetIntList("grid", 1, 100'000'000)) grid.push_back(static_cast<size_t>(m));
  return grid;
}

int RunGcCurve(const Context& ctx, Json& report, std::string& csv) {
  const FunctionClass cls = ctx.GetClass();
  const ProcessSpec spec = ctx.GetProcess();
  const auto replicates = static_cast<size_t>(ctx.GetInt("replicates", 1, 10'000));
  const GammaEstimate est = EstimateGamma(cls, spec, GetGrid(ctx), replicates, ctx.GetSeed());
  report["process"] = ToJson(spec);
  report["curve"] = GammaJson(est);
  std::ostringstream out;
  out << "m,replicate,gamma_m,gamma_m_exact\n";
  for (const auto& row : est.rows) {
    for (size_t r = 0; r < row.replicates.size(); ++r) {
      out << row.m << ',' << r << ',' << row.replicates[r].ToDecimal() << ','
          << row.replicates[r].ToString() << '\n';
    }
  }
  csv = out.str();
  return kExitOk;
}

int RunBoundCheck(const Context& ctx, Json& report) {
  const FunctionClass cls = ctx.GetClass();
  const ProcessSpec spec = ctx.GetProcess();
  const Rational gamma = ctx.GetRational("gamma");
  const auto m = static_cast<size_t>(ctx.GetInt("m", 1, 100'000'000));
  const auto replicates = static_cast<size_t>(ctx.GetInt("replicates", 1, 10'000));
  const BoundCheck r = RunBoundCheck(cls, spec, gamma, m, replicates, ctx.GetSeed());
  report["process"] = ToJson(spec);
  report["dimension"] = r.dimension_finite ? Json(r.dimension) : Json("INFINITE_CAP");
  report["dimension_finite"] = r.dimension_finite;
  report["estimate"] = Num(r.estimate);
  report["bound"] = Num(r.bound);
  report["curve"] = GammaJson(r.detail);
  report["verdict"] = r.pass ? "PASS" : "FAIL";
  report["note"] =
      "For a finite class the ergodic theorem forces Gamma = 0, so PASS is expected "
      "with margin; the check exercises the full pipeline.";
  return r.pass ? kExitOk : kExitFail;
}

int RunDemoRotation(const Context& ctx, Json& report) {
  const auto m = static_cast<size_t>(ctx.GetInt("m", 1, 1'000'000));
  const Rational theta = ctx.Has("theta") ? ctx.GetRational("theta") : GoldenTheta();
  if (theta.sign() <= 0 || theta >= Rational(1)) throw UsageError("theta", "must lie in (0,1)");
  const RotationReport r = RotationCounterexample(m, theta, ctx.GetSeed());
  report["m"] = r.m;
  report["theta"] = ToJson(r.theta);
  report["x0"] = ToJson(r.x0);
  report["trajectory_family"] = {
      {"gamma_m", Num(r.trajectory_gamma)},
      {"description",
       "indicator of the sampled orbit window {T^i x0 : |i| <= m}; it depends on the "
       "sampled x0, since any runtime family is a finite truncation"}};
  Json bases = Json::array();
  for (const auto& b : r.base_points) bases.push_back(ToJson(b));
  report["fixed_family"] = {{"base_points", bases},
                            {"gamma_m", Num(r.fixed_gamma)},
                            {"orbits_disjoint", r.orbits_disjoint}};
  report["combined_dimension"] = {{"gamma", "1/4"},
                                  {"dimension", r.combined_dimension},
                                  {"exact", r.dimension_exact}};
  return kExitOk;
}

// ---- plumbing -----------------------------------------------------------------

struct Command {
  std::vector<std::string> path;  // e.g. {"itree", "build"}
  std::string help;
  std::vector<Param> params;
  std::function<int(const Context&, Json&, std::string&)> run;
  std::string FileStem() const {
    std::string s;
    for (const auto& p : path) s += (s.empty() ? "" : "-") + p;
    return s;
  }
};

template <typename F>
std::function<int(const Context&, Json&, std::string&)> Plain(F f) {
  return [f](const Context& ctx, Json& report, std::string&) { return f(ctx, report); };
}

std::vector<Command> Commands() {
  const Param cls{"class", "generator spec, e.g. thresholds(8), or a class JSON file", {}};
  const Param gamma{"gamma", "resolution as num/den", {}};
  const Param process{"process", "iid | rotation | rotation(theta) | markov JSON file", {}};
  const Param seed{"seed", "base seed (mandatory for stochastic commands)", {}};
  return {
      {{"dim"}, "gap dimension with certificate",
       {cls, gamma, {"mode", "naive | pruned", "pruned"}, {"cap", "candidate point cap", "20"}},
       Plain(RunDim)},
      {{"verify"}, "re-check a certificate",
       {cls, gamma, {"cert", "certificate JSON (or a dim report)", {}}}, Plain(RunVerify)},
      {{"segments"}, "gamma-segment partition of each function",
       {cls, gamma, {"function", "only this function index", {}}}, Plain(RunSegments)},
      {{"join"}, "join of the {s_k, s_k2} segment pairs, with the shattering witness",
       {cls, gamma, {"k", "first band", {}}, {"k2", "second band", {}}}, Plain(RunJoin)},
      {{"ptree"}, "ancestral pigeonhole witness",
       {{"depth", "tree depth L", {}},
        {"c", "density c", {}},
        {"leaves", "comma-separated leaf offsets in [0, 2^L)", {}},
        {"size", "random leaf set size (with --seed)", {}},
        seed},
       Plain(RunPtree)},
      {{"subtree"}, "uniform-label embedded subtree",
       {{"k", "label range K", {}},
        {"tree", "labeled tree JSON", {}},
        {"depth", "random labeling depth (with --seed)", {}},
        seed},
       Plain(RunSubtree)},
      {{"itree", "build"}, "build an intersection tree and its maximal join",
       {cls, gamma, {"depth", "tree depth L", {}},
        {"budget", "node-visit budget", std::to_string(kDefaultBuildBudget)}},
       Plain(RunItreeBuild)},
      {{"itree", "verify"}, "verify an intersection tree",
       {cls, gamma, {"tree", "tree JSON (or an itree build report)", {}}},
       Plain(RunItreeVerify)},
      {{"discrepancy"}, "Gamma_m on one sampled path",
       {cls, process, {"m", "path length", {}}, seed}, Plain(RunDiscrepancy)},
      {{"gc-curve"}, "Gamma_m over an m grid and replicates (JSON + CSV)",
       {cls, process, {"grid", "comma-separated m values", "100,1000,10000,100000"},
        {"replicates", "replicate count", "5"}, seed},
       RunGcCurve},
      {{"bound-check"}, "Gamma estimate against 10 gamma",
       {cls, process, gamma, {"m", "path length", "100000"},
        {"replicates", "replicate count", "5"}, seed},
       Plain(RunBoundCheck)},
      {{"demo-rotation"}, "rotation counterexample",
       {{"m", "orbit window and path length", {}}, {"theta", "rotation angle (default golden)", {}},
        seed},
       Plain(RunDemoRotation)},
  };
}

std::string JsonScalarText(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!(e.is_number_integer() || e.is_number_unsigned() || e.is_string())) {
        throw UsageError(field, "list entries must be integers or strings");
      }
      out += (out.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
    }
    return out;
  }
  throw UsageError(field, "expected a string, integer or list");
}

// Merges config-file values into the flag values; a field set both ways is an
// error, as is an unknown field.
void MergeConfig(const Command& cmd, const std::string& config_path,
                 std::map<std::string, std::string>& values) {
  Json j;
  try {
    j = ReadJsonFile(config_path);
  } catch (const Error& e) {
    throw UsageError("config", e.what());
  }
  if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw UsageError("config", "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != cmd.FileStem()) {
        throw UsageError("config.command", "does not match '" + cmd.FileStem() + "'");
      }
      continue;
    }
    const bool known = std::any_of(cmd.params.begin(), cmd.params.end(),
                                   [&](const Param& p) { return p.name == key; });
    if (!known) throw UsageError("config." + key, "unknown field");
    const std::string text = JsonScalarText(value, "config." + key);
    if (values.count(key)) {
      throw UsageError(key, "given both as a flag and in the config file");
    }
    values[key] = text;
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("out", "cannot write " + path.string());
  out << text;
}

}  // namespace
}  // namespace gapdim

int main(int argc, char** argv) {
  using namespace gapdim;
  CLI::App app{"gapdim: exact gap dimension, tree witnesses and ergodic discrepancy"};
  app.set_version_flag("--version", GAPDIM_VERSION);
  app.require_subcommand(1);

  const std::vector<Command> commands = Commands();
  struct Binding {
    CLI::App* sub;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
    std::string out;
    std::string config;
  };
  std::vector<Binding> bindings(commands.size());
  std::map<std::string, CLI::App*> groups;
  for (size_t i = 0; i < commands.size(); ++i) {
    const Command& cmd = commands[i];
    CLI::App* parent = &app;
    for (size_t d = 0; d + 1 < cmd.path.size(); ++d) {
      auto it = groups.find(cmd.path[d]);
      if (it == groups.end()) {
        CLI::App* g = app.add_subcommand(cmd.path[d], cmd.path[d] + " subcommands");
        g->require_subcommand(1);
        it = groups.emplace(cmd.path[d], g).first;
      }
      parent = it->second;
    }
    Binding& b = bindings[i];
    b.sub = parent->add_subcommand(cmd.path.back(), cmd.help);
    for (const auto& p : cmd.params) {
      std::string help = p.help;
      if (p.fallback) help += " (default " + *p.fallback + ")";
      b.options[p.name] = b.sub->add_option("--" + p.name, b.raw[p.name], help);
    }
    b.sub->add_option("--out", b.out, "directory for report files (stdout when absent)");
    b.sub->add_option("--config", b.config, "JSON config file; may also be a previous report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (size_t i = 0; i < commands.size(); ++i) {
    Binding& b = bindings[i];
    if (!b.sub->parsed()) continue;
    const Command& cmd = commands[i];
    try {
      std::map<std::string, std::string> values;
      for (const auto& [name, opt] : b.options) {
        if (opt->count() > 0) values[name] = b.raw[name];
      }
      if (!b.config.empty()) MergeConfig(cmd, b.config, values);
      for (const auto& p : cmd.params) {
        if (!values.count(p.name) && p.fallback) values[p.name] = *p.fallback;
      }
      const Context ctx(cmd.FileStem(), values);
      Json report = Report(ctx);
      std::string csv;
      int code = kExitOk;
      try {
        code = cmd.run(ctx, report, csv);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInternal) throw;
        throw UsageError(cmd.FileStem(), e.what());
      }
      const std::string text = report.dump(2) + "\n";
      if (b.out.empty()) {
        std::cout << text;
        if (!csv.empty()) std::cout << csv;
      } else {
        std::filesystem::create_directories(b.out);
        const auto dir = std::filesystem::path(b.out);
        WriteFile(dir / (cmd.FileStem() + ".json"), text);
        std::cout << "wrote " << (dir / (cmd.FileStem() + ".json")).string() << "\n";
        if (!csv.empty()) {
          WriteFile(dir / (cmd.FileStem() + ".csv"), csv);
          std::cout << "wrote " << (dir / (cmd.FileStem() + ".csv")).string() << "\n";
        }
      }
      return code;
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return kExitUsage;
}
