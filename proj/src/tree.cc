#include "gapdim/tree.h"

#include <algorithm>
#include <map>
#include <string>

#include "gapdim/error.h"

namespace gapdim {

CompleteTree::CompleteTree(int depth) : depth_(depth) {
  if (depth < 0 || depth > 24) {
    throw Error(ErrorCode::kInvalidArgument, "tree depth must lie in [0,24]");
  }
  const size_t slots = size_t{1} << (depth + 1);
  labels_.resize(slots);
  sets_.resize(slots);
}

int CompleteTree::Level(size_t t) {
  int level = 0;
  while (t > 1) {
    t >>= 1;
    ++level;
  }
  return level;
}

bool CompleteTree::InSubtree(size_t root, size_t node) {
  const int lr = Level(root);
  const int ln = Level(node);
  return ln >= lr && (node >> (ln - lr)) == root;
}

namespace {

// reach[t] != 0 iff node t is in S or has a descendant in S.
std::vector<char> ReachMarks(int depth, std::span<const size_t> leaves) {
  const size_t slots = size_t{1} << (depth + 1);
  std::vector<char> reach(slots, 0);
  for (size_t leaf : leaves) reach[leaf] = 1;
  for (size_t t = CompleteTree::FirstAt(depth) - 1; t >= 1; --t) {
    reach[t] = reach[2 * t] || reach[2 * t + 1];
  }
  return reach;
}

void CheckLeaves(int depth, std::span<const size_t> leaves, ErrorCode code) {
  const size_t first = CompleteTree::FirstAt(depth);
  std::vector<size_t> sorted(leaves.begin(), leaves.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(code, "leaf set has duplicates");
  }
  for (size_t leaf : sorted) {
    if (leaf < first || leaf >= 2 * first) {
      throw Error(code, "node " + std::to_string(leaf) + " is not a leaf");
    }
  }
}

}  // namespace

AncestorCounts CountAncestors(int depth, std::span<const size_t> leaves) {
  CheckLeaves(depth, leaves, ErrorCode::kInvalidArgument);
  const auto reach = ReachMarks(depth, leaves);
  AncestorCounts counts;
  counts.reach.assign(static_cast<size_t>(depth) + 1, 0);
  counts.both.assign(static_cast<size_t>(depth), 0);
  for (size_t t = 1; t < reach.size(); ++t) {
    const int level = CompleteTree::Level(t);
    if (reach[t]) ++counts.reach[static_cast<size_t>(level)];
    if (level < depth && reach[2 * t] && reach[2 * t + 1]) {
      ++counts.both[static_cast<size_t>(level)];
    }
  }
  return counts;
}

PtreeWitness FindPtreeWitness(int depth, std::span<const size_t> leaves,
                              const Rational& c) {
  constexpr ErrorCode kPre = ErrorCode::kPtreePreconditionViolated;
  if (depth < 1 || depth > 24) throw Error(kPre, "depth must lie in [1,24]");
  if (c.sign() <= 0 || c > Rational(1)) throw Error(kPre, "c must lie in (0,1]");
  CheckLeaves(depth, leaves, kPre);
  const Rational scaled = c * Rational(int64_t{1} << depth);
  if (Rational(static_cast<int64_t>(leaves.size())) < scaled ||
      scaled < Rational(4)) {
    throw Error(kPre, "need |S| >= c 2^L >= 4 (|S| = " +
                          std::to_string(leaves.size()) + ", c 2^L = " +
                          scaled.ToString() + ")");
  }

  PtreeWitness witness;
  witness.u = 1 + CeilLog2(Rational(1) / c);
  const auto reach = ReachMarks(depth, leaves);
  std::vector<size_t> both(static_cast<size_t>(depth), 0);
  for (size_t t = 1; t < CompleteTree::FirstAt(depth); ++t) {
    if (reach[2 * t] && reach[2 * t + 1]) {
      ++both[static_cast<size_t>(CompleteTree::Level(t))];
    }
  }
  const int lowest = std::max(0, depth - witness.u);
  witness.level = lowest;
  for (int l = lowest; l <= depth - 1; ++l) {
    if (both[static_cast<size_t>(l)] > both[static_cast<size_t>(witness.level)]) {
      witness.level = l;
    }
  }
  const size_t first = CompleteTree::FirstAt(witness.level);
  for (size_t t = first; t < 2 * first; ++t) {
    if (reach[2 * t] && reach[2 * t + 1]) witness.nodes.push_back(t);
  }
  // |S'| >= c 2^L / (4L).
  if (Rational(static_cast<int64_t>(witness.nodes.size() * 4 *
                                    static_cast<size_t>(depth))) < scaled) {
    throw Error(ErrorCode::kInternal, "pigeonhole bound violated");
  }
  return witness;
}

int FullJoinStageBound(int depth, int big_k) {
  if (depth < 1 || big_k < 1) return 0;
  const BigInt lhs = BigInt(1) << static_cast<unsigned>(depth - 1);
  const BigInt k(big_k);
  const BigInt base = BigInt(2 * depth) * k * k;
  int best = 0;
  for (int r = 1; r < 64; ++r) {
    BigInt rhs = 4;
    mpz_class tmp;
    mpz_pow_ui(tmp.get_mpz_t(), BigInt(4).get_mpz_t(), static_cast<unsigned long>(r));
    rhs *= tmp;
    mpz_pow_ui(tmp.get_mpz_t(), k.get_mpz_t(), static_cast<unsigned long>(2 * r + 1));
    rhs *= tmp;
    mpz_pow_ui(tmp.get_mpz_t(), base.get_mpz_t(),
               static_cast<unsigned long>(r * (r + 1) / 2));
    rhs *= tmp;
    if (lhs > rhs) {
      best = r;
    } else {
      break;
    }
  }
  return best;
}

namespace {

// Most frequent label among `nodes` (lexicographically least on ties) and the
// nodes carrying it.
UniformStage PigeonholeLabel(const CompleteTree& tree, int level,
                             std::span<const size_t> nodes, bool guaranteed) {
  std::map<SegmentLabel, std::vector<size_t>> groups;
  for (size_t t : nodes) groups[*tree.label(t)].push_back(t);
  auto best = groups.begin();
  for (auto it = groups.begin(); it != groups.end(); ++it) {
    if (it->second.size() > best->second.size()) best = it;
  }
  return UniformStage{level, best->first, best->second, guaranteed};
}

}  // namespace

UniformSubtree ExtractUniformSubtree(const CompleteTree& tree, int big_k) {
  const int depth = tree.depth();
  for (size_t t = 1; t < CompleteTree::FirstAt(depth); ++t) {
    const auto& label = tree.label(t);
    if (!label) {
      throw Error(ErrorCode::kMissingLabel,
                  "internal node " + std::to_string(t) + " has no label");
    }
    if (label->k < 1 || label->k > big_k || label->k2 < 1 || label->k2 > big_k) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label of node " + std::to_string(t) + " outside [K]^2");
    }
  }
  UniformSubtree out;
  out.stage_bound = FullJoinStageBound(depth, big_k);
  if (depth == 0) {
    out.embedding = {0, 1};
    out.levels = {0};
    return out;
  }

  // Stages, deepest first.
  {
    const int l0 = depth - 1;
    std::vector<size_t> level_nodes;
    for (size_t t = CompleteTree::FirstAt(l0); t < CompleteTree::FirstAt(l0 + 1); ++t) {
      level_nodes.push_back(t);
    }
    out.stages.push_back(PigeonholeLabel(tree, l0, level_nodes, true));
  }
  while (out.stages.back().level > 0) {
    const UniformStage& cur = out.stages.back();
    const size_t count = cur.nodes.size();
    if (count >= 4) {
      const Rational c(BigInt(static_cast<unsigned long>(count)),
                       BigInt(1) << static_cast<unsigned>(cur.level));
      const PtreeWitness w = FindPtreeWitness(cur.level, cur.nodes, c);
      out.stages.push_back(PigeonholeLabel(tree, w.level, w.nodes, true));
      continue;
    }
    // Below the lemma's range: take the deepest level that still has a node
    // with both children reaching the current set.
    const AncestorCounts counts = CountAncestors(cur.level, cur.nodes);
    int level = -1;
    for (int l = cur.level - 1; l >= 0; --l) {
      if (counts.both[static_cast<size_t>(l)] > 0) {
        level = l;
        break;
      }
    }
    if (level < 0) break;
    const auto reach = ReachMarks(cur.level, cur.nodes);
    std::vector<size_t> nodes;
    for (size_t t = CompleteTree::FirstAt(level); t < CompleteTree::FirstAt(level + 1); ++t) {
      if (reach[2 * t] && reach[2 * t + 1]) nodes.push_back(t);
    }
    out.stages.push_back(PigeonholeLabel(tree, level, nodes, false));
  }

  // Most frequent stage label, lexicographically least on ties.
  std::map<SegmentLabel, std::vector<const UniformStage*>> by_label;
  for (auto it = out.stages.rbegin(); it != out.stages.rend(); ++it) {
    by_label[it->label].push_back(&*it);  // shallow to deep
  }
  auto chosen = by_label.begin();
  for (auto it = by_label.begin(); it != by_label.end(); ++it) {
    if (it->second.size() > chosen->second.size()) chosen = it;
  }
  const std::vector<const UniformStage*>& seq = chosen->second;
  out.label = chosen->first;
  out.depth = static_cast<int>(seq.size());
  out.embedding.assign(size_t{1} << (out.depth + 1), 0);
  out.embedding[1] = seq.front()->nodes.front();
  for (const auto* stage : seq) out.levels.push_back(stage->level);
  out.levels.push_back(seq.back()->level + 1);

  for (int r = 0; r < out.depth; ++r) {
    for (size_t o = CompleteTree::FirstAt(r); o < CompleteTree::FirstAt(r + 1); ++o) {
      const size_t host = out.embedding[o];
      for (size_t side = 0; side < 2; ++side) {
        const size_t child = 2 * host + side;
        size_t image = child;
        if (r + 1 < out.depth) {
          // Smallest node of the next chosen stage inside the child's subtree.
          const auto& targets = seq[static_cast<size_t>(r + 1)]->nodes;
          const int gap = seq[static_cast<size_t>(r + 1)]->level - CompleteTree::Level(child);
          const size_t lo = child << gap;
          auto it = std::lower_bound(targets.begin(), targets.end(), lo);
          if (it == targets.end() || !CompleteTree::InSubtree(child, *it)) {
            throw Error(ErrorCode::kInternal, "stage chain broken below node " +
                                                  std::to_string(host));
          }
          image = *it;
        }
        out.embedding[2 * o + side] = image;
      }
    }
  }
  return out;
}

bool IsUniformEmbedding(const CompleteTree& tree, const UniformSubtree& sub) {
  if (sub.embedding.size() != (size_t{1} << (sub.depth + 1)) ||
      sub.levels.size() != static_cast<size_t>(sub.depth) + 1) {
    return false;
  }
  for (size_t o = 1; o < sub.embedding.size(); ++o) {
    const size_t host = sub.embedding[o];
    if (host < 1 || host >= (size_t{1} << (tree.depth() + 1))) return false;
    const int r = CompleteTree::Level(o);
    if (CompleteTree::Level(host) != sub.levels[static_cast<size_t>(r)]) return false;
    if (r == sub.depth) continue;
    if (tree.is_leaf(host) || !tree.label(host) || *tree.label(host) != sub.label) {
      return false;
    }
    if (!CompleteTree::InSubtree(CompleteTree::Left(host), sub.embedding[2 * o]) ||
        !CompleteTree::InSubtree(CompleteTree::Right(host), sub.embedding[2 * o + 1])) {
      return false;
    }
  }
  return true;
}

std::vector<IntervalUnion> PathIntersections(const CompleteTree& tree) {
  std::vector<IntervalUnion> w(size_t{1} << (tree.depth() + 1));
  w[1] = tree.set(1) ? *tree.set(1) : IntervalUnion::Full();
  for (size_t t = 2; t < w.size(); ++t) {
    if (!tree.set(t)) {
      throw Error(ErrorCode::kMissingPayload,
                  "node " + std::to_string(t) + " has no set");
    }
    w[t] = w[CompleteTree::Parent(t)].Intersect(*tree.set(t));
  }
  return w;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FunctionClass& cls, const Rational& gamma, int depth,
              uint64_t budget)
      : cls_(cls), tree_(depth), g_(static_cast<size_t>(depth)), budget_(budget) {
    for (const auto& f : cls.functions()) {
      segments_.push_back(StepSegmentPartition(f, gamma));
    }
  }

  std::optional<CompleteTree> Run() {
    if (!Extend(0, {IntervalUnion::Full()})) return std::nullopt;
    tree_.set_functions(g_);
    return std::move(tree_);
  }

 private:
  bool Extend(int level, const std::vector<IntervalUnion>& w) {
    if (level == tree_.depth()) return true;
    const size_t first = CompleteTree::FirstAt(level);
    for (size_t f = 0; f < cls_.size(); ++f) {
      const auto& segs = segments_[f];
      const size_t big_k = segs.size();
      std::vector<SegmentLabel> labels;
      std::vector<IntervalUnion> next;
      bool ok = true;
      for (size_t i = 0; i < w.size() && ok; ++i) {
        if (++visits_ > budget_) return false;
        std::vector<IntervalUnion> meets;
        for (const auto& s : segs) meets.push_back(s.Intersect(w[i]));
        ok = false;
        for (size_t a = 0; a < big_k && !ok; ++a) {
          if (meets[a].empty()) continue;
          for (size_t b = a + 2; b < big_k; ++b) {
            if (meets[b].empty()) continue;
            labels.push_back({static_cast<int>(a + 1), static_cast<int>(b + 1)});
            next.push_back(std::move(meets[a]));
            next.push_back(std::move(meets[b]));
            ok = true;
            break;
          }
        }
      }
      if (!ok) continue;
      g_[static_cast<size_t>(level)] = f;
      for (size_t i = 0; i < w.size(); ++i) {
        const size_t t = first + i;
        const auto& lab = labels[i];
        tree_.set_label(t, lab);
        tree_.set_set(2 * t, segments_[f][static_cast<size_t>(lab.k - 1)]);
        tree_.set_set(2 * t + 1, segments_[f][static_cast<size_t>(lab.k2 - 1)]);
      }
      if (Extend(level + 1, next)) return true;
      if (visits_ > budget_) return false;
    }
    return false;
  }

  const FunctionClass& cls_;
  CompleteTree tree_;
  std::vector<size_t> g_;
  std::vector<std::vector<IntervalUnion>> segments_;
  uint64_t budget_;
  uint64_t visits_ = 0;
};

}  // namespace

std::optional<CompleteTree> BuildIntersectionTree(const FunctionClass& cls,
                                                  const Rational& gamma,
                                                  int depth, uint64_t budget) {
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 1");
  if (cls.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kRegularityUndefined,
                "intersection trees need a step class");
  }
  TreeBuilder builder(cls, gamma, depth, budget);
  return builder.Run();
}

bool VerifyIntersectionTree(const CompleteTree& tree, const FunctionClass& cls,
                            const Rational& gamma, std::span<const size_t> g) {
  if (cls.kind() != FunctionKind::kStep) {
    throw Error(ErrorCode::kRegularityUndefined,
                "intersection trees need a step class");
  }
  if (g.size() != static_cast<size_t>(tree.depth())) {
    throw Error(ErrorCode::kInvalidArgument, "need one function per level");
  }
  for (size_t idx : g) {
    if (idx >= cls.size()) {
      throw Error(ErrorCode::kInvalidArgument, "function index out of range");
    }
  }
  const std::vector<IntervalUnion> w = PathIntersections(tree);

  for (size_t t = 1; t < CompleteTree::FirstAt(tree.depth()); ++t) {
    const auto segs =
        StepSegmentPartition(cls[g[static_cast<size_t>(CompleteTree::Level(t))]], gamma);
    const IntervalUnion& left = *tree.set(2 * t);
    const IntervalUnion& right = *tree.set(2 * t + 1);
    if (const auto& label = tree.label(t)) {
      const int big_k = static_cast<int>(segs.size());
      if (label->k < 1 || label->k > big_k || label->k2 < 1 || label->k2 > big_k ||
          !NonAdjacent(label->k, label->k2) ||
          segs[static_cast<size_t>(label->k - 1)] != left ||
          segs[static_cast<size_t>(label->k2 - 1)] != right) {
        return false;
      }
      continue;
    }
    bool found = false;
    for (size_t a = 0; a < segs.size() && !found; ++a) {
      if (segs[a] != left) continue;
      for (size_t b = 0; b < segs.size(); ++b) {
        if (segs[b] == right && NonAdjacent(static_cast<int>(a), static_cast<int>(b))) {
          found = true;
          break;
        }
      }
    }
    if (!found) return false;
  }
  for (size_t t = 1; t < w.size(); ++t) {
    if (w[t].Measure().sign() <= 0) return false;
  }
  return true;
}

MaximalJoin MaximalJoinFromTree(const CompleteTree& tree,
                                const FunctionClass& cls,
                                const Rational& gamma) {
  if (!VerifyIntersectionTree(tree, cls, gamma, tree.functions())) {
    throw Error(ErrorCode::kInvalidArgument, "tree is not an intersection tree");
  }
  MaximalJoin out;
  out.subtree = ExtractUniformSubtree(tree, KOfGamma(gamma));
  out.label = out.subtree.label;
  std::vector<std::vector<IntervalUnion>> families;
  for (int r = 0; r < out.subtree.depth; ++r) {
    const size_t f = tree.functions()[static_cast<size_t>(out.subtree.levels[static_cast<size_t>(r)])];
    out.functions.push_back(f);
    families.push_back({StepSegment(cls[f], gamma, out.label.k),
                        StepSegment(cls[f], gamma, out.label.k2)});
  }
  out.cells = Join(families);
  const size_t expected = size_t{1} << out.subtree.depth;
  bool positive = out.cells.size() == expected;
  for (const auto& cell : out.cells) positive = positive && cell.cell.Measure().sign() > 0;
  if (!positive) {
    throw Error(ErrorCode::kInternal, "uniform subtree did not yield a full join");
  }
  return out;
}

ShatterCertificate ShatterFromMaximalJoin(const MaximalJoin& join,
                                          const FunctionClass& cls,
                                          const Rational& gamma) {
  const size_t n = join.functions.size();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two joined functions");
  }
  size_t used = 1;
  while (used * 2 <= n) used *= 2;
  std::vector<Function> members;
  for (size_t i = 0; i < used; ++i) members.push_back(cls[join.functions[i]]);
  const FunctionClass family(cls.name() + "[join]", std::move(members));
  ShatterCertificate cert = JoinShatter(family, join.label.k, join.label.k2, gamma);
  for (auto& idx : cert.selector) idx = join.functions[idx];
  return cert;
}

}  // namespace gapdim
