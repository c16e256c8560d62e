#ifndef GAPDIM_TREE_H_
#define GAPDIM_TREE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gapdim/function_class.h"
#include "gapdim/interval_union.h"
#include "gapdim/rational.h"
#include "gapdim/shatter.h"

namespace gapdim {

// Ordered segment pair (k, k2) attached to an internal node: the left child
// carries s_k, the right child s_k2.
struct SegmentLabel {
  int k = 0;
  int k2 = 0;
  friend auto operator<=>(const SegmentLabel&, const SegmentLabel&) = default;
};

// Complete binary tree of depth L in heap order: root 1, children 2t and
// 2t+1, level r holds nodes [2^r, 2^(r+1)).
class CompleteTree {
 public:
  explicit CompleteTree(int depth);

  int depth() const { return depth_; }
  size_t node_count() const { return labels_.size() - 1; }

  static size_t Left(size_t t) { return 2 * t; }
  static size_t Right(size_t t) { return 2 * t + 1; }
  static size_t Parent(size_t t) { return t / 2; }
  static int Level(size_t t);
  static size_t FirstAt(int level) { return size_t{1} << level; }
  // True when `node` lies in the subtree rooted at `root` (node == root
  // included).
  static bool InSubtree(size_t root, size_t node);

  bool is_leaf(size_t t) const { return Level(t) == depth_; }

  const std::optional<SegmentLabel>& label(size_t t) const { return labels_[t]; }
  void set_label(size_t t, SegmentLabel label) { labels_[t] = label; }
  const std::optional<IntervalUnion>& set(size_t t) const { return sets_[t]; }
  void set_set(size_t t, IntervalUnion set) { sets_[t] = std::move(set); }

  // Function index g_{l+1} used for the children of level-l nodes, when the
  // tree came from the intersection-tree builder.
  const std::vector<size_t>& functions() const { return functions_; }
  void set_functions(std::vector<size_t> g) { functions_ = std::move(g); }

 private:
  int depth_;
  std::vector<std::optional<SegmentLabel>> labels_;  // index 0 unused
  std::vector<std::optional<IntervalUnion>> sets_;
  std::vector<size_t> functions_;
};

// Per-level counts for a leaf set S: reach[l] (m_l) counts level-l nodes that
// are in S or have a descendant in S; both[l] (n_l) counts level-l nodes whose
// two children both reach S.
struct AncestorCounts {
  std::vector<size_t> reach;
  std::vector<size_t> both;
};

AncestorCounts CountAncestors(int depth, std::span<const size_t> leaves);

struct PtreeWitness {
  int level = 0;
  std::vector<size_t> nodes;
  int u = 0;
};

// Among levels [L-u, L-1] with u = ceil(log2(1/c) + 1), picks the level with
// the most nodes whose two children both reach S (smallest level on ties).
// Requires |S| >= c 2^L >= 4 and 0 < c <= 1; leaves are heap indices at level
// L. The returned set satisfies |S'| >= c 2^L / (4L), checked exactly.
PtreeWitness FindPtreeWitness(int depth, std::span<const size_t> leaves,
                              const Rational& c);

// One stage of the label-uniformization: a node set at a single level, all
// nodes sharing one label.
struct UniformStage {
  int level = 0;
  SegmentLabel label;
  std::vector<size_t> nodes;
  bool guaranteed = false;  // produced by the pigeonhole lemma (|S| >= 4)
};

struct UniformSubtree {
  int depth = 0;
  SegmentLabel label;
  // embedding[o] is the node of the original tree hosting node o of the
  // embedded tree (heap order, index 0 unused).
  std::vector<size_t> embedding;
  // Original level of each embedded level 0..depth.
  std::vector<int> levels;
  std::vector<UniformStage> stages;
  // Largest r >= 1 with 2^{L-1} / (4^r K^{2r+1} (2 L K^2)^{r(r+1)/2}) > 4,
  // or 0 when no r qualifies.
  int stage_bound = 0;
};

int FullJoinStageBound(int depth, int big_k);

// Extracts an embedded complete subtree whose internal nodes all carry the
// same label. Every internal node of `tree` must be labeled with a pair in
// [K]^2 (kMissingLabel otherwise).
UniformSubtree ExtractUniformSubtree(const CompleteTree& tree, int big_k);

// Structural check of an embedding: internal images carry `label`, children
// images sit below the matching child of the parent image, levels are
// uniform.
bool IsUniformEmbedding(const CompleteTree& tree, const UniformSubtree& sub);

inline constexpr uint64_t kDefaultBuildBudget = 1'000'000;

// Greedy construction with backtracking over the per-level function choice.
// For each level l it looks for one function g_{l+1} such that every level-l
// node has a non-adjacent segment pair (k < k2, lexicographically least) whose
// members both meet W_t in positive measure. Returns nullopt when no tree is
// found or the node-visit budget runs out.
std::optional<CompleteTree> BuildIntersectionTree(
    const FunctionClass& cls, const Rational& gamma, int depth,
    uint64_t budget = kDefaultBuildBudget);

// (a) children of every internal node carry non-adjacent segments of
// g_{l+1} = cls[g[l]]; (b) every path intersection W_t has positive measure.
// Throws kMissingPayload if a non-root node has no set.
bool VerifyIntersectionTree(const CompleteTree& tree, const FunctionClass& cls,
                            const Rational& gamma, std::span<const size_t> g);

// W_t for every node (index 0 unused); the root's set defaults to [0,1).
std::vector<IntervalUnion> PathIntersections(const CompleteTree& tree);

struct MaximalJoin {
  std::vector<size_t> functions;  // h_0 .. h_{N-1} as class indices
  SegmentLabel label;
  std::vector<JoinCell> cells;    // 2^N cells, each of positive measure
  UniformSubtree subtree;
};

MaximalJoin MaximalJoinFromTree(const CompleteTree& tree,
                                const FunctionClass& cls,
                                const Rational& gamma);

// Lemma-join shattering from a maximal join over N functions: uses the first
// 2^floor(log2 N) of them and certifies dim_{gamma/2} >= floor(log2 N).
ShatterCertificate ShatterFromMaximalJoin(const MaximalJoin& join,
                                          const FunctionClass& cls,
                                          const Rational& gamma);

}  // namespace gapdim

#endif  // GAPDIM_TREE_H_
