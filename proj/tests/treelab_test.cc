#include <random>
#include <set>

#include <gtest/gtest.h>

#include "gapdim/error.h"
#include "gapdim/function_class.h"
#include "gapdim/shatter.h"
#include "gapdim/tree.h"
#include "test_util.h"

namespace gapdim {
namespace {

using testing::Q;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::vector<size_t> Range(size_t lo, size_t hi) {
  std::vector<size_t> out;
  for (size_t t = lo; t < hi; ++t) out.push_back(t);
  return out;
}

// Reach flag by walking the subtree explicitly.
bool ReachesBrute(int depth, size_t t, const std::set<size_t>& leaves) {
  if (CompleteTree::Level(t) == depth) return leaves.count(t) > 0;
  return ReachesBrute(depth, 2 * t, leaves) || ReachesBrute(depth, 2 * t + 1, leaves);
}

TEST(CompleteTree, HeapArithmetic) {
  EXPECT_EQ(CompleteTree::Level(1), 0);
  EXPECT_EQ(CompleteTree::Level(7), 2);
  EXPECT_EQ(CompleteTree::Level(8), 3);
  EXPECT_TRUE(CompleteTree::InSubtree(2, 9));
  EXPECT_TRUE(CompleteTree::InSubtree(2, 2));
  EXPECT_FALSE(CompleteTree::InSubtree(2, 12));
  CompleteTree t(3);
  EXPECT_EQ(t.node_count(), 15u);
  EXPECT_TRUE(t.is_leaf(8));
  EXPECT_FALSE(t.is_leaf(7));
}

TEST(Ptree, Examples) {
  const auto all = Range(4, 8);
  const auto w = FindPtreeWitness(2, all, Q("1"));
  EXPECT_EQ(w.u, 1);
  EXPECT_EQ(w.level, 1);
  EXPECT_EQ(w.nodes, (std::vector<size_t>{2, 3}));

  const auto left = Range(8, 12);
  const auto w2 = FindPtreeWitness(3, left, Q("1/2"));
  EXPECT_EQ(w2.u, 2);
  EXPECT_EQ(w2.level, 2);
  EXPECT_EQ(w2.nodes, (std::vector<size_t>{4, 5}));
  const auto counts = CountAncestors(3, left);
  EXPECT_EQ(counts.both[2], 2u);
  EXPECT_EQ(counts.both[1], 1u);

  const std::vector<size_t> two{4, 5};
  EXPECT_EQ(CodeOf([&] { FindPtreeWitness(2, two, Q("1/2")); }),
            ErrorCode::kPtreePreconditionViolated);
  EXPECT_EQ(CodeOf([&] { FindPtreeWitness(3, left, Q("3/4")); }),
            ErrorCode::kPtreePreconditionViolated);
  const std::vector<size_t> not_leaves{2, 3, 4, 5};
  EXPECT_EQ(CodeOf([&] { FindPtreeWitness(2, not_leaves, Q("1")); }),
            ErrorCode::kPtreePreconditionViolated);
}

class PtreeProperty : public ::testing::TestWithParam<int> {};

TEST_P(PtreeProperty, PostconditionsAndSumIdentity) {
  const int depth = GetParam();
  std::mt19937_64 rng(static_cast<uint64_t>(depth) * 31);
  const size_t first = size_t{1} << depth;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<size_t> all = Range(first, 2 * first);
    std::shuffle(all.begin(), all.end(), rng);
    std::uniform_int_distribution<size_t> size_d(4, first);
    all.resize(size_d(rng));
    std::sort(all.begin(), all.end());
    const std::set<size_t> leaves(all.begin(), all.end());

    const auto counts = CountAncestors(depth, all);
    for (int l = 0; l < depth; ++l) {
      size_t reach = 0;
      size_t both = 0;
      for (size_t t = size_t{1} << l; t < (size_t{2} << l); ++t) {
        reach += ReachesBrute(depth, t, leaves);
        both += ReachesBrute(depth, 2 * t, leaves) && ReachesBrute(depth, 2 * t + 1, leaves);
      }
      EXPECT_EQ(counts.reach[static_cast<size_t>(l)], reach);
      EXPECT_EQ(counts.both[static_cast<size_t>(l)], both);
    }
    for (int v = 1; v <= depth - 1; ++v) {
      size_t sum = counts.reach[static_cast<size_t>(depth - v)];
      for (int l = depth - v; l <= depth - 1; ++l) sum += counts.both[static_cast<size_t>(l)];
      EXPECT_EQ(sum, all.size());
    }

    for (const char* c_text : {"1/2", "1/4", "1/8"}) {
      const Rational c = Q(c_text);
      const Rational scaled = c * Rational(static_cast<int64_t>(first));
      if (scaled < Q("4") || Rational(static_cast<int64_t>(all.size())) < scaled) continue;
      const auto w = FindPtreeWitness(depth, all, c);
      EXPECT_GE(w.level, depth - w.u);
      EXPECT_LE(w.level, depth - 1);
      for (size_t t : w.nodes) {
        EXPECT_EQ(CompleteTree::Level(t), w.level);
        EXPECT_TRUE(ReachesBrute(depth, 2 * t, leaves));
        EXPECT_TRUE(ReachesBrute(depth, 2 * t + 1, leaves));
      }
      EXPECT_GE(Rational(static_cast<int64_t>(w.nodes.size() * 4 * static_cast<size_t>(depth))),
                scaled);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Depths, PtreeProperty, ::testing::Range(3, 11));

CompleteTree Labeled(int depth, SegmentLabel label) {
  CompleteTree tree(depth);
  for (size_t t = 1; t < CompleteTree::FirstAt(depth); ++t) tree.set_label(t, label);
  return tree;
}

TEST(UniformSubtree, AlreadyUniform) {
  for (int depth = 1; depth <= 7; ++depth) {
    const auto tree = Labeled(depth, {1, 3});
    const auto sub = ExtractUniformSubtree(tree, 3);
    EXPECT_EQ(sub.depth, depth);
    EXPECT_EQ(sub.label, (SegmentLabel{1, 3}));
    EXPECT_TRUE(IsUniformEmbedding(tree, sub));
    for (size_t o = 1; o < sub.embedding.size(); ++o) EXPECT_EQ(sub.embedding[o], o);
  }
}

TEST(UniformSubtree, DepthOne) {
  const auto tree = Labeled(1, {2, 1});
  const auto sub = ExtractUniformSubtree(tree, 2);
  EXPECT_EQ(sub.depth, 1);
  EXPECT_EQ(sub.embedding[1], 1u);
  EXPECT_EQ(sub.label, (SegmentLabel{2, 1}));
}

TEST(UniformSubtree, Errors) {
  CompleteTree tree(2);
  tree.set_label(1, {1, 3});
  tree.set_label(2, {1, 3});
  EXPECT_EQ(CodeOf([&] { ExtractUniformSubtree(tree, 3); }), ErrorCode::kMissingLabel);
  tree.set_label(3, {1, 5});
  EXPECT_EQ(CodeOf([&] { ExtractUniformSubtree(tree, 3); }), ErrorCode::kInvalidArgument);
}

TEST(UniformSubtree, StageBound) {
  for (int depth = 1; depth <= 12; ++depth) {
    EXPECT_EQ(FullJoinStageBound(depth, 2), 0);
    EXPECT_EQ(FullJoinStageBound(depth, 3), 0);
  }
  // 2^19 = 524288 > 4 * 4 * 8 * 160 = 20480, and r = 2 already fails.
  EXPECT_EQ(FullJoinStageBound(20, 2), 1);
  // K = 3: 4 * 4 * 27 * 360 = 155520 < 2^19; at L = 16, 16 * 27 * 288 > 2^15.
  EXPECT_EQ(FullJoinStageBound(20, 3), 1);
  EXPECT_EQ(FullJoinStageBound(16, 3), 0);
}

class UniformSubtreeProperty : public ::testing::TestWithParam<int> {};

TEST_P(UniformSubtreeProperty, RandomLabelings) {
  const int depth = GetParam();
  std::mt19937_64 rng(static_cast<uint64_t>(depth) + 1000);
  for (int big_k : {2, 3}) {
    std::uniform_int_distribution<int> lab(1, big_k);
    for (int trial = 0; trial < 10; ++trial) {
      CompleteTree tree(depth);
      for (size_t t = 1; t < CompleteTree::FirstAt(depth); ++t) {
        tree.set_label(t, {lab(rng), lab(rng)});
      }
      const auto sub = ExtractUniformSubtree(tree, big_k);
      EXPECT_TRUE(IsUniformEmbedding(tree, sub));
      EXPECT_GE(sub.depth, 1);
      EXPECT_GE(sub.depth * big_k * big_k, sub.stage_bound);
      const auto oracle = testing::OracleUniformDepths(tree, sub.label);
      EXPECT_LE(sub.depth, oracle[1]);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Depths, UniformSubtreeProperty, ::testing::Range(2, 11));

TEST(IntersectionTree, RampDepthOne) {
  const auto cls = Ramp(8);
  const auto tree = BuildIntersectionTree(cls, Q("1/4"), 1);
  ASSERT_TRUE(tree.has_value());
  EXPECT_EQ(tree->label(1), (SegmentLabel{1, 3}));
  EXPECT_EQ(*tree->set(2), IntervalUnion::Parse("[0,1/4)"));
  EXPECT_EQ(*tree->set(3), IntervalUnion::Parse("[1/2,3/4)"));
  EXPECT_TRUE(VerifyIntersectionTree(*tree, cls, Q("1/4"), tree->functions()));
}

TEST(IntersectionTree, ConstantsFail) {
  const FunctionClass constants(
      "c", {Function::Constant(Q("0")), Function::Constant(Q("1/2")), Function::Constant(Q("1"))});
  EXPECT_FALSE(BuildIntersectionTree(constants, Q("1/4"), 1).has_value());
}

TEST(IntersectionTree, FullJoinFamily) {
  const auto cls = FullJoinFamily(2, 1, 3, Q("1/5"));
  const auto tree = BuildIntersectionTree(cls, Q("1/5"), 2);
  ASSERT_TRUE(tree.has_value());
  for (size_t t = 1; t < 4; ++t) EXPECT_EQ(tree->label(t), (SegmentLabel{1, 3}));
  EXPECT_TRUE(VerifyIntersectionTree(*tree, cls, Q("1/5"), tree->functions()));
}

TEST(IntersectionTree, VerifierRejects) {
  const auto cls = Ramp(8);
  const std::vector<size_t> g{0};
  CompleteTree adjacent(1);
  adjacent.set_label(1, {2, 3});
  adjacent.set_set(2, IntervalUnion::Parse("[1/4,1/2)"));
  adjacent.set_set(3, IntervalUnion::Parse("[1/2,3/4)"));
  EXPECT_FALSE(VerifyIntersectionTree(adjacent, cls, Q("1/4"), g));

  // Depth 2 with g = (0, 0): the path through s_1 then s_3 is empty.
  CompleteTree empty_path(2);
  empty_path.set_label(1, {1, 3});
  empty_path.set_label(2, {1, 3});
  empty_path.set_label(3, {1, 3});
  for (size_t t : {2u, 4u, 6u}) empty_path.set_set(t, IntervalUnion::Parse("[0,1/4)"));
  for (size_t t : {3u, 5u, 7u}) empty_path.set_set(t, IntervalUnion::Parse("[1/2,3/4)"));
  const std::vector<size_t> g2{0, 0};
  EXPECT_FALSE(VerifyIntersectionTree(empty_path, cls, Q("1/4"), g2));

  CompleteTree missing(1);
  missing.set_label(1, {1, 3});
  missing.set_set(2, IntervalUnion::Parse("[0,1/4)"));
  EXPECT_EQ(CodeOf([&] { VerifyIntersectionTree(missing, cls, Q("1/4"), g); }),
            ErrorCode::kMissingPayload);
}

TEST(IntersectionTree, BuildAlwaysVerifies) {
  std::mt19937_64 rng(77);
  int built = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Function> fs;
    for (int f = 0; f < 4; ++f) fs.push_back(testing::RandomStepFunction(rng, 16, 8, 10));
    const FunctionClass cls("r", std::move(fs));
    for (int depth = 1; depth <= 3; ++depth) {
      const auto tree = BuildIntersectionTree(cls, Q("1/4"), depth);
      if (!tree) continue;
      ++built;
      EXPECT_TRUE(VerifyIntersectionTree(*tree, cls, Q("1/4"), tree->functions()));
    }
  }
  EXPECT_GT(built, 0);
}

TEST(MaximalJoin, FullJoinFamilyTree) {
  const auto cls = FullJoinFamily(2, 1, 3, Q("1/5"));
  const auto tree = BuildIntersectionTree(cls, Q("1/5"), 2);
  ASSERT_TRUE(tree.has_value());
  const auto join = MaximalJoinFromTree(*tree, cls, Q("1/5"));
  EXPECT_EQ(join.functions.size(), 2u);
  EXPECT_EQ(join.label, (SegmentLabel{1, 3}));
  ASSERT_EQ(join.cells.size(), 4u);
  // Two functions of the family split [0,1) into four cells of 4/16 each.
  for (const auto& c : join.cells) EXPECT_EQ(c.cell.Measure(), Q("1/4"));

  const auto cert = ShatterFromMaximalJoin(join, cls, Q("1/5"));
  EXPECT_EQ(cert.size(), 1u);
  EXPECT_TRUE(VerifyCertificate(cls, Q("1/10"), cert));
}

TEST(MaximalJoin, DepthOne) {
  const auto cls = Ramp(8);
  const auto tree = BuildIntersectionTree(cls, Q("1/4"), 1);
  ASSERT_TRUE(tree.has_value());
  const auto join = MaximalJoinFromTree(*tree, cls, Q("1/4"));
  EXPECT_EQ(join.functions.size(), 1u);
  EXPECT_EQ(join.cells.size(), 2u);
}

TEST(MaximalJoin, LargerFamilyShattersLogPoints) {
  const auto cls = FullJoinFamily(3, 1, 3, Q("1/5"));
  const auto tree = BuildIntersectionTree(cls, Q("1/5"), 4);
  ASSERT_TRUE(tree.has_value());
  const auto join = MaximalJoinFromTree(*tree, cls, Q("1/5"));
  EXPECT_EQ(join.functions.size(), 4u);
  EXPECT_EQ(join.cells.size(), 16u);
  const auto cert = ShatterFromMaximalJoin(join, cls, Q("1/5"));
  EXPECT_EQ(cert.size(), 2u);
  EXPECT_TRUE(VerifyCertificate(cls, Q("1/10"), cert));
}

}  // namespace
}  // namespace gapdim
