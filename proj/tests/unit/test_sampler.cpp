#include "calr/core/error.hpp"
#include "calr/pipeline/sampler.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace calr;
using namespace calr::pipeline;

namespace {
ClusterAssignment labels(std::vector<ClusterId> l) { return ClusterAssignment(std::move(l), AssignmentScope::global()); }
}  // namespace

TEST(Sampler, BatchShapeAndTargets) {
  // Cluster 0: 6 members, 1: 2 members, 2: 4 members, plus outliers.
  const auto a = labels({0, 0, 0, 0, 0, 0, 1, 1, 2, 2, 2, 2, kOutlier, kOutlier});
  Rng rng(1, 0);
  const auto batches = make_balanced_batches(a, {0, 1, 2}, 2, 4, 9, rng);
  ASSERT_EQ(batches.size(), 9u);
  std::map<ClusterId, int> draws;
  for (const auto& b : batches) {
    ASSERT_EQ(b.rows.size(), 8u);
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
      EXPECT_EQ(a[b.rows[i]], b.targets[i]);
      EXPECT_NE(a[b.rows[i]], kOutlier);
    }
    for (std::size_t i = 0; i < b.rows.size(); i += 4) ++draws[b.targets[i]];
  }
  // 18 draws over 3 clusters in full shuffled rounds.
  for (ClusterId c : {0, 1, 2}) EXPECT_EQ(draws[c], 6);
}

TEST(Sampler, WithoutReplacementWhenLargeEnough) {
  const auto a = labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  Rng rng(2, 0);
  for (const auto& b : make_balanced_batches(a, {0, 1}, 2, 4, 20, rng)) {
    for (std::size_t i = 0; i < b.rows.size(); i += 4) {
      const std::set<std::size_t> distinct(b.rows.begin() + static_cast<long>(i), b.rows.begin() + static_cast<long>(i + 4));
      EXPECT_EQ(distinct.size(), 4u);
    }
  }
}

TEST(Sampler, SkipsIneligibleClusters) {
  const auto a = labels({0, 0, 1, 1, 2, 2});
  Rng rng(3, 0);
  for (const auto& b : make_balanced_batches(a, {1}, 4, 2, 5, rng)) {
    EXPECT_EQ(b.rows.size(), 2u);
    for (auto t : b.targets) EXPECT_EQ(t, 1);
  }
}

TEST(Sampler, Deterministic) {
  const auto a = labels({0, 0, 0, 1, 1, 2, 2, 2, 2});
  Rng r1(4, 7), r2(4, 7);
  const auto x = make_balanced_batches(a, {0, 1, 2}, 2, 3, 6, r1);
  const auto y = make_balanced_batches(a, {0, 1, 2}, 2, 3, 6, r2);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].rows, y[i].rows);
}

TEST(Sampler, RejectsBadArguments) {
  const auto a = labels({0, 0, kOutlier});
  Rng rng(5, 0);
  EXPECT_THROW((void)make_balanced_batches(a, {}, 1, 1, 1, rng), InvalidArgument);
  EXPECT_THROW((void)make_balanced_batches(a, {3}, 1, 1, 1, rng), InvalidArgument);
  EXPECT_THROW((void)make_balanced_batches(a, {0}, 0, 1, 1, rng), InvalidArgument);
}
