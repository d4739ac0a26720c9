#include "calr/core/numeric.hpp"
#include "calr/refine/pivot.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace calr;
using namespace calr::refine;

namespace {

std::vector<std::int64_t> iota_ids(int m) {
  std::vector<std::int64_t> ids(m);
  for (int i = 0; i < m; ++i) ids[i] = i;
  return ids;
}

Matrix line_distances(const std::vector<double>& xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(xs[i] - xs[j]);
  }
  return d;
}

}  // namespace

TEST(Pivot, EquidistantMembersAllPivots) {
  for (int m : {2, 5, 16}) {
    const double d = 0.7;
    Matrix dist = Matrix::Constant(m, m, d);
    dist.diagonal().setZero();
    const auto s = pivot_scores(dist, iota_ids(m));
    for (const auto& p : s) {
      EXPECT_NEAR(p.score, (m - 1) / (2 * d), 1e-12);
      EXPECT_TRUE(p.is_pivot);
    }
  }
}

TEST(Pivot, OneDimensionalWorkedExample) {
  const auto s = pivot_scores(line_distances({0, 1, 2, 4}), iota_ids(4));
  const double expect[4] = {0.71795, 0.82513, 0.79579, 0.59571};
  double mean = 0;
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(s[i].score, expect[i], 5e-6);
    mean += s[i].score / 4;
  }
  EXPECT_NEAR(mean, 0.733645, 5e-6);
  EXPECT_FALSE(s[0].is_pivot);
  EXPECT_TRUE(s[1].is_pivot);
  EXPECT_TRUE(s[2].is_pivot);
  EXPECT_FALSE(s[3].is_pivot);
}

TEST(Pivot, HalvingDistancesDoublesScores) {
  const auto a = pivot_scores(line_distances({0, 1, 2, 4, 7, 7.5}), iota_ids(6));
  const auto b = pivot_scores(line_distances({0, 0.5, 1, 2, 3.5, 3.75}), iota_ids(6));
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(b[i].score, 2 * a[i].score, 1e-12);
    EXPECT_EQ(a[i].is_pivot, b[i].is_pivot);
  }
}

TEST(Pivot, MatchesBruteForceOnRandomClusters) {
  Rng rng(1, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_index(25));
    const Matrix x = testutil::unit_rows(rng, m, 4);
    std::vector<std::int64_t> ids(m);
    for (int i = 0; i < m; ++i) ids[i] = 100 + i;
    const auto s = pivot_scores_from_features(x, ids);
    std::vector<double> dist_flat;
    double mean_dist = 0;
    int pairs = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        mean_dist += (x.row(i) - x.row(j)).norm();
        ++pairs;
      }
    }
    mean_dist /= pairs;
    const int t = std::min(15, m - 1);
    std::vector<double> score(m);
    for (int i = 0; i < m; ++i) {
      std::vector<double> d;
      for (int j = 0; j < m; ++j) {
        if (j != i) d.push_back((x.row(i) - x.row(j)).norm());
      }
      std::sort(d.begin(), d.end());
      for (int r = 0; r < t; ++r) score[i] += 1.0 / (d[r] + mean_dist);
    }
    double mean_score = 0;
    for (double v : score) mean_score += v / m;
    for (int i = 0; i < m; ++i) {
      EXPECT_NEAR(s[i].score, score[i], 1e-10);
      EXPECT_EQ(s[i].sample_id, ids[i]);
      if (std::abs(score[i] - mean_score) > 1e-9) EXPECT_EQ(s[i].is_pivot, score[i] >= mean_score);
    }
  }
}

TEST(Pivot, SingletonIsTrivialPivot) {
  const std::vector<std::int64_t> ids{42};
  const auto s = pivot_scores(Matrix::Zero(1, 1), ids);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s[0].is_pivot);
  EXPECT_EQ(s[0].sample_id, 42);
}

TEST(Pivot, NeighbourCapRespected) {
  // 20 members: only the 15 nearest contribute.
  std::vector<double> xs(20);
  for (int i = 0; i < 20; ++i) xs[i] = i;
  const auto s = pivot_scores(line_distances(xs), iota_ids(20));
  double mean = 0;
  int pairs = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      mean += j - i;
      ++pairs;
    }
  }
  mean /= pairs;
  double expect0 = 0;
  for (int j = 1; j <= 15; ++j) expect0 += 1.0 / (j + mean);
  EXPECT_NEAR(s[0].score, expect0, 1e-12);
}
