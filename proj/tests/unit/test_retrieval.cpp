#include "calr/eval/retrieval.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace calr;
using namespace calr::eval;

namespace {

RetrievalSet line_set(const std::vector<double>& xs, std::vector<int> ids, std::vector<CameraId> cams) {
  RetrievalSet s;
  s.embeddings.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) s.embeddings(static_cast<Eigen::Index>(i), 0) = xs[i];
  s.ids = std::move(ids);
  s.cameras = std::move(cams);
  return s;
}

// Direct reading: sort by distance (stable), filter, score.
RetrievalResult brute(const RetrievalSet& q, const RetrievalSet& g, int max_rank) {
  RetrievalResult r;
  r.cmc.assign(static_cast<std::size_t>(max_rank), 0.0);
  double ap_sum = 0;
  for (Eigen::Index i = 0; i < q.embeddings.rows(); ++i) {
    std::vector<std::size_t> order(g.ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) d[j] = (q.embeddings.row(i) - g.embeddings.row(j)).norm();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });
    std::vector<bool> hit;
    for (auto j : order) {
      if (g.ids[j] == q.ids[i] && g.cameras[j] == q.cameras[i]) continue;
      hit.push_back(g.ids[j] == q.ids[i]);
    }
    const long n_rel = std::count(hit.begin(), hit.end(), true);
    if (n_rel == 0) {
      ++r.n_unanswerable;
      continue;
    }
    ++r.n_queries;
    double ap = 0;
    long found = 0;
    std::size_t first = hit.size();
    for (std::size_t k = 0; k < hit.size(); ++k) {
      if (!hit[k]) continue;
      if (first == hit.size()) first = k;
      ap += static_cast<double>(++found) / static_cast<double>(k + 1);
    }
    ap_sum += ap / static_cast<double>(n_rel);
    for (std::size_t k = first; k < r.cmc.size(); ++k) r.cmc[k] += 1;
  }
  if (r.n_queries) {
    r.mAP = ap_sum / static_cast<double>(r.n_queries);
    for (auto& c : r.cmc) c /= static_cast<double>(r.n_queries);
  }
  return r;
}

}  // namespace

TEST(Retrieval, AveragePrecisionWorkedExample) {
  // Relevant items at ranks 1 and 3.
  const auto q = line_set({0.0}, {1}, {0});
  const auto g = line_set({0.1, 0.2, 0.3, 0.4}, {1, 2, 1, 3}, {1, 1, 1, 1});
  const auto r = evaluate_ranking(q, g, 4);
  EXPECT_NEAR(r.mAP, 0.83333, 5e-6);
  EXPECT_EQ(r.cmc[0], 1.0);
}

TEST(Retrieval, SameCameraSameIdExcluded) {
  const auto q = line_set({0.0}, {1}, {0});
  const auto g = line_set({0.0, 0.1, 0.2}, {1, 2, 1}, {0, 1, 1});
  const auto r = evaluate_ranking(q, g, 3);
  EXPECT_NEAR(r.mAP, 0.5, 1e-15);
  EXPECT_EQ(r.cmc[0], 0.0);
  EXPECT_EQ(r.cmc[1], 1.0);
}

TEST(Retrieval, UnanswerableQueriesSkipped) {
  const auto q = line_set({0.0, 5.0}, {1, 9}, {0, 0});
  const auto g = line_set({0.1, 0.2}, {1, 9}, {1, 0});
  const auto r = evaluate_ranking(q, g, 2);
  EXPECT_EQ(r.n_queries, 1u);
  EXPECT_EQ(r.n_unanswerable, 1u);
  EXPECT_EQ(r.mAP, 1.0);
}

TEST(Retrieval, PerfectSeparationScoresOne) {
  Rng rng(1, 0);
  RetrievalSet q, g;
  q.embeddings.resize(10, 3);
  g.embeddings.resize(30, 3);
  for (int i = 0; i < 10; ++i) {
    q.embeddings.row(i) << 10.0 * i, 0, 0;
    q.ids.push_back(i);
    q.cameras.push_back(0);
    for (int k = 0; k < 3; ++k) {
      g.embeddings.row(3 * i + k) << 10.0 * i + 0.1 * rng.normal(), 0.1 * rng.normal(), 0;
      g.ids.push_back(i);
      g.cameras.push_back(1 + k);
    }
  }
  const auto r = evaluate_ranking(q, g, 5);
  EXPECT_EQ(r.mAP, 1.0);
  for (double c : r.cmc) EXPECT_EQ(c, 1.0);
}

TEST(Retrieval, MatchesBruteForce) {
  Rng rng(2, 0);
  for (int t = 0; t < 100; ++t) {
    RetrievalSet q, g;
    const int nq = 1 + static_cast<int>(rng.uniform_index(8));
    const int ng = 1 + static_cast<int>(rng.uniform_index(25));
    q.embeddings = testutil::gaussian(rng, nq, 3);
    g.embeddings = testutil::gaussian(rng, ng, 3);
    for (int i = 0; i < nq; ++i) {
      q.ids.push_back(static_cast<int>(rng.uniform_index(4)));
      q.cameras.push_back(static_cast<int>(rng.uniform_index(3)));
    }
    for (int i = 0; i < ng; ++i) {
      g.ids.push_back(static_cast<int>(rng.uniform_index(4)));
      g.cameras.push_back(static_cast<int>(rng.uniform_index(3)));
    }
    const auto a = evaluate_ranking(q, g, 10);
    const auto b = brute(q, g, 10);
    EXPECT_EQ(a.n_queries, b.n_queries);
    EXPECT_NEAR(a.mAP, b.mAP, 1e-12);
    ASSERT_EQ(a.cmc.size(), b.cmc.size());
    for (std::size_t k = 0; k < a.cmc.size(); ++k) {
      EXPECT_NEAR(a.cmc[k], b.cmc[k], 1e-12);
      if (k) EXPECT_GE(a.cmc[k], a.cmc[k - 1]);
    }
  }
}

TEST(Retrieval, InvariantToRigidMotion) {
  Rng rng(3, 0);
  RetrievalSet q, g;
  q.embeddings = testutil::gaussian(rng, 6, 2);
  g.embeddings = testutil::gaussian(rng, 20, 2);
  for (int i = 0; i < 6; ++i) {
    q.ids.push_back(i % 3);
    q.cameras.push_back(0);
  }
  for (int i = 0; i < 20; ++i) {
    g.ids.push_back(i % 3);
    g.cameras.push_back(1);
  }
  Eigen::Matrix2d rot;
  rot << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  auto q2 = q, g2 = g;
  q2.embeddings = (q.embeddings * rot.transpose()).rowwise() + Eigen::RowVector2d(3, -1);
  g2.embeddings = (g.embeddings * rot.transpose()).rowwise() + Eigen::RowVector2d(3, -1);
  EXPECT_NEAR(evaluate_ranking(q, g).mAP, evaluate_ranking(q2, g2).mAP, 1e-12);
}
