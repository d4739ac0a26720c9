#include "calr/refine/pivot.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace calr::refine {

std::vector<PivotScore> pivot_scores(const Matrix& distances,
                                     std::span<const std::int64_t> sample_ids, int max_neighbors) {
  const auto m = static_cast<std::size_t>(distances.rows());
  if (m == 0 || static_cast<std::size_t>(distances.cols()) != m || sample_ids.size() != m) {
    throw InvalidArgument("pivot_scores: need a square distance matrix aligned with sample ids");
  }
  if (max_neighbors < 1) throw InvalidArgument("pivot_scores: max_neighbors must be >= 1");
  std::vector<PivotScore> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i].sample_id = sample_ids[i];
  if (m == 1) {
    out[0].is_pivot = true;
    return out;
  }

  double pair_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pair_sum += distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const double mean_dist = pair_sum / static_cast<double>(m * (m - 1) / 2);
  if (mean_dist <= 0.0) {
    for (auto& s : out) {
      s.score = std::numeric_limits<double>::infinity();
      s.is_pivot = true;
    }
    return out;
  }

  const auto t = std::min<std::size_t>(static_cast<std::size_t>(max_neighbors), m - 1);
  std::vector<std::pair<double, std::size_t>> nbr;
  nbr.reserve(m - 1);
  double score_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    nbr.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) nbr.emplace_back(distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), j);
    }
    std::partial_sort(nbr.begin(), nbr.begin() + static_cast<long>(t), nbr.end());
    double s = 0.0;
    for (std::size_t r = 0; r < t; ++r) s += 1.0 / (nbr[r].first + mean_dist);
    out[i].score = s;
    score_sum += s;
  }
  const double mean_score = score_sum / static_cast<double>(m);
  // Relative slack absorbs the rounding of the mean when all scores are equal.
  const double cut = mean_score * (1.0 - 1e-12);
  for (auto& s : out) s.is_pivot = s.score >= cut;
  return out;
}

std::vector<PivotScore> pivot_scores_from_features(const Matrix& member_features,
                                                   std::span<const std::int64_t> sample_ids,
                                                   int max_neighbors) {
  if (member_features.rows() == 1) {
    return pivot_scores(Matrix::Zero(1, 1), sample_ids, max_neighbors);
  }
  return pivot_scores(pairwise_distance(member_features), sample_ids, max_neighbors);
}

}  // namespace calr::refine
