#include "calr/eval/cluster_quality.hpp"

#include "calr/core/error.hpp"

#include <map>
#include <set>

namespace calr::eval {
namespace {

double pairs(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n == 0 ? 0 : n - 1); }

}  // namespace

ClusterQuality cluster_quality(const ClusterAssignment& assignment, std::span<const int> gt_ids) {
  if (gt_ids.size() != assignment.size()) {
    throw InvalidArgument("cluster_quality: ground truth not aligned with assignment");
  }
  std::map<ClusterId, std::size_t> per_cluster;
  std::map<int, std::size_t> per_id;
  std::map<std::pair<ClusterId, int>, std::size_t> joint;
  std::map<int, std::set<ClusterId>> clusters_of_id;
  std::map<int, std::size_t> outliers_of_id;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int id = gt_ids[i];
    const ClusterId c = assignment[i];
    clusters_of_id[id];
    if (c == kOutlier) {
      ++outliers_of_id[id];
      continue;
    }
    ++per_cluster[c];
    ++per_id[id];
    ++joint[{c, id}];
    clusters_of_id[id].insert(c);
  }
  double same_cluster = 0.0, same_id = 0.0, both = 0.0;
  for (const auto& [c, n] : per_cluster) same_cluster += pairs(n);
  for (const auto& [id, n] : per_id) same_id += pairs(n);
  for (const auto& [key, n] : joint) both += pairs(n);

  ClusterQuality q;
  if (same_cluster > 0.0) q.pair_precision = both / same_cluster;
  if (same_id > 0.0) q.pair_recall = both / same_id;
  if (q.pair_precision && q.pair_recall && *q.pair_precision + *q.pair_recall > 0.0) {
    q.f_score = 2.0 * *q.pair_precision * *q.pair_recall / (*q.pair_precision + *q.pair_recall);
  }
  if (!clusters_of_id.empty()) {
    double total = 0.0;
    for (const auto& [id, cs] : clusters_of_id) {
      total += static_cast<double>(cs.size() + outliers_of_id[id]);
    }
    q.expansion = total / static_cast<double>(clusters_of_id.size());
  }
  return q;
}

}  // namespace calr::eval
