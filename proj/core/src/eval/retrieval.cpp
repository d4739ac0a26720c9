#include "calr/eval/retrieval.hpp"

#include "calr/core/error.hpp"

#include <algorithm>
#include <numeric>

namespace calr::eval {

RetrievalResult evaluate_ranking(const RetrievalSet& query, const RetrievalSet& gallery,
                                 int max_rank) {
  const auto nq = static_cast<std::size_t>(query.embeddings.rows());
  const auto ng = static_cast<std::size_t>(gallery.embeddings.rows());
  if (query.ids.size() != nq || query.cameras.size() != nq || gallery.ids.size() != ng ||
      gallery.cameras.size() != ng) {
    throw InvalidArgument("evaluate_ranking: labels not aligned with embeddings");
  }
  if (max_rank < 1) throw InvalidArgument("evaluate_ranking: max_rank must be >= 1");
  if (nq > 0 && query.embeddings.cols() != gallery.embeddings.cols()) {
    throw InvalidArgument("evaluate_ranking: query and gallery dims differ");
  }

  RetrievalResult r;
  std::vector<double> hits(static_cast<std::size_t>(max_rank), 0.0);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(ng);
  double ap_sum = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    order.clear();
    for (std::size_t g = 0; g < ng; ++g) {
      if (gallery.ids[g] == query.ids[q] && gallery.cameras[g] == query.cameras[q]) continue;
      const double d = (query.embeddings.row(static_cast<Eigen::Index>(q)) -
                        gallery.embeddings.row(static_cast<Eigen::Index>(g))).norm();
      order.emplace_back(d, g);
    }
    std::sort(order.begin(), order.end());
    double n_rel = 0.0, precision_sum = 0.0;
    std::ptrdiff_t first = -1;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (gallery.ids[order[k].second] != query.ids[q]) continue;
      n_rel += 1.0;
      precision_sum += n_rel / static_cast<double>(k + 1);
      if (first < 0) first = static_cast<std::ptrdiff_t>(k);
    }
    if (first < 0) {
      ++r.n_unanswerable;
      continue;
    }
    ++r.n_queries;
    ap_sum += precision_sum / n_rel;
    for (auto k = static_cast<std::size_t>(first); k < hits.size(); ++k) hits[k] += 1.0;
  }
  r.cmc.assign(hits.size(), 0.0);
  if (r.n_queries > 0) {
    r.mAP = ap_sum / static_cast<double>(r.n_queries);
    for (std::size_t k = 0; k < hits.size(); ++k) r.cmc[k] = hits[k] / static_cast<double>(r.n_queries);
  }
  return r;
}

RetrievalResult retrieval_eval(const model::EncoderModel& encoder, const EmbeddingDataset& dataset,
                               const synth::QueryGallerySplit& split, int max_rank) {
  auto side = [&](const std::vector<std::size_t>& rows) {
    RetrievalSet s;
    Matrix x(static_cast<Eigen::Index>(rows.size()), dataset.features().cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = dataset.features().row(static_cast<Eigen::Index>(rows.at(r)));
      const auto& sample = dataset.samples()[rows[r]];
      if (!sample.gt_id) throw InvalidArgument("retrieval_eval: sample without ground-truth id");
      s.ids.push_back(*sample.gt_id);
      s.cameras.push_back(sample.camera_id);
    }
    s.embeddings = rows.empty() ? x : encoder.embed(x);
    return s;
  };
  return evaluate_ranking(side(split.query), side(split.gallery), max_rank);
}

}  // namespace calr::eval
