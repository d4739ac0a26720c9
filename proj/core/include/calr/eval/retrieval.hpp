#pragma once

#include "calr/core/types.hpp"
#include "calr/model/encoder.hpp"
#include "calr/synthgen/synthgen.hpp"

#include <span>
#include <vector>

namespace calr::eval {

struct RetrievalResult {
  double mAP = 0.0;
  std::vector<double> cmc;  ///< cmc[k-1] = rank-k accuracy
  std::size_t n_queries = 0;    ///< answerable queries averaged over
  std::size_t n_unanswerable = 0;
};

/// Labelled embeddings for one side of a retrieval evaluation.
struct RetrievalSet {
  Matrix embeddings;
  std::vector<int> ids;
  std::vector<CameraId> cameras;
};

/// Ranks the gallery by ascending Euclidean distance for each query (ties by
/// gallery order), drops gallery entries sharing both id and camera with the
/// query, and scores the rest. AP averages precision@k over the relevant
/// positions. Queries without any remaining relevant entry are skipped and
/// counted in n_unanswerable.
[[nodiscard]] RetrievalResult evaluate_ranking(const RetrievalSet& query, const RetrievalSet& gallery,
                                               int max_rank = 20);

/// Encodes the split's query and gallery rows of `dataset` with `encoder`.
[[nodiscard]] RetrievalResult retrieval_eval(const model::EncoderModel& encoder,
                                             const EmbeddingDataset& dataset,
                                             const synth::QueryGallerySplit& split,
                                             int max_rank = 20);

}  // namespace calr::eval
