#pragma once

#include "calr/model/domain_classifier.hpp"
#include "calr/model/encoder.hpp"
#include "calr/model/memory_bank.hpp"

#include <functional>
#include <span>
#include <vector>

namespace calr::model {

struct ContrastiveResult {
  double loss = 0.0;
  Vector grad_query;
};

/// -w * log softmax(q . u / tau)[positive] over every bank entry. Bank entries
/// are constants; the gradient flows only into the query.
[[nodiscard]] ContrastiveResult contrastive_loss(const MemoryBank& bank,
                                                 const Eigen::Ref<const Vector>& query,
                                                 ClusterId positive, double weight = 1.0);

/// L_inter + beta * L_domain. Throws on non-finite inputs or negative beta.
[[nodiscard]] double total_loss(double inter, double domain, double beta);

/// Per-cluster contrastive weights w_k > 0, indexed by cluster id.
using ClusterWeightFn =
    std::function<std::vector<double>(const ClusterAssignment&, std::span<const CameraId>, int)>;

/// w_k = 1 for every cluster.
[[nodiscard]] std::vector<double> uniform_cluster_weights(const ClusterAssignment& assignment,
                                                          std::span<const CameraId> cameras,
                                                          int n_cameras);
/// Extension, not part of the method: w_k = distinct cameras in cluster k / n_cameras.
[[nodiscard]] std::vector<double> camera_diversity_weights(const ClusterAssignment& assignment,
                                                           std::span<const CameraId> cameras,
                                                           int n_cameras);

struct ObjectiveOptions {
  double beta = 1.0;
  double lambda = 1.0;
  bool use_domain = true;
};

/// Loss and gradients of one training batch:
///   L = mean_i w_i * contrastive_i + beta * mean_i CE_i
/// The encoder gradient of the domain term passes through the reversal layer,
/// so it is that of mean_i contrastive_i - lambda * beta * mean_i CE_i; the
/// classifier gradient is that of L itself.
struct BatchLoss {
  double inter = 0.0;   ///< mean weighted contrastive loss
  double domain = 0.0;  ///< mean cross-entropy (0 when the domain term is off)
  double total = 0.0;
  std::vector<double> grad_encoder;
  std::vector<double> grad_classifier;
  Matrix embeddings;    ///< encoder outputs, for memory updates
};

[[nodiscard]] BatchLoss batch_objective(const EncoderModel& encoder,
                                        const DomainClassifier& classifier, const MemoryBank& bank,
                                        const Matrix& inputs, std::span<const ClusterId> targets,
                                        std::span<const double> weights,
                                        std::span<const CameraId> cameras,
                                        const ObjectiveOptions& options);

}  // namespace calr::model
