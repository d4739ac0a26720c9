#include "calr/model/losses.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <set>
#include <string>

namespace calr::model {

ContrastiveResult contrastive_loss(const MemoryBank& bank, const Eigen::Ref<const Vector>& query,
                                   ClusterId positive, double weight) {
  if (!bank.contains(positive)) {
    throw InvalidArgument("contrastive_loss: positive cluster " + std::to_string(positive) +
                          " is not in the memory bank");
  }
  if (query.size() != bank.dim()) {
    throw InvalidArgument("contrastive_loss: query dim does not match the memory bank");
  }
  const auto pos = static_cast<Eigen::Index>(bank.row_of(positive));
  const double tau = bank.temperature();
  const Vector logits = bank.entries() * query / tau;
  const double mx = logits.maxCoeff();
  const Vector e = (logits.array() - mx).exp().matrix();
  const double z = e.sum();

  ContrastiveResult r;
  r.loss = weight * (mx + std::log(z) - logits[pos]);
  Vector coeff = e / z;
  coeff[pos] -= 1.0;
  r.grad_query = (weight / tau) * (bank.entries().transpose() * coeff);
  return r;
}

double total_loss(double inter, double domain, double beta) {
  if (!std::isfinite(inter) || !std::isfinite(domain) || !std::isfinite(beta)) {
    throw InvalidArgument("total_loss: non-finite input");
  }
  if (beta < 0.0) throw InvalidArgument("total_loss: beta must be >= 0");
  return inter + beta * domain;
}

std::vector<double> uniform_cluster_weights(const ClusterAssignment& assignment,
                                            std::span<const CameraId>, int) {
  return std::vector<double>(static_cast<std::size_t>(assignment.n_clusters()), 1.0);
}

std::vector<double> camera_diversity_weights(const ClusterAssignment& assignment,
                                             std::span<const CameraId> cameras, int n_cameras) {
  if (cameras.size() != assignment.size() || n_cameras < 1) {
    throw InvalidArgument("camera_diversity_weights: camera labels not aligned with assignment");
  }
  std::vector<std::set<CameraId>> seen(static_cast<std::size_t>(assignment.n_clusters()));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != kOutlier) seen[static_cast<std::size_t>(assignment[i])].insert(cameras[i]);
  }
  std::vector<double> w(seen.size());
  for (std::size_t k = 0; k < seen.size(); ++k) {
    w[k] = static_cast<double>(seen[k].size()) / static_cast<double>(n_cameras);
  }
  return w;
}

BatchLoss batch_objective(const EncoderModel& encoder, const DomainClassifier& classifier,
                          const MemoryBank& bank, const Matrix& inputs,
                          std::span<const ClusterId> targets, std::span<const double> weights,
                          std::span<const CameraId> cameras, const ObjectiveOptions& options) {
  const auto b = static_cast<std::size_t>(inputs.rows());
  if (b == 0 || targets.size() != b || weights.size() != b || cameras.size() != b) {
    throw InvalidArgument("batch_objective: inputs, targets, weights and cameras must align");
  }
  const EncoderCache cache = encoder.encode(inputs);
  const double inv_b = 1.0 / static_cast<double>(b);

  BatchLoss out;
  Matrix grad_out(cache.output.rows(), cache.output.cols());
  for (std::size_t i = 0; i < b; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = contrastive_loss(bank, cache.output.row(r).transpose(), targets[i], weights[i]);
    out.inter += c.loss * inv_b;
    grad_out.row(r) = c.grad_query.transpose() * inv_b;
  }
  out.grad_classifier.assign(classifier.n_params(), 0.0);
  if (options.use_domain) {
    const GradientReversal grl{options.lambda};
    const auto d = domain_loss(classifier, grl, cache.output, cameras);
    out.domain = d.loss * inv_b;
    grad_out += (options.beta * inv_b) * d.grad_embeddings;
    for (std::size_t k = 0; k < d.grad_classifier.size(); ++k) {
      out.grad_classifier[k] = options.beta * inv_b * d.grad_classifier[k];
    }
  }
  out.total = total_loss(out.inter, out.domain, options.use_domain ? options.beta : 0.0);
  out.grad_encoder.assign(encoder.params().size(), 0.0);
  encoder.backward(cache, grad_out, out.grad_encoder);
  out.embeddings = cache.output;
  return out;
}

}  // namespace calr::model
