#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"

#include <span>
#include <vector>

namespace calr::model {

/// Gradient reversal: identity on the forward pass, -lambda * g on the way back.
struct GradientReversal {
  double lambda = 1.0;

  [[nodiscard]] const Matrix& forward(const Matrix& x) const { return x; }
  [[nodiscard]] Matrix backward(const Matrix& grad) const { return -lambda * grad; }
};

/// Linear camera classifier followed by softmax. Parameters: V (n x dim,
/// row-major) then c (n).
class DomainClassifier {
public:
  DomainClassifier() = default;
  DomainClassifier(int input_dim, int n_cameras, std::vector<double> params);

  static DomainClassifier zeros(int input_dim, int n_cameras);
  static DomainClassifier random(int input_dim, int n_cameras, Rng& rng, double scale = 0.01);

  [[nodiscard]] int input_dim() const { return input_dim_; }
  [[nodiscard]] int n_cameras() const { return n_cameras_; }
  [[nodiscard]] std::size_t n_params() const { return params_.size(); }
  [[nodiscard]] std::span<const double> params() const { return params_; }
  [[nodiscard]] std::span<double> params() { return params_; }

  [[nodiscard]] Matrix logits(const Matrix& embeddings) const;
  /// Row-wise softmax of logits; each row sums to 1.
  [[nodiscard]] Matrix probabilities(const Matrix& embeddings) const;

  bool operator==(const DomainClassifier&) const = default;

private:
  int input_dim_ = 0;
  int n_cameras_ = 0;
  std::vector<double> params_;
};

struct DomainLossResult {
  double loss = 0.0;                    ///< summed cross-entropy over the batch
  std::vector<double> grad_classifier;  ///< not reversed
  Matrix grad_embeddings;               ///< after the reversal layer: -lambda * dL/dembedding
};

/// Camera-classification loss through a gradient reversal layer. The
/// classifier receives the true gradient; the encoder side receives the
/// reversed one. Throws on camera labels outside [0, n_cameras).
[[nodiscard]] DomainLossResult domain_loss(const DomainClassifier& classifier,
                                           const GradientReversal& grl, const Matrix& embeddings,
                                           std::span<const CameraId> cameras);

}  // namespace calr::model
