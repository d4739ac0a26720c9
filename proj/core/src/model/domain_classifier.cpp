#include "calr/model/domain_classifier.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <string>

namespace calr::model {
namespace {

using ConstMat = Eigen::Map<const Matrix>;
using ConstVec = Eigen::Map<const Vector>;

Matrix row_softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - mx).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

}  // namespace

DomainClassifier::DomainClassifier(int input_dim, int n_cameras, std::vector<double> params)
    : input_dim_(input_dim), n_cameras_(n_cameras), params_(std::move(params)) {
  if (input_dim_ < 1 || n_cameras_ < 1) {
    throw InvalidArgument("domain classifier: dimensions must be >= 1");
  }
  const auto expected = static_cast<std::size_t>(n_cameras_) * static_cast<std::size_t>(input_dim_ + 1);
  if (params_.size() != expected) {
    throw InvalidArgument("domain classifier: expected " + std::to_string(expected) +
                          " parameters, got " + std::to_string(params_.size()));
  }
}

DomainClassifier DomainClassifier::zeros(int input_dim, int n_cameras) {
  return DomainClassifier(input_dim, n_cameras,
                          std::vector<double>(static_cast<std::size_t>(n_cameras) *
                                              static_cast<std::size_t>(input_dim + 1), 0.0));
}

DomainClassifier DomainClassifier::random(int input_dim, int n_cameras, Rng& rng, double scale) {
  auto c = zeros(input_dim, n_cameras);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_cameras * input_dim); ++i) {
    c.params_[i] = scale * rng.normal();
  }
  return c;
}

Matrix DomainClassifier::logits(const Matrix& embeddings) const {
  if (embeddings.cols() != input_dim_) {
    throw InvalidArgument("domain classifier: embedding dim " + std::to_string(embeddings.cols()) +
                          " does not match " + std::to_string(input_dim_));
  }
  ConstMat v(params_.data(), n_cameras_, input_dim_);
  ConstVec c(params_.data() + n_cameras_ * input_dim_, n_cameras_);
  return (embeddings * v.transpose()).rowwise() + c.transpose();
}

Matrix DomainClassifier::probabilities(const Matrix& embeddings) const {
  return row_softmax(logits(embeddings));
}

DomainLossResult domain_loss(const DomainClassifier& classifier, const GradientReversal& grl,
                             const Matrix& embeddings, std::span<const CameraId> cameras) {
  if (static_cast<std::size_t>(embeddings.rows()) != cameras.size()) {
    throw InvalidArgument("domain_loss: embeddings and camera labels differ in length");
  }
  for (CameraId c : cameras) {
    if (c < 0 || c >= classifier.n_cameras()) {
      throw InvalidArgument("domain_loss: camera label " + std::to_string(c) + " outside [0, " +
                            std::to_string(classifier.n_cameras()) + ")");
    }
  }
  const Matrix& x = grl.forward(embeddings);
  const Matrix logit = classifier.logits(x);
  const Matrix prob = row_softmax(logit);

  DomainLossResult r;
  Matrix dlogit = prob;
  for (Eigen::Index i = 0; i < logit.rows(); ++i) {
    const auto c = static_cast<Eigen::Index>(cameras[static_cast<std::size_t>(i)]);
    const double mx = logit.row(i).maxCoeff();
    const double lse = mx + std::log((logit.row(i).array() - mx).exp().sum());
    r.loss += lse - logit(i, c);
    dlogit(i, c) -= 1.0;
  }
  const int n = classifier.n_cameras();
  const int d = classifier.input_dim();
  r.grad_classifier.assign(classifier.n_params(), 0.0);
  Eigen::Map<Matrix> gv(r.grad_classifier.data(), n, d);
  Eigen::Map<Vector> gc(r.grad_classifier.data() + n * d, n);
  gv.noalias() = dlogit.transpose() * x;
  gc = dlogit.colwise().sum().transpose();

  ConstMat v(classifier.params().data(), n, d);
  r.grad_embeddings = grl.backward(dlogit * v);
  return r;
}

}  // namespace calr::model
