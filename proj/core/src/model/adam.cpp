#include "calr/model/adam.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <string>

namespace calr::model {

AdamW::AdamW(std::size_t n_params, AdamOptions options)
    : options_(options), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw InvalidArgument("adam: expected " + std::to_string(m_.size()) + " parameters, got " +
                          std::to_string(params.size()) + " params / " +
                          std::to_string(grads.size()) + " grads");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * grads[i];
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= options_.lr * (m_hat / (std::sqrt(v_hat) + options_.eps) +
                                options_.weight_decay * params[i]);
  }
}

}  // namespace calr::model
