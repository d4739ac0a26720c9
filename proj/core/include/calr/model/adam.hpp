#pragma once

#include <span>
#include <vector>

namespace calr::model {

struct AdamOptions {
  double lr = 3.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;  ///< decoupled: theta -= lr * wd * theta
};

/// Adam with decoupled weight decay over one flat parameter vector.
class AdamW {
public:
  AdamW(std::size_t n_params, AdamOptions options = {});

  /// Throws InvalidArgument if either span's size differs from n_params.
  void step(std::span<double> params, std::span<const double> grads);

  [[nodiscard]] const AdamOptions& options() const { return options_; }
  [[nodiscard]] long steps() const { return t_; }

private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace calr::model
