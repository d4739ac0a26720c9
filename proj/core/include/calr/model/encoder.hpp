#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace calr::model {

enum class EncoderArch {
  Linear,  ///< y = normalize(W x + b)
  Tanh,    ///< y = normalize(W2 tanh(W1 x + b1) + b2)
};

[[nodiscard]] std::string_view to_string(EncoderArch arch);
[[nodiscard]] EncoderArch parse_arch(std::string_view name);

struct EncoderConfig {
  EncoderArch arch = EncoderArch::Linear;
  int input_dim = 32;
  int output_dim = 32;
  int hidden_dim = 32;  ///< Tanh only

  [[nodiscard]] std::size_t n_params() const;
  bool operator==(const EncoderConfig&) const = default;
};

/// Intermediates kept by encode() for exact backpropagation.
struct EncoderCache {
  Matrix input;
  Matrix hidden;    ///< tanh activations (Tanh arch only)
  Matrix pre_norm;  ///< rows before L2 normalization
  Vector norms;
  Matrix output;    ///< unit-norm embeddings
};

/// Desk-scale embedding network with hand-written gradients. Parameters live
/// in one flat vector: W (out x in, row-major) then b, with the hidden layer's
/// W1, b1 first for the Tanh arch.
class EncoderModel {
public:
  EncoderModel() = default;
  EncoderModel(EncoderConfig config, std::vector<double> params);

  /// Identity-like start: W = I on the leading min(in, out) dims, zero bias.
  /// Linear arch only.
  static EncoderModel identity(const EncoderConfig& config);
  /// Gaussian weights scaled by 1/sqrt(fan_in), zero biases.
  static EncoderModel random(const EncoderConfig& config, Rng& rng);

  [[nodiscard]] const EncoderConfig& config() const { return config_; }
  [[nodiscard]] std::span<const double> params() const { return params_; }
  [[nodiscard]] std::span<double> params() { return params_; }

  /// Throws InvalidArgument on a column-count mismatch or a zero pre-norm row.
  [[nodiscard]] EncoderCache encode(const Matrix& inputs) const;
  [[nodiscard]] Matrix embed(const Matrix& inputs) const { return encode(inputs).output; }

  /// Adds dLoss/dparams to `grad_params` given dLoss/doutput.
  void backward(const EncoderCache& cache, const Matrix& grad_output,
                std::span<double> grad_params) const;

  bool operator==(const EncoderModel&) const = default;

private:
  EncoderConfig config_;
  std::vector<double> params_;
};

}  // namespace calr::model
