#include "calr/model/encoder.hpp"

#include "calr/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calr::model {
namespace {

using ConstMat = Eigen::Map<const Matrix>;
using MutMat = Eigen::Map<Matrix>;
using ConstVec = Eigen::Map<const Vector>;
using MutVec = Eigen::Map<Vector>;

}  // namespace

std::string_view to_string(EncoderArch arch) {
  return arch == EncoderArch::Linear ? "linear" : "tanh";
}

EncoderArch parse_arch(std::string_view name) {
  if (name == "linear") return EncoderArch::Linear;
  if (name == "tanh") return EncoderArch::Tanh;
  throw InvalidArgument("unknown encoder architecture '" + std::string(name) + "'");
}

std::size_t EncoderConfig::n_params() const {
  const auto in = static_cast<std::size_t>(input_dim);
  const auto out = static_cast<std::size_t>(output_dim);
  const auto h = static_cast<std::size_t>(hidden_dim);
  if (arch == EncoderArch::Linear) return out * in + out;
  return h * in + h + out * h + out;
}

EncoderModel::EncoderModel(EncoderConfig config, std::vector<double> params)
    : config_(config), params_(std::move(params)) {
  if (config_.input_dim < 1 || config_.output_dim < 1 ||
      (config_.arch == EncoderArch::Tanh && config_.hidden_dim < 1)) {
    throw InvalidArgument("encoder: dimensions must be >= 1");
  }
  if (params_.size() != config_.n_params()) {
    throw InvalidArgument("encoder: expected " + std::to_string(config_.n_params()) +
                          " parameters, got " + std::to_string(params_.size()));
  }
}

EncoderModel EncoderModel::identity(const EncoderConfig& config) {
  if (config.arch != EncoderArch::Linear) {
    throw InvalidArgument("encoder: identity init is only defined for the linear arch");
  }
  std::vector<double> p(config.n_params(), 0.0);
  const int d = std::min(config.input_dim, config.output_dim);
  for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i * config.input_dim + i)] = 1.0;
  return EncoderModel(config, std::move(p));
}

EncoderModel EncoderModel::random(const EncoderConfig& config, Rng& rng) {
  std::vector<double> p(config.n_params(), 0.0);
  auto fill = [&](std::size_t offset, int rows, int cols) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    for (std::size_t i = 0; i < static_cast<std::size_t>(rows * cols); ++i) {
      p[offset + i] = scale * rng.normal();
    }
    return offset + static_cast<std::size_t>(rows * cols + rows);
  };
  if (config.arch == EncoderArch::Linear) {
    fill(0, config.output_dim, config.input_dim);
  } else {
    const auto next = fill(0, config.hidden_dim, config.input_dim);
    fill(next, config.output_dim, config.hidden_dim);
  }
  return EncoderModel(config, std::move(p));
}

EncoderCache EncoderModel::encode(const Matrix& inputs) const {
  if (inputs.cols() != config_.input_dim) {
    throw InvalidArgument("encode: input dim " + std::to_string(inputs.cols()) +
                          " does not match model input dim " + std::to_string(config_.input_dim));
  }
  EncoderCache c;
  c.input = inputs;
  const double* p = params_.data();
  if (config_.arch == EncoderArch::Linear) {
    ConstMat w(p, config_.output_dim, config_.input_dim);
    ConstVec b(p + config_.output_dim * config_.input_dim, config_.output_dim);
    c.pre_norm = (inputs * w.transpose()).rowwise() + b.transpose();
  } else {
    const int h = config_.hidden_dim;
    ConstMat w1(p, h, config_.input_dim);
    ConstVec b1(p + h * config_.input_dim, h);
    const double* p2 = p + h * config_.input_dim + h;
    ConstMat w2(p2, config_.output_dim, h);
    ConstVec b2(p2 + config_.output_dim * h, config_.output_dim);
    c.hidden = ((inputs * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
    c.pre_norm = (c.hidden * w2.transpose()).rowwise() + b2.transpose();
  }
  c.norms = c.pre_norm.rowwise().norm();
  c.output.resize(c.pre_norm.rows(), c.pre_norm.cols());
  for (Eigen::Index i = 0; i < c.pre_norm.rows(); ++i) {
    if (!(c.norms[i] > 0.0) || !std::isfinite(c.norms[i])) {
      throw InvalidArgument("encode: row " + std::to_string(i) + " maps to a zero or non-finite vector");
    }
    c.output.row(i) = c.pre_norm.row(i) / c.norms[i];
  }
  return c;
}

void EncoderModel::backward(const EncoderCache& cache, const Matrix& grad_output,
                            std::span<double> grad_params) const {
  if (grad_params.size() != params_.size()) {
    throw InvalidArgument("encoder backward: gradient buffer has wrong size");
  }
  if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols()) {
    throw InvalidArgument("encoder backward: gradient shape does not match cached output");
  }
  // Through y = z / |z|:  dz = (dy - y (y . dy)) / |z|
  Matrix dz(grad_output.rows(), grad_output.cols());
  for (Eigen::Index i = 0; i < dz.rows(); ++i) {
    const double proj = cache.output.row(i).dot(grad_output.row(i));
    dz.row(i) = (grad_output.row(i) - proj * cache.output.row(i)) / cache.norms[i];
  }
  double* g = grad_params.data();
  if (config_.arch == EncoderArch::Linear) {
    MutMat gw(g, config_.output_dim, config_.input_dim);
    MutVec gb(g + config_.output_dim * config_.input_dim, config_.output_dim);
    gw.noalias() += dz.transpose() * cache.input;
    gb += dz.colwise().sum().transpose();
    return;
  }
  const int h = config_.hidden_dim;
  const double* p2 = params_.data() + h * config_.input_dim + h;
  ConstMat w2(p2, config_.output_dim, h);
  MutMat gw1(g, h, config_.input_dim);
  MutVec gb1(g + h * config_.input_dim, h);
  double* g2 = g + h * config_.input_dim + h;
  MutMat gw2(g2, config_.output_dim, h);
  MutVec gb2(g2 + config_.output_dim * h, config_.output_dim);
  gw2.noalias() += dz.transpose() * cache.hidden;
  gb2 += dz.colwise().sum().transpose();
  const Matrix dh = dz * w2;
  const Matrix da = (dh.array() * (1.0 - cache.hidden.array().square())).matrix();
  gw1.noalias() += da.transpose() * cache.input;
  gb1 += da.colwise().sum().transpose();
}

}  // namespace calr::model
