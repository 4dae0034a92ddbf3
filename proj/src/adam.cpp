#include "hft/adam.hpp"

#include <cmath>
#include <string>

#include "hft/error.hpp"

namespace hft {

double warmup_learning_rate(double base, double warmup_fraction, std::size_t global_step,
                            std::size_t total_steps) {
  const double warmup_steps = warmup_fraction * static_cast<double>(total_steps);
  if (warmup_steps <= 0.0) return base;
  const double step = static_cast<double>(global_step);
  if (step >= warmup_steps) return base;
  return base * step / warmup_steps;
}

AdamState::AdamState(AdamConfig config, std::span<const Tensor> params) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor& p : params) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

double adam_step(std::span<Tensor> params, AdamState& state, std::size_t global_step,
                 std::size_t total_steps) {
  if (params.size() != state.m_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: " + std::to_string(params.size()) +
                                              " params for a state of " +
                                              std::to_string(state.m_.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw Error(ErrorCode::MissingGrad, "parameter " + std::to_string(i) + " has no gradient");
    }
    if (params[i].numel() != state.m_[i].size()) {
      throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter " + std::to_string(i));
    }
  }

  const AdamConfig& cfg = state.config_;
  const double lr =
      warmup_learning_rate(cfg.learning_rate, cfg.warmup_fraction, global_step, total_steps);
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].mutable_values();
    const auto grad = params[i].grad();
    auto& m = state.m_[i];
    auto& v = state.v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      values[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
  return lr;
}

}  // namespace hft
