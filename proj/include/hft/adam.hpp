#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hft/tensor.hpp"

namespace hft {

struct AdamConfig {
  double learning_rate = 2e-5;
  /// Fraction of total steps over which the learning rate ramps up from 0.
  double warmup_fraction = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Linear warmup: base·step/warmup_steps for step < warmup_steps, base after,
/// where warmup_steps = warmup_fraction·total_steps.
double warmup_learning_rate(double base, double warmup_fraction, std::size_t global_step,
                            std::size_t total_steps);

/// First/second moment buffers for a fixed parameter list.
class AdamState {
 public:
  AdamState(AdamConfig config, std::span<const Tensor> params);

  [[nodiscard]] const AdamConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t step_count() const noexcept { return step_; }
  [[nodiscard]] std::span<const double> first_moment(std::size_t i) const { return m_.at(i); }
  [[nodiscard]] std::span<const double> second_moment(std::size_t i) const { return v_.at(i); }

 private:
  friend double adam_step(std::span<Tensor>, AdamState&, std::size_t, std::size_t);
  AdamConfig config_;
  std::size_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

/// One bias-corrected Adam update of every parameter from its grad.
/// Returns the effective learning rate used. Throws MissingGrad if a
/// parameter has no gradient buffer, ShapeMismatch if the parameter list
/// does not match the one the state was built for.
double adam_step(std::span<Tensor> params, AdamState& state, std::size_t global_step,
                 std::size_t total_steps);

}  // namespace hft
