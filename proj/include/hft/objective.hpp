#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hft/tensor.hpp"
#include "json.hpp"

namespace hft {

/// Epoch-indexed α values. Phase i covers [epoch_start_i, epoch_start_{i+1});
/// the last phase is open-ended. α scales logits inside the softmax
/// (α = 1/T for a temperature T).
class TemperatureSchedule {
 public:
  struct Phase {
    std::size_t epoch_start;
    double alpha;
  };

  /// Throws InvalidConfig unless phases start at epoch 0, are strictly
  /// increasing, and every alpha is positive.
  explicit TemperatureSchedule(std::vector<Phase> phases);

  /// α = 4 for epochs 0-9, 1 for 10-19, 0.5 from 20 on.
  static TemperatureSchedule heated_default();
  static TemperatureSchedule constant(double alpha);

  [[nodiscard]] std::span<const Phase> phases() const noexcept { return phases_; }
  [[nodiscard]] double alpha_at(std::size_t epoch) const;

 private:
  std::vector<Phase> phases_;
};

double schedule_alpha(const TemperatureSchedule& schedule, std::size_t epoch);

/// [[start_epoch, alpha], ...]
void to_json(nlohmann::json& j, const TemperatureSchedule& s);
TemperatureSchedule schedule_from_json(const nlohmann::json& j);

struct LossValue {
  double loss = 0.0;
  std::vector<double> probabilities;    // softmax(α·z)
  std::vector<double> logit_gradient;   // ∂loss/∂z, from the autodiff graph
};

/// −log softmax(α·z)[label] as a graph node. Throws NonPositiveAlpha.
Tensor heated_ce(const Tensor& logits, int label, double alpha);

/// Evaluates heated_ce on plain values and backpropagates to the logits.
LossValue heated_ce_loss(std::span<const double> logits, int label, double alpha);

/// Mean of per-row heated_ce over a [B × classes] logit matrix.
/// Throws EmptyBatch, LengthMismatch.
Tensor batch_loss(const Tensor& logits, std::span<const int> labels, double alpha);

}  // namespace hft
