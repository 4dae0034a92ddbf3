#include "hft/objective.hpp"

#include <string>

#include "hft/error.hpp"

namespace hft {

TemperatureSchedule::TemperatureSchedule(std::vector<Phase> phases) : phases_(std::move(phases)) {
  if (phases_.empty() || phases_.front().epoch_start != 0) {
    throw Error(ErrorCode::InvalidConfig, "schedule must start at epoch 0");
  }
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    if (!(phases_[i].alpha > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "schedule alpha must be > 0 (phase " + std::to_string(i) + ")");
    }
    if (i > 0 && phases_[i].epoch_start <= phases_[i - 1].epoch_start) {
      throw Error(ErrorCode::InvalidConfig, "schedule start epochs must increase");
    }
  }
}

TemperatureSchedule TemperatureSchedule::heated_default() {
  return TemperatureSchedule({{0, 4.0}, {10, 1.0}, {20, 0.5}});
}

TemperatureSchedule TemperatureSchedule::constant(double alpha) {
  return TemperatureSchedule({{0, alpha}});
}

double TemperatureSchedule::alpha_at(std::size_t epoch) const {
  double alpha = phases_.front().alpha;
  for (const Phase& p : phases_) {
    if (p.epoch_start > epoch) break;
    alpha = p.alpha;
  }
  return alpha;
}

double schedule_alpha(const TemperatureSchedule& schedule, std::size_t epoch) {
  return schedule.alpha_at(epoch);
}

void to_json(nlohmann::json& j, const TemperatureSchedule& s) {
  j = nlohmann::json::array();
  for (const auto& p : s.phases()) j.push_back({p.epoch_start, p.alpha});
}

TemperatureSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "schedule must be a list of [start_epoch, alpha]");
  std::vector<TemperatureSchedule::Phase> phases;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() || !entry[1].is_number()) {
      throw Error(ErrorCode::InvalidConfig, "schedule entry must be [start_epoch, alpha]");
    }
    phases.push_back({entry[0].get<std::size_t>(), entry[1].get<double>()});
  }
  return TemperatureSchedule(std::move(phases));
}

Tensor heated_ce(const Tensor& logits, int label, double alpha) {
  if (logits.rank() != 1 || label < 0 || static_cast<std::size_t>(label) >= logits.numel()) {
    throw Error(ErrorCode::ShapeMismatch, "heated_ce: label out of range for logits");
  }
  return scale(pick(log_softmax_scaled(logits, alpha), static_cast<std::size_t>(label)), -1.0);
}

LossValue heated_ce_loss(std::span<const double> logits, int label, double alpha) {
  Tensor z = Tensor::vector({logits.begin(), logits.end()}, true);
  Tensor loss = heated_ce(z, label, alpha);
  backward(loss);
  LossValue out;
  out.loss = loss.item();
  const Tensor p = softmax_scaled(z.detach(), alpha);
  out.probabilities.assign(p.values().begin(), p.values().end());
  out.logit_gradient.assign(z.grad().begin(), z.grad().end());
  return out;
}

Tensor batch_loss(const Tensor& logits, std::span<const int> labels, double alpha) {
  if (labels.empty()) throw Error(ErrorCode::EmptyBatch, "batch has no examples");
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "logit rows do not match label count");
  }
  return scale(mean(pick_rows(log_softmax_scaled(logits, alpha), labels)), -1.0);
}

}  // namespace hft
