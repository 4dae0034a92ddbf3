#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hft/encoder.hpp"
#include "hft/tensor.hpp"
#include "hft/tokenizer.hpp"
#include "json.hpp"

namespace hft {

struct AdvConfig {
  bool enabled = false;
  /// L2 budget of the embedding perturbation.
  double epsilon = 0.5;
  /// Weight w of the adversarial gradients: (1−w)·clean + w·adversarial.
  double combine_weight = 0.5;
  /// Normalize each row (token) separately instead of the whole tensor.
  bool per_token_norm = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const AdvConfig& c);
void from_json(const nlohmann::json& j, AdvConfig& c);

inline constexpr double kDegenerateGradientNorm = 1e-12;

struct PerturbationRecord {
  Tensor r_adv;
  double gradient_norm = 0.0;
};

/// r_adv = −ε·g/‖g‖₂ for g the gradient of the log-likelihood with respect
/// to the embeddings (the negated loss gradient). The norm runs over the whole
/// tensor, or over each row when per_token is set.
///
/// Throws DegenerateGradient when ‖g‖₂ < 1e-12, InvalidConfig when ε < 0.
PerturbationRecord fgm_perturbation(const Tensor& grad_embed, double epsilon, bool per_token = false);

struct TrainingExample {
  TokenSequence seq;
  int label = 0;
};

struct StepRecord {
  double clean_loss = 0.0;
  std::optional<double> adv_loss;
  /// Set when the adversarial pass was skipped for a degenerate gradient.
  bool skipped_degenerate = false;
};

/// Clean forward/backward of the mean heated loss. Parameter grads are
/// zeroed first, then hold ∂loss/∂θ. Example i uses dropout stream
/// mix_seed(dropout_seed, i).
StepRecord plain_training_step(EncoderModel& model, std::span<const TrainingExample> batch,
                               double alpha, std::uint64_t dropout_seed, bool training = true);

/// Clean pass, FGM perturbation of each example's embeddings, adversarial
/// pass with the same dropout masks, then parameter grads set to
/// (1−w)·clean + w·adversarial. Parameters are not modified. With
/// adv.enabled == false this is plain_training_step.
StepRecord adversarial_training_step(EncoderModel& model, std::span<const TrainingExample> batch,
                                     double alpha, const AdvConfig& adv, std::uint64_t dropout_seed,
                                     bool training = true);

}  // namespace hft
