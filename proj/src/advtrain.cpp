#include "hft/advtrain.hpp"

#include <cmath>

#include "hft/error.hpp"
#include "hft/objective.hpp"
#include "hft/rng.hpp"

namespace hft {

using nlohmann::json;

void AdvConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidConfig, "adv.epsilon must be >= 0");
  if (!(combine_weight >= 0.0 && combine_weight <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "adv.combine_weight must be in [0, 1]");
  }
}

void to_json(json& j, const AdvConfig& c) {
  j = json{{"enabled", c.enabled},
           {"epsilon", c.epsilon},
           {"combine_weight", c.combine_weight},
           {"per_token_norm", c.per_token_norm}};
}

void from_json(const json& j, AdvConfig& c) {
  AdvConfig d;
  c.enabled = j.value("enabled", d.enabled);
  c.epsilon = j.value("epsilon", d.epsilon);
  c.combine_weight = j.value("combine_weight", d.combine_weight);
  c.per_token_norm = j.value("per_token_norm", d.per_token_norm);
}

PerturbationRecord fgm_perturbation(const Tensor& grad_embed, double epsilon, bool per_token) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be >= 0");
  const auto g = grad_embed.values();
  double sq = 0.0;
  for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm >= kDegenerateGradientNorm)) {
    throw Error(ErrorCode::DegenerateGradient, "gradient norm " + std::to_string(norm));
  }
  std::vector<double> r(g.size(), 0.0);
  if (!per_token || grad_embed.rank() < 2) {
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = -epsilon * g[i] / norm;
  } else {
    const std::size_t cols = grad_embed.shape().back();
    for (std::size_t row = 0; row < g.size() / cols; ++row) {
      double rs = 0.0;
      for (std::size_t j = 0; j < cols; ++j) rs += g[row * cols + j] * g[row * cols + j];
      const double rn = std::sqrt(rs);
      if (rn < kDegenerateGradientNorm) continue;
      for (std::size_t j = 0; j < cols; ++j) r[row * cols + j] = -epsilon * g[row * cols + j] / rn;
    }
  }
  return {Tensor(grad_embed.shape(), std::move(r)), norm};
}

namespace {

struct BatchPass {
  Tensor loss;
  std::vector<Tensor> embeddings;
};

// Builds the mean heated loss over the batch. When perturbations are given,
// they are added (as constants) to each example's embeddings.
BatchPass batch_pass(const EncoderModel& model, std::span<const TrainingExample> batch, double alpha,
                     std::uint64_t dropout_seed, bool training,
                     std::span<const Tensor> perturbations = {}) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "training step on an empty batch");
  BatchPass pass;
  std::vector<Tensor> logits;
  std::vector<int> labels;
  logits.reserve(batch.size());
  labels.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Tensor emb = embed_prefix(model, batch[i].seq);
    pass.embeddings.push_back(emb);
    if (!perturbations.empty()) emb = add(emb, perturbations[i]);
    const ForwardOptions opts{training, mix_seed(dropout_seed, i)};
    logits.push_back(forward(model, emb, batch[i].seq.mask, opts).logits);
    labels.push_back(batch[i].label);
  }
  pass.loss = batch_loss(stack_rows(logits), labels, alpha);
  return pass;
}

}  // namespace

StepRecord plain_training_step(EncoderModel& model, std::span<const TrainingExample> batch,
                               double alpha, std::uint64_t dropout_seed, bool training) {
  model.zero_grad();
  BatchPass pass = batch_pass(model, batch, alpha, dropout_seed, training);
  backward(pass.loss);
  return {pass.loss.item(), std::nullopt, false};
}

StepRecord adversarial_training_step(EncoderModel& model, std::span<const TrainingExample> batch,
                                     double alpha, const AdvConfig& adv, std::uint64_t dropout_seed,
                                     bool training) {
  if (!adv.enabled) return plain_training_step(model, batch, alpha, dropout_seed, training);
  adv.validate();

  model.zero_grad();
  BatchPass clean = batch_pass(model, batch, alpha, dropout_seed, training);
  backward(clean.loss);
  StepRecord record{clean.loss.item(), std::nullopt, false};

  std::vector<Tensor> perturbations;
  perturbations.reserve(batch.size());
  try {
    for (const Tensor& emb : clean.embeddings) {
      // Log-likelihood gradient = −loss gradient.
      std::vector<double> g(emb.grad().begin(), emb.grad().end());
      for (double& v : g) v = -v;
      perturbations.push_back(fgm_perturbation(Tensor(emb.shape(), std::move(g)), adv.epsilon,
                                               adv.per_token_norm)
                                  .r_adv);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateGradient) throw;
    record.skipped_degenerate = true;
    return record;
  }

  std::vector<Tensor> params = model.parameters();
  std::vector<std::vector<double>> clean_grads;
  clean_grads.reserve(params.size());
  for (Tensor& p : params) {
    clean_grads.emplace_back(p.grad().begin(), p.grad().end());
    p.zero_grad();
  }

  BatchPass adversarial = batch_pass(model, batch, alpha, dropout_seed, training, perturbations);
  backward(adversarial.loss);
  record.adv_loss = adversarial.loss.item();

  const double w = adv.combine_weight;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto grad = params[k].mutable_grad();
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = (1.0 - w) * clean_grads[k][j] + w * grad[j];
  }
  return record;
}

}  // namespace hft
