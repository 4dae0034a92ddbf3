#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hft/checkpoint.hpp"
#include "hft/tensor.hpp"
#include "hft/tokenizer.hpp"
#include "json.hpp"

namespace hft {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t hidden_dim = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 2;
  std::size_t ff_dim = 128;
  std::size_t num_classes = 2;
  double dropout = 0.1;
  double init_std = 0.02;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct EncoderLayer {
  Tensor ln1_gain, ln1_bias;
  Tensor qkv_weight, qkv_bias;  // [hidden × 3·hidden], [3·hidden]
  Tensor out_weight, out_bias;  // [hidden × hidden], [hidden]
  Tensor ln2_gain, ln2_bias;
  Tensor ff1_weight, ff1_bias;  // [hidden × ff], [ff]
  Tensor ff2_weight, ff2_bias;  // [ff × hidden], [hidden]
};

/// Pre-norm transformer encoder with CLS pooling and a linear classifier.
struct EncoderModel {
  ModelConfig config;
  Tensor token_embedding;     // [vocab × hidden]
  Tensor position_embedding;  // [max_len × hidden]
  std::vector<EncoderLayer> layers;
  Tensor final_ln_gain, final_ln_bias;
  Tensor classifier_weight;  // [hidden × classes]
  Tensor classifier_bias;    // [classes]

  /// Stable order; names are used as checkpoint block names.
  [[nodiscard]] std::vector<NamedTensor> named_parameters() const;
  [[nodiscard]] std::vector<Tensor> parameters() const;
  [[nodiscard]] std::size_t parameter_count() const;
  void zero_grad();
};

/// Closed-form parameter count:
///   V·H + L·H + layers·(4H² + 2H·F + 9H + F) + 2H + H·C + C
/// (V vocab, L max_len, H hidden, F ff_dim, C classes).
std::size_t expected_parameter_count(const ModelConfig& config);

/// Scaled-normal (std = init_std) weights, zero biases, unit LayerNorm gains.
/// Deterministic in config.seed. Throws InvalidConfig.
EncoderModel init_model(const ModelConfig& config);

/// Token + position embedding for every slot → [max_len × hidden]. This is
/// the tensor the adversarial perturbation is added to.
Tensor embed(const EncoderModel& model, const TokenSequence& seq);
/// Same for the first true_length slots only. Since padded keys are masked,
/// forward() on this prefix yields the same logits as on the full tensor.
Tensor embed_prefix(const EncoderModel& model, const TokenSequence& seq);

struct ForwardOptions {
  bool training = false;
  /// Seeds the dropout stream; equal seeds replay equal masks.
  std::uint64_t dropout_seed = 0;
};

struct PredictedFeatures {
  Tensor logits;  // [classes]
  Tensor pooled;  // [hidden], position-0 representation
};

/// `embeddings` has R ≤ max_len rows; `mask` supplies at least R entries and
/// positions with mask 0 are excluded as attention keys.
PredictedFeatures forward(const EncoderModel& model, const Tensor& embeddings,
                          std::span<const std::uint8_t> mask, const ForwardOptions& options = {});

/// One forward per sequence, sharing nothing across examples.
std::vector<PredictedFeatures> forward_batch(const EncoderModel& model,
                                             std::span<const TokenSequence> batch,
                                             const ForwardOptions& options = {});

// ---- fusion head -------------------------------------------------------

enum class FusionMode { Logits, LogitsAndPooled };

std::string_view to_string(FusionMode mode) noexcept;
FusionMode parse_fusion_mode(std::string_view text);

/// One-hidden-layer perceptron over the concatenated features of two models.
struct FusionHead {
  FusionMode mode = FusionMode::Logits;
  std::size_t hidden_a = 0;  // pooled widths (used in LogitsAndPooled mode)
  std::size_t hidden_b = 0;
  std::size_t fusion_hidden = 16;
  Tensor w1, b1;  // [in × fusion_hidden], [fusion_hidden]
  Tensor w2, b2;  // [fusion_hidden × 2], [2]

  [[nodiscard]] std::size_t input_width() const;
  [[nodiscard]] std::vector<NamedTensor> named_parameters() const;
  [[nodiscard]] std::vector<Tensor> parameters() const;
};

FusionHead init_fusion_head(FusionMode mode, std::size_t hidden_a, std::size_t hidden_b,
                            std::size_t fusion_hidden, std::uint64_t seed, double init_std = 0.1);

/// Head whose output equals fa.logits exactly, via relu(x) − relu(−x) = x.
/// Needs fusion_hidden ≥ 4.
FusionHead pass_through_head(FusionMode mode, std::size_t hidden_a, std::size_t hidden_b,
                             std::size_t fusion_hidden = 16);

/// relu(concat(features)·W1 + b1)·W2 + b2. Throws WidthMismatch.
Tensor fuse(const FusionHead& head, const PredictedFeatures& fa, const PredictedFeatures& fb);

// ---- persistence -------------------------------------------------------

/// Model parameters plus a JSON header {"kind":"encoder","model":...,"extra":...}.
Checkpoint to_checkpoint(const EncoderModel& model, const nlohmann::json& extra = {});
EncoderModel model_from_checkpoint(const Checkpoint& ckpt);

Checkpoint to_checkpoint(const FusionHead& head, const nlohmann::json& extra = {});
FusionHead fusion_head_from_checkpoint(const Checkpoint& ckpt);

}  // namespace hft
