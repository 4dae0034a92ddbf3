#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hft/advtrain.hpp"
#include "hft/encoder.hpp"
#include "hft/objective.hpp"
#include "json.hpp"

namespace hft {

struct FusionConfig {
  FusionMode mode = FusionMode::Logits;
  std::size_t hidden = 16;
  std::size_t epochs = 50;
  double learning_rate = 1e-2;
  std::size_t batch_size = 32;
  /// "random" or "pass_through"
  std::string init = "random";
};

/// Everything a training run depends on. Defaults follow the reference
/// fine-tuning recipe (lr 2e-5, 10% warmup, batch 64/128, 30 epochs,
/// α = 4/1/0.5 by ten-epoch phases) with every method toggle on.
struct RunConfig {
  ModelConfig model;
  TemperatureSchedule schedule = TemperatureSchedule::heated_default();
  AdvConfig adv{.enabled = true};
  FusionConfig fusion_head;

  std::uint64_t seed = 42;
  std::size_t epochs = 30;
  std::size_t patience = 5;  // 0 disables early stopping
  /// Training rounds; hard samples are harvested and augmented between rounds.
  std::size_t rounds = 2;
  std::size_t train_batch_size = 64;
  std::size_t eval_batch_size = 128;
  std::size_t vocab_size = 1000;
  double learning_rate = 2e-5;
  double warmup = 0.1;

  bool new_tokens = true;
  bool heated_loss = true;
  bool fusion = true;
  std::vector<std::string> added_tokens;  // defaults to default_domain_tokens()

  bool divide_by_classes = false;

  RunConfig();
  /// Throws InvalidConfig naming the offending key.
  void validate() const;
};

/// Settings for training the small from-scratch encoder on a few hundred
/// examples on one CPU core: higher learning rate (no pretrained weights to
/// preserve), 15 epochs with the α phases compressed to 5 epochs each, batch
/// 16, embeddings initialised at std 0.1 and ε = 0.1 to keep the
/// perturbation small relative to them, no early stopping.
RunConfig desk_scale_config();

nlohmann::json to_json(const RunConfig& config);

/// Overlays `overrides` onto the defaults. Unknown keys are rejected with
/// InvalidConfig naming the dotted path.
RunConfig run_config_from_json(const nlohmann::json& overrides);

/// Parses JSON, or a TOML subset (tables, key = value with JSON-compatible
/// values, # comments) when is_toml is set.
nlohmann::json parse_config_text(std::string_view text, bool is_toml);
/// By extension: .toml → TOML subset, anything else → JSON.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Applies "dotted.key=value" to a config document. The value is parsed as
/// JSON when possible, else taken as a string. The key must exist in the
/// default configuration.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace hft
