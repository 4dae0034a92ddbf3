#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hft/config.hpp"
#include "hft/encoder.hpp"
#include "hft/lexicon.hpp"
#include "hft/metrics.hpp"
#include "hft/textprep.hpp"
#include "hft/tokenizer.hpp"
#include "json.hpp"

namespace hft {

/// An encoder together with the vocabulary it was trained with.
struct TrainedModel {
  Vocabulary vocab;
  EncoderModel model;
};

/// Deep copy (parameters are not shared).
TrainedModel clone(const TrainedModel& source);

/// The vocabulary travels in the checkpoint header, so one file restores the
/// whole model. `run_config` is stored verbatim for provenance.
Checkpoint to_checkpoint(const TrainedModel& trained, const nlohmann::json& run_config = {});
TrainedModel trained_model_from_checkpoint(const Checkpoint& ckpt);
void save_trained_model(const std::filesystem::path& path, const TrainedModel& trained,
                        const nlohmann::json& run_config = {});
TrainedModel load_trained_model(const std::filesystem::path& path);

/// Cleans and encodes one example. Text that cleans to nothing encodes to
/// the bare [CLS] sequence so every example still gets a prediction.
TokenSequence encode_example(const NewsExample& example, const TrainedModel& trained,
                             const StopWords& stopwords);

// ---- training ------------------------------------------------------------

struct EpochLog {
  std::size_t round = 0;
  std::size_t epoch = 0;
  double alpha = 1.0;
  /// Learning rate of the last optimizer step in the epoch.
  double learning_rate = 0.0;
  std::size_t train_size = 0;
  /// Example-weighted mean over the epoch's batches.
  double clean_loss = 0.0;
  /// Absent when adversarial training is off or every batch was skipped.
  std::optional<double> adv_loss;
  std::size_t skipped_adv_batches = 0;
  ClassificationReport validation;
};

struct RoundLog {
  std::size_t round = 0;
  std::size_t train_size = 0;
  std::size_t hard_samples = 0;
  std::size_t augmented = 0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::vector<RoundLog> rounds;
  std::size_t best_index = 0;  // into epochs
  double best_f1 = -1.0;
};

nlohmann::json to_json(const EpochLog& entry);
nlohmann::json to_json(const RoundLog& entry);
/// One JSON record per epoch.
void write_trainlog(std::ostream& out, const TrainLog& log);

struct TrainOptions {
  /// Use this vocabulary instead of building one from the training text.
  const Vocabulary* vocab = nullptr;
  /// Start from these weights (and their vocabulary) instead of a fresh init.
  const TrainedModel* initial = nullptr;
  const StopWords* stopwords = nullptr;  // default_stopwords() when null
  std::size_t round = 0;
};

struct TrainResult {
  TrainedModel model;  // best epoch by validation weighted F1
  TrainLog log;
};

/// Per epoch: α from the schedule (1 when heated_loss is off), seeded
/// shuffle, one adversarial or plain step per batch, Adam with warmup, then a
/// validation report. Keeps the weights of the epoch with the highest
/// validation weighted F1 (earliest on ties) and stops after `patience`
/// epochs without improvement.
///
/// Throws NonFiniteLoss naming the batch, Empty when either set is empty
/// after cleaning, plus anything the lower layers raise.
TrainResult train(const RunConfig& config, std::span<const NewsExample> train_set,
                  std::span<const NewsExample> val_set, const TrainOptions& options = {});

// ---- prediction and evaluation ------------------------------------------

struct Prediction {
  std::string id;
  int gold = kNoLabel;
  int pred = kFake;
  double p_fake = 0.0;
  double p_real = 0.0;
};

/// α = 1 probabilities, argmax decision (ties → fake).
std::vector<Prediction> predict(const TrainedModel& trained, std::span<const NewsExample> examples,
                                const StopWords& stopwords);

/// Metrics over the labelled rows. Throws Empty when none is labelled.
ClassificationReport report_for(std::span<const Prediction> predictions, bool divide_by_classes = false);

ClassificationReport evaluate(const TrainedModel& trained, std::span<const NewsExample> examples,
                              const StopWords& stopwords, bool divide_by_classes = false);

/// Header `id gold pred p_fake p_real`, tab separated; labels as fake/real,
/// gold "-" for unlabelled rows, probabilities with nine decimals.
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);

/// Misclassified labelled examples from both splits, sorted by id.
std::vector<NewsExample> harvest_hard_samples(const TrainedModel& trained,
                                              std::span<const NewsExample> train_set,
                                              std::span<const NewsExample> val_set,
                                              const StopWords& stopwords);

// ---- augmentation ----------------------------------------------------------

enum class Transformation { SynonymSwap, WordDrop };

std::string_view to_string(Transformation t) noexcept;

struct AugmentationRecord {
  std::string source_id;
  Transformation transformation = Transformation::WordDrop;
  /// 0-based indices into the cleaned source words, ascending.
  std::vector<std::size_t> positions;
  std::string text;
  std::size_t round = 0;
};

struct AugmentedExample {
  NewsExample example;
  AugmentationRecord record;
};

/// Works on the cleaned words of `source`. Draws, from
/// Rng(mix_seed(seed, round, index)):
///   1. the transformation: synonym_swap with probability 1/2 when some word
///      is in the lexicon, word_drop otherwise;
///   2. how many words to touch, 1 or 2 (capped by the candidates);
///   3. the positions, uniformly without replacement (swap: among in-lexicon
///      words; drop: among all words);
///   4. for a swap, one synonym per position, uniformly.
/// The result keeps the source label and gets id `<source>-aug<round>-<index>`.
///
/// Throws TooShort when the cleaned source has at most one word.
AugmentedExample augment_example(const NewsExample& source, std::size_t index,
                                 const SynonymLexicon& lexicon, std::uint64_t seed,
                                 std::size_t round, const StopWords& stopwords);

/// augment_example over `hard` with index = position in `hard`; TooShort
/// examples are skipped and logged.
std::vector<AugmentedExample> augment(std::span<const NewsExample> hard, const SynonymLexicon& lexicon,
                                      std::uint64_t seed, std::size_t round, const StopWords& stopwords);

/// Header `id text label source_id transformation positions round`; positions
/// comma separated.
void write_augmented(std::ostream& out, std::span<const AugmentedExample> augmented);

struct PipelineResult {
  TrainedModel model;
  TrainLog log;
  std::vector<AugmentedExample> augmented;
};

/// config.rounds training rounds. Between rounds the current best model's
/// misclassified train+val examples are augmented and appended to the
/// training set; the next round continues from the best weights so far.
/// Stops early when a round produces no augmented examples.
PipelineResult run_pipeline(const RunConfig& config, std::span<const NewsExample> train_set,
                            std::span<const NewsExample> val_set, const SynonymLexicon& lexicon,
                            const TrainOptions& options = {});

// ---- fusion ------------------------------------------------------------------

struct FusionTrainResult {
  FusionHead head;
  ClassificationReport validation;
  /// Validation weighted F1 after each epoch; entry 0 is the initial head.
  std::vector<double> epoch_f1;
  std::size_t best_epoch = 0;
};

/// Trains a fusion head on the frozen sources' features over `val_set`
/// (α = 1 cross-entropy, Adam without warmup) and keeps the head with the
/// best validation weighted F1, the initial head included.
FusionTrainResult train_fused(const TrainedModel& a, const TrainedModel& b,
                              std::span<const NewsExample> val_set, const FusionConfig& config,
                              std::uint64_t seed, const StopWords& stopwords);

std::vector<Prediction> predict_fused(const TrainedModel& a, const TrainedModel& b, const FusionHead& head,
                                      std::span<const NewsExample> examples, const StopWords& stopwords);

// ---- ablation ------------------------------------------------------------------

/// The five single-model rows: baseline (all toggles off), +FGM,
/// +heated-loss, +new-tokens, +all-three. Everything else is copied from base.
std::vector<std::pair<std::string, RunConfig>> ablation_configs(const RunConfig& base);

struct AblationRow {
  std::string name;
  RunConfig config;
  ClassificationReport report;
};

struct AblationOptions {
  std::size_t threads = 1;
  const StopWords* stopwords = nullptr;
  const SynonymLexicon* lexicon = nullptr;  // default_lexicon() when null
};

/// The five single-model rows plus "fused": the +all-three model fused with a
/// second all-three model that differs in tokenizer (no added tokens) and
/// seed (+1), head trained on val. Every row is evaluated on `test_set`.
std::vector<AblationRow> ablation_suite(const RunConfig& base, std::span<const NewsExample> train_set,
                                        std::span<const NewsExample> val_set,
                                        std::span<const NewsExample> test_set,
                                        const AblationOptions& options = {});

/// One +FGM row per ε (named "+FGM eps=<ε>"), each evaluated on `test_set`.
std::vector<AblationRow> epsilon_sweep(const RunConfig& base, std::span<const double> epsilons,
                                       std::span<const NewsExample> train_set,
                                       std::span<const NewsExample> val_set,
                                       std::span<const NewsExample> test_set,
                                       const AblationOptions& options = {});

std::string ablation_table(std::span<const AblationRow> rows);

}  // namespace hft
