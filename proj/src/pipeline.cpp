#include "hft/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "hft/adam.hpp"
#include "hft/advtrain.hpp"
#include "hft/error.hpp"
#include "hft/log.hpp"
#include "hft/objective.hpp"
#include "hft/rng.hpp"

namespace hft {

using nlohmann::json;

namespace {

const StopWords& stopwords_or_default(const StopWords* s) { return s ? *s : default_stopwords(); }

void copy_values(const EncoderModel& from, EncoderModel& to) {
  const auto src = from.parameters();
  auto dst = to.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto v = src[i].values();
    std::copy(v.begin(), v.end(), dst[i].mutable_values().begin());
  }
}

std::vector<std::vector<double>> snapshot(const EncoderModel& model) {
  std::vector<std::vector<double>> out;
  for (const Tensor& p : model.parameters()) out.emplace_back(p.values().begin(), p.values().end());
  return out;
}

void restore(EncoderModel& model, const std::vector<std::vector<double>>& values) {
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    std::copy(values[i].begin(), values[i].end(), params[i].mutable_values().begin());
}

std::string label_name(int label) { return label == kReal ? "real" : label == kFake ? "fake" : "-"; }

}  // namespace

TrainedModel clone(const TrainedModel& source) {
  TrainedModel copy{source.vocab, init_model(source.model.config)};
  copy_values(source.model, copy.model);
  return copy;
}

// ---- persistence -----------------------------------------------------------

Checkpoint to_checkpoint(const TrainedModel& trained, const json& run_config) {
  const auto tokens = trained.vocab.tokens();
  json extra{{"vocab",
              {{"tokens", std::vector<std::string>(tokens.begin() + 3, tokens.end())},
               {"base_size", trained.vocab.base_size()}}}};
  if (!run_config.is_null()) extra["run_config"] = run_config;
  return to_checkpoint(trained.model, extra);
}

TrainedModel trained_model_from_checkpoint(const Checkpoint& ckpt) {
  EncoderModel model = model_from_checkpoint(ckpt);
  json header;
  try {
    header = json::parse(ckpt.header_json);
    const json& v = header.at("extra").at("vocab");
    const auto tokens = v.at("tokens").get<std::vector<std::string>>();
    const auto base_size = v.at("base_size").get<std::size_t>();
    if (base_size < 3 || base_size - 3 > tokens.size()) throw Error(ErrorCode::BadCheckpoint, "bad vocabulary split");
    const auto split = tokens.begin() + static_cast<std::ptrdiff_t>(base_size - 3);
    std::vector<std::string> base(tokens.begin(), split), added(split, tokens.end());
    Vocabulary vocab(base, added);
    if (vocab.size() != model.config.vocab_size) {
      throw Error(ErrorCode::BadCheckpoint, "vocabulary size does not match the embedding table");
    }
    return {std::move(vocab), std::move(model)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("checkpoint has no usable vocabulary: ") + e.what());
  }
}

void save_trained_model(const std::filesystem::path& path, const TrainedModel& trained, const json& run_config) {
  save_checkpoint(path, to_checkpoint(trained, run_config));
}

TrainedModel load_trained_model(const std::filesystem::path& path) {
  return trained_model_from_checkpoint(load_checkpoint(path));
}

TokenSequence encode_example(const NewsExample& example, const TrainedModel& trained,
                             const StopWords& stopwords) {
  std::string cleaned;
  try {
    cleaned = clean_text(example.raw_text, stopwords);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
  }
  return encode(cleaned, trained.vocab, trained.model.config.max_len);
}

// ---- logs ------------------------------------------------------------------

json to_json(const EpochLog& e) {
  return json{{"round", e.round},
              {"epoch", e.epoch},
              {"alpha", e.alpha},
              {"learning_rate", e.learning_rate},
              {"train_size", e.train_size},
              {"clean_loss", e.clean_loss},
              {"adv_loss", e.adv_loss ? json(*e.adv_loss) : json(nullptr)},
              {"skipped_adv_batches", e.skipped_adv_batches},
              {"validation", report_to_json(e.validation)}};
}

json to_json(const RoundLog& r) {
  return json{{"round", r.round},
              {"train_size", r.train_size},
              {"hard_samples", r.hard_samples},
              {"augmented", r.augmented}};
}

void write_trainlog(std::ostream& out, const TrainLog& log) {
  for (const auto& e : log.epochs) out << to_json(e).dump() << '\n';
}

// ---- prediction ------------------------------------------------------------

namespace {

Prediction make_prediction(const NewsExample& ex, const Tensor& logits) {
  const Tensor p = softmax_scaled(logits, 1.0);
  Prediction pred;
  pred.id = ex.id;
  pred.gold = ex.label;
  pred.p_fake = p.at(0);
  pred.p_real = p.at(1);
  pred.pred = pred.p_real > pred.p_fake ? kReal : kFake;
  return pred;
}

PredictedFeatures eval_features(const TrainedModel& trained, const NewsExample& ex, const StopWords& stopwords) {
  const TokenSequence seq = encode_example(ex, trained, stopwords);
  const PredictedFeatures f = forward(trained.model, embed_prefix(trained.model, seq), seq.mask);
  return {f.logits.detach(), f.pooled.detach()};
}

}  // namespace

std::vector<Prediction> predict(const TrainedModel& trained, std::span<const NewsExample> examples,
                                const StopWords& stopwords) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const NewsExample& ex : examples) out.push_back(make_prediction(ex, eval_features(trained, ex, stopwords).logits));
  return out;
}

ClassificationReport report_for(std::span<const Prediction> predictions, bool divide_by_classes) {
  std::vector<int> preds, labels;
  for (const auto& p : predictions) {
    if (p.gold == kNoLabel) continue;
    preds.push_back(p.pred);
    labels.push_back(p.gold);
  }
  if (labels.empty()) throw Error(ErrorCode::Empty, "no labelled examples to evaluate");
  return evaluate_predictions(preds, labels, divide_by_classes);
}

ClassificationReport evaluate(const TrainedModel& trained, std::span<const NewsExample> examples,
                              const StopWords& stopwords, bool divide_by_classes) {
  return report_for(predict(trained, examples, stopwords), divide_by_classes);
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  out << "id\tgold\tpred\tp_fake\tp_real\n";
  char buf[64];
  for (const auto& p : predictions) {
    std::snprintf(buf, sizeof buf, "%.9f\t%.9f", p.p_fake, p.p_real);
    out << p.id << '\t' << label_name(p.gold) << '\t' << label_name(p.pred) << '\t' << buf << '\n';
  }
}

std::vector<NewsExample> harvest_hard_samples(const TrainedModel& trained, std::span<const NewsExample> train_set,
                                              std::span<const NewsExample> val_set, const StopWords& stopwords) {
  std::vector<NewsExample> hard;
  for (auto split : {train_set, val_set}) {
    const auto preds = predict(trained, split, stopwords);
    for (std::size_t i = 0; i < split.size(); ++i)
      if (split[i].label != kNoLabel && preds[i].pred != split[i].label) hard.push_back(split[i]);
  }
  std::stable_sort(hard.begin(), hard.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return hard;
}

// ---- training --------------------------------------------------------------

TrainResult train(const RunConfig& config, std::span<const NewsExample> train_set,
                  std::span<const NewsExample> val_set, const TrainOptions& options) {
  config.validate();
  const StopWords& stopwords = stopwords_or_default(options.stopwords);

  const auto cleaned = clean_dataset(train_set, stopwords);
  if (cleaned.empty()) throw Error(ErrorCode::Empty, "training set is empty after cleaning");
  if (val_set.empty()) throw Error(ErrorCode::Empty, "validation set is empty");

  TrainResult result;
  TrainedModel& tm = result.model;
  if (options.initial) {
    tm = clone(*options.initial);
  } else {
    Vocabulary vocab;
    if (options.vocab) {
      vocab = *options.vocab;
    } else {
      std::vector<std::string> texts;
      for (const auto& c : cleaned) texts.push_back(c.tokens_text);
      vocab = build_vocab(without_words(texts, config.added_tokens), config.vocab_size);
    }
    if (config.new_tokens) vocab = extend_vocab(vocab, config.added_tokens).vocab;

    ModelConfig mc = config.model;
    mc.vocab_size = vocab.size();
    mc.seed = mix_seed(config.seed, 1, config.model.seed);
    EncoderModel model = init_model(mc);
    if (config.new_tokens) {
      auto table = model.token_embedding.mutable_values();
      for (const auto& token : vocab.added_tokens()) {
        const auto id = static_cast<std::size_t>(*vocab.find(token));
        const auto row = init_added_token_embedding(vocab, model.token_embedding, token, mc.init_std,
                                                    mix_seed(config.seed, 2, id));
        std::copy(row.begin(), row.end(), table.begin() + static_cast<std::ptrdiff_t>(id * mc.hidden_dim));
      }
    }
    tm = TrainedModel{std::move(vocab), std::move(model)};
  }

  std::vector<TrainingExample> examples;
  examples.reserve(cleaned.size());
  for (const auto& c : cleaned) {
    if (c.label != kFake && c.label != kReal) {
      throw Error(ErrorCode::UnknownLabel, "training example '" + c.id + "' has no label");
    }
    examples.push_back({encode(c.tokens_text, tm.vocab, tm.model.config.max_len), c.label});
  }

  const std::size_t n = examples.size();
  const std::size_t batch = config.train_batch_size;
  const std::size_t batches_per_epoch = (n + batch - 1) / batch;
  const std::size_t total_steps = config.epochs * batches_per_epoch;
  std::vector<Tensor> params = tm.model.parameters();
  AdamState adam(AdamConfig{.learning_rate = config.learning_rate, .warmup_fraction = config.warmup}, params);
  const AdvConfig adv = config.adv;

  auto best = snapshot(tm.model);
  std::size_t since_best = 0;
  std::size_t step = 0;
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochLog entry;
    entry.round = options.round;
    entry.epoch = epoch;
    entry.train_size = n;
    entry.alpha = config.heated_loss ? config.schedule.alpha_at(epoch) : 1.0;

    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle(mix_seed(config.seed, 3 + options.round, epoch));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.uniform_index(i)]);

    double clean_sum = 0.0, adv_sum = 0.0;
    std::size_t adv_count = 0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t start = b * batch, stop = std::min(n, start + batch);
      std::vector<TrainingExample> mb;
      mb.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) mb.push_back(examples[order[i]]);

      const std::uint64_t dropout_seed = mix_seed(mix_seed(config.seed, 100 + options.round, epoch), b);
      const StepRecord rec = adversarial_training_step(tm.model, mb, entry.alpha, adv, dropout_seed);
      if (!std::isfinite(rec.clean_loss) || (rec.adv_loss && !std::isfinite(*rec.adv_loss))) {
        throw Error(ErrorCode::NonFiniteLoss, "non-finite loss at round " + std::to_string(options.round) +
                                                  " epoch " + std::to_string(epoch) + " batch " +
                                                  std::to_string(b));
      }
      clean_sum += rec.clean_loss * static_cast<double>(mb.size());
      if (rec.adv_loss) {
        adv_sum += *rec.adv_loss * static_cast<double>(mb.size());
        adv_count += mb.size();
      }
      if (rec.skipped_degenerate) ++entry.skipped_adv_batches;
      entry.learning_rate = adam_step(params, adam, step++, total_steps);
    }
    entry.clean_loss = clean_sum / static_cast<double>(n);
    if (adv_count > 0) entry.adv_loss = adv_sum / static_cast<double>(adv_count);
    entry.validation = evaluate(tm, val_set, stopwords, config.divide_by_classes);

    const double f1 = entry.validation.weighted_f1;
    log_info("round " + std::to_string(options.round) + " epoch " + std::to_string(epoch) + " loss " +
             std::to_string(entry.clean_loss) + " val f1 " + std::to_string(f1));
    result.log.epochs.push_back(std::move(entry));
    if (f1 > result.log.best_f1) {
      result.log.best_f1 = f1;
      result.log.best_index = result.log.epochs.size() - 1;
      best = snapshot(tm.model);
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }
  restore(tm.model, best);
  return result;
}

// ---- augmentation ----------------------------------------------------------

std::string_view to_string(Transformation t) noexcept {
  return t == Transformation::SynonymSwap ? "synonym_swap" : "word_drop";
}

AugmentedExample augment_example(const NewsExample& source, std::size_t index, const SynonymLexicon& lexicon,
                                 std::uint64_t seed, std::size_t round, const StopWords& stopwords) {
  std::vector<std::string> words;
  try {
    words = split_words(clean_text(source.raw_text, stopwords));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
  }
  if (words.size() <= 1) throw Error(ErrorCode::TooShort, "'" + source.id + "' has fewer than two words");

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (lexicon.contains(words[i])) candidates.push_back(i);

  Rng rng(mix_seed(seed, round, index));
  AugmentationRecord rec;
  rec.source_id = source.id;
  rec.round = round;
  rec.transformation = !candidates.empty() && rng.uniform() < 0.5 ? Transformation::SynonymSwap
                                                                   : Transformation::WordDrop;
  std::vector<std::size_t> pool;
  if (rec.transformation == Transformation::SynonymSwap) {
    pool = candidates;
  } else {
    pool.resize(words.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  }
  std::size_t count = 1 + rng.uniform_index(2);
  // A drop must leave at least one word.
  count = std::min(count, rec.transformation == Transformation::SynonymSwap ? pool.size() : pool.size() - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + rng.uniform_index(pool.size() - k);
    std::swap(pool[k], pool[j]);
    rec.positions.push_back(pool[k]);
  }
  std::sort(rec.positions.begin(), rec.positions.end());

  if (rec.transformation == Transformation::SynonymSwap) {
    for (std::size_t pos : rec.positions) {
      const auto syns = lexicon.synonyms(words[pos]);
      words[pos] = syns[rng.uniform_index(syns.size())];
    }
  } else {
    for (auto it = rec.positions.rbegin(); it != rec.positions.rend(); ++it)
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  for (const auto& w : words) {
    if (!rec.text.empty()) rec.text.push_back(' ');
    rec.text += w;
  }

  AugmentedExample out;
  out.example.id = source.id + "-aug" + std::to_string(round) + "-" + std::to_string(index);
  out.example.raw_text = rec.text;
  out.example.label = source.label;
  out.example.split = Split::Train;
  out.record = std::move(rec);
  return out;
}

std::vector<AugmentedExample> augment(std::span<const NewsExample> hard, const SynonymLexicon& lexicon,
                                      std::uint64_t seed, std::size_t round, const StopWords& stopwords) {
  std::vector<AugmentedExample> out;
  for (std::size_t i = 0; i < hard.size(); ++i) {
    try {
      out.push_back(augment_example(hard[i], i, lexicon, seed, round, stopwords));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooShort) throw;
      log_warning("skipping augmentation of '" + hard[i].id + "': too short");
    }
  }
  return out;
}

void write_augmented(std::ostream& out, std::span<const AugmentedExample> augmented) {
  out << "id\ttext\tlabel\tsource_id\ttransformation\tpositions\tround\n";
  for (const auto& a : augmented) {
    std::string positions;
    for (std::size_t p : a.record.positions) {
      if (!positions.empty()) positions.push_back(',');
      positions += std::to_string(p);
    }
    out << a.example.id << '\t' << a.record.text << '\t' << label_name(a.example.label) << '\t'
        << a.record.source_id << '\t' << to_string(a.record.transformation) << '\t' << positions << '\t'
        << a.record.round << '\n';
  }
}

PipelineResult run_pipeline(const RunConfig& config, std::span<const NewsExample> train_set,
                            std::span<const NewsExample> val_set, const SynonymLexicon& lexicon,
                            const TrainOptions& options) {
  const StopWords& stopwords = stopwords_or_default(options.stopwords);
  std::vector<NewsExample> current(train_set.begin(), train_set.end());

  TrainOptions first = options;
  first.round = 0;
  TrainResult run = train(config, current, val_set, first);
  PipelineResult result{std::move(run.model), std::move(run.log), {}};
  result.log.rounds.push_back({0, current.size(), 0, 0});

  for (std::size_t round = 1; round < config.rounds; ++round) {
    const auto hard = harvest_hard_samples(result.model, current, val_set, stopwords);
    auto augmented = augment(hard, lexicon, mix_seed(config.seed, 7, round), round, stopwords);
    log_info("round " + std::to_string(round) + ": " + std::to_string(hard.size()) + " hard samples, " +
             std::to_string(augmented.size()) + " augmented");
    if (augmented.empty()) {
      result.log.rounds.push_back({round, current.size(), hard.size(), 0});
      break;
    }
    for (const auto& a : augmented) current.push_back(a.example);
    result.log.rounds.push_back({round, current.size(), hard.size(), augmented.size()});

    TrainOptions next = options;
    next.round = round;
    next.initial = &result.model;
    TrainResult more = train(config, current, val_set, next);

    const std::size_t offset = result.log.epochs.size();
    for (auto& e : more.log.epochs) result.log.epochs.push_back(std::move(e));
    if (more.log.best_f1 > result.log.best_f1) {
      result.log.best_f1 = more.log.best_f1;
      result.log.best_index = offset + more.log.best_index;
      result.model = std::move(more.model);
    }
    for (auto& a : augmented) result.augmented.push_back(std::move(a));
  }
  return result;
}

// ---- fusion ----------------------------------------------------------------

std::vector<Prediction> predict_fused(const TrainedModel& a, const TrainedModel& b, const FusionHead& head,
                                      std::span<const NewsExample> examples, const StopWords& stopwords) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const NewsExample& ex : examples) {
    const Tensor logits = fuse(head, eval_features(a, ex, stopwords), eval_features(b, ex, stopwords));
    out.push_back(make_prediction(ex, logits.detach()));
  }
  return out;
}

FusionTrainResult train_fused(const TrainedModel& a, const TrainedModel& b, std::span<const NewsExample> val_set,
                              const FusionConfig& config, std::uint64_t seed, const StopWords& stopwords) {
  std::vector<std::pair<PredictedFeatures, PredictedFeatures>> features;
  std::vector<int> labels;
  std::vector<const NewsExample*> labelled;
  for (const NewsExample& ex : val_set) {
    if (ex.label == kNoLabel) continue;
    features.emplace_back(eval_features(a, ex, stopwords), eval_features(b, ex, stopwords));
    labels.push_back(ex.label);
    labelled.push_back(&ex);
  }
  if (features.empty()) throw Error(ErrorCode::Empty, "fusion needs labelled validation examples");

  const std::size_t ha = a.model.config.hidden_dim, hb = b.model.config.hidden_dim;
  FusionHead head = config.init == "pass_through"
                        ? pass_through_head(config.mode, ha, hb, config.hidden)
                        : init_fusion_head(config.mode, ha, hb, config.hidden, mix_seed(seed, 11));
  std::vector<Tensor> params = head.parameters();

  auto score = [&]() {
    std::vector<int> preds;
    preds.reserve(features.size());
    for (const auto& [fa, fb] : features) {
      const Tensor z = fuse(head, fa, fb);
      preds.push_back(z.at(1) > z.at(0) ? kReal : kFake);
    }
    return evaluate_predictions(preds, labels);
  };
  auto values_of = [&]() {
    std::vector<std::vector<double>> v;
    for (const Tensor& p : params) v.emplace_back(p.values().begin(), p.values().end());
    return v;
  };

  FusionTrainResult result;
  result.validation = score();
  result.epoch_f1.push_back(result.validation.weighted_f1);
  auto best = values_of();

  const std::size_t n = features.size();
  const std::size_t batch = config.batch_size;
  const std::size_t batches = (n + batch - 1) / batch;
  AdamState adam(AdamConfig{.learning_rate = config.learning_rate, .warmup_fraction = 0.0}, params);
  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle(mix_seed(seed, 12, epoch));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.uniform_index(i)]);
    for (std::size_t bi = 0; bi < batches; ++bi) {
      std::vector<Tensor> rows;
      std::vector<int> ys;
      for (std::size_t i = bi * batch; i < std::min(n, (bi + 1) * batch); ++i) {
        rows.push_back(fuse(head, features[order[i]].first, features[order[i]].second));
        ys.push_back(labels[order[i]]);
      }
      for (Tensor& p : params) p.zero_grad();
      backward(batch_loss(stack_rows(rows), ys, 1.0));
      adam_step(params, adam, step++, batches * config.epochs);
    }
    const ClassificationReport report = score();
    result.epoch_f1.push_back(report.weighted_f1);
    if (report.weighted_f1 > result.validation.weighted_f1) {
      result.validation = report;
      result.best_epoch = epoch;
      best = values_of();
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    std::copy(best[i].begin(), best[i].end(), params[i].mutable_values().begin());
  result.head = std::move(head);
  return result;
}

// ---- ablation --------------------------------------------------------------

std::vector<std::pair<std::string, RunConfig>> ablation_configs(const RunConfig& base) {
  RunConfig off = base;
  off.new_tokens = false;
  off.heated_loss = false;
  off.adv.enabled = false;
  off.fusion = false;

  RunConfig fgm = off;
  fgm.adv.enabled = true;
  RunConfig heated = off;
  heated.heated_loss = true;
  RunConfig tokens = off;
  tokens.new_tokens = true;
  RunConfig all = off;
  all.adv.enabled = true;
  all.heated_loss = true;
  all.new_tokens = true;
  return {{"baseline", off}, {"+FGM", fgm}, {"+heated-loss", heated}, {"+new-tokens", tokens}, {"+all-three", all}};
}

std::vector<AblationRow> ablation_suite(const RunConfig& base, std::span<const NewsExample> train_set,
                                        std::span<const NewsExample> val_set,
                                        std::span<const NewsExample> test_set, const AblationOptions& options) {
  const StopWords& stopwords = stopwords_or_default(options.stopwords);
  const SynonymLexicon& lexicon = options.lexicon ? *options.lexicon : default_lexicon();

  auto configs = ablation_configs(base);
  // Second fusion source: all three methods, base tokenizer, next seed.
  RunConfig source_b = configs.back().second;
  source_b.new_tokens = false;
  source_b.seed = base.seed + 1;

  std::vector<RunConfig> jobs;
  for (const auto& [name, cfg] : configs) jobs.push_back(cfg);
  jobs.push_back(source_b);

  TrainOptions topts;
  topts.stopwords = &stopwords;
  std::vector<std::optional<TrainedModel>> models(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        models[i] = run_pipeline(jobs[i], train_set, val_set, lexicon, topts).model;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<AblationRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    rows.push_back({configs[i].first, configs[i].second,
                    evaluate(*models[i], test_set, stopwords, base.divide_by_classes)});
  }
  RunConfig fused_cfg = configs.back().second;
  fused_cfg.fusion = true;
  const TrainedModel& a = *models[configs.size() - 1];
  const TrainedModel& b = *models.back();
  const FusionTrainResult fused = train_fused(a, b, val_set, fused_cfg.fusion_head, base.seed, stopwords);
  rows.push_back({"fused", fused_cfg,
                  report_for(predict_fused(a, b, fused.head, test_set, stopwords), base.divide_by_classes)});
  return rows;
}

std::vector<AblationRow> epsilon_sweep(const RunConfig& base, std::span<const double> epsilons,
                                       std::span<const NewsExample> train_set,
                                       std::span<const NewsExample> val_set,
                                       std::span<const NewsExample> test_set, const AblationOptions& options) {
  const StopWords& stopwords = stopwords_or_default(options.stopwords);
  const SynonymLexicon& lexicon = options.lexicon ? *options.lexicon : default_lexicon();
  const RunConfig fgm = ablation_configs(base).at(1).second;
  TrainOptions topts;
  topts.stopwords = &stopwords;
  std::vector<AblationRow> rows;
  for (double eps : epsilons) {
    RunConfig cfg = fgm;
    cfg.adv.epsilon = eps;
    const auto model = run_pipeline(cfg, train_set, val_set, lexicon, topts).model;
    char name[64];
    std::snprintf(name, sizeof name, "+FGM eps=%g", eps);
    rows.push_back({name, cfg, evaluate(model, test_set, stopwords, base.divide_by_classes)});
  }
  return rows;
}

std::string ablation_table(std::span<const AblationRow> rows) {
  std::vector<std::pair<std::string, ClassificationReport>> table;
  for (const auto& r : rows) table.emplace_back(r.name, r.report);
  return render_table(table);
}

}  // namespace hft
