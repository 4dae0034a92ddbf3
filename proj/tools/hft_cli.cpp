// hft: command-line front end for the fine-tuning toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hft/config.hpp"
#include "hft/error.hpp"
#include "hft/lexicon.hpp"
#include "hft/log.hpp"
#include "hft/pipeline.hpp"
#include "hft/rng.hpp"
#include "hft/textprep.hpp"
#include "hft/tokenizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string stopwords_path;
  bool debug = false;
  bool verbose = false;
};

hft::RunConfig load_run_config(const Globals& g) {
  json doc = g.config_path.empty() ? json::object() : hft::load_config_file(g.config_path);
  for (const auto& o : g.overrides) hft::apply_override(doc, o);
  if (g.seed) doc["seed"] = *g.seed;
  return hft::run_config_from_json(doc);
}

hft::StopWords load_stopwords(const Globals& g) {
  return g.stopwords_path.empty() ? hft::default_stopwords() : hft::load_stopwords(g.stopwords_path);
}

hft::SynonymLexicon load_lexicon(const std::string& path) {
  return path.empty() ? hft::default_lexicon() : hft::load_lexicon(path);
}

std::vector<hft::NewsExample> load(const std::string& path, hft::Split split, bool require_label = true) {
  return hft::load_dataset(path, hft::LoadOptions{split, require_label});
}

fs::path out_dir(const Globals& g) {
  if (g.out.empty()) throw hft::Error(hft::ErrorCode::InvalidConfig, "--out is required for this command");
  fs::create_directories(g.out);
  return g.out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hft::Error(hft::ErrorCode::FileNotFound, "cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const json& doc) { open_out(path) << doc.dump(2) << '\n'; }

void print_report(const std::string& name, const hft::ClassificationReport& report) {
  const std::pair<std::string, hft::ClassificationReport> row{name, report};
  std::cout << hft::render_table(std::span(&row, 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-classification fine-tuning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Run config (.json or .toml)")->check(CLI::ExistingFile);
  app.add_option("--override", g.overrides, "dotted.key=value applied after the config (repeatable)");
  app.add_option("--seed", g.seed, "Overrides the config seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--stopwords", g.stopwords_path, "Stop-word list (one per line)")->check(CLI::ExistingFile);
  app.add_flag("--debug", g.debug, "Debug logging; internal errors are rethrown");
  app.add_flag("-v,--verbose", g.verbose, "Progress logging");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Clean a dataset and print statistics");
  std::string pre_input;
  pre->add_option("--input", pre_input, "Dataset (.tsv/.csv)")->required()->check(CLI::ExistingFile);

  // build-vocab
  auto* bv = app.add_subcommand("build-vocab", "Build a subword vocabulary from training text");
  std::string bv_input;
  std::size_t bv_size = 1000;
  bool bv_add = false;
  bv->add_option("--input", bv_input, "Training dataset")->required()->check(CLI::ExistingFile);
  bv->add_option("--size", bv_size, "Target vocabulary size (>= 64)");
  bv->add_flag("--add-domain-tokens", bv_add, "Append the configured domain tokens");

  // train
  auto* tr = app.add_subcommand("train", "Train a model (with augmentation rounds)");
  std::string tr_train, tr_val, tr_test, tr_lexicon, tr_vocab, tr_resume;
  tr->add_option("--train", tr_train, "Training dataset")->required()->check(CLI::ExistingFile);
  tr->add_option("--val", tr_val, "Validation dataset")->required()->check(CLI::ExistingFile);
  tr->add_option("--test", tr_test, "Optional test dataset for the final report")->check(CLI::ExistingFile);
  tr->add_option("--lexicon", tr_lexicon, "Synonym lexicon (word<TAB>synonym)")->check(CLI::ExistingFile);
  tr->add_option("--vocab", tr_vocab, "Use this vocabulary instead of building one")->check(CLI::ExistingFile);
  tr->add_option("--resume", tr_resume, "Continue from this checkpoint")->check(CLI::ExistingFile);

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a labelled dataset");
  std::string ev_ckpt, ev_input;
  ev->add_option("--checkpoint", ev_ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--input", ev_input, "Labelled dataset")->required()->check(CLI::ExistingFile);

  // predict
  auto* pr = app.add_subcommand("predict", "Write predictions for a dataset");
  std::string pr_ckpt, pr_input;
  pr->add_option("--checkpoint", pr_ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  pr->add_option("--input", pr_input, "Dataset; the label column is optional")->required()->check(CLI::ExistingFile);

  // fuse
  auto* fu = app.add_subcommand("fuse", "Train a fusion head over two checkpoints");
  std::string fu_a, fu_b, fu_val, fu_test;
  fu->add_option("--checkpoint-a", fu_a, "First source model")->required()->check(CLI::ExistingFile);
  fu->add_option("--checkpoint-b", fu_b, "Second source model")->required()->check(CLI::ExistingFile);
  fu->add_option("--val", fu_val, "Validation dataset the head is trained on")->required()->check(CLI::ExistingFile);
  fu->add_option("--test", fu_test, "Optional test dataset")->check(CLI::ExistingFile);

  // augment
  auto* au = app.add_subcommand("augment", "Harvest misclassified examples and augment them");
  std::string au_ckpt, au_train, au_val, au_lexicon;
  std::size_t au_round = 1;
  au->add_option("--checkpoint", au_ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  au->add_option("--train", au_train, "Training dataset")->required()->check(CLI::ExistingFile);
  au->add_option("--val", au_val, "Validation dataset")->required()->check(CLI::ExistingFile);
  au->add_option("--lexicon", au_lexicon, "Synonym lexicon")->check(CLI::ExistingFile);
  au->add_option("--round", au_round, "Round index recorded in ids");

  // ablate
  auto* ab = app.add_subcommand("ablate", "Run the six-row ablation table");
  std::string ab_train, ab_val, ab_test, ab_lexicon;
  std::size_t ab_threads = 1;
  std::vector<double> ab_sweep;
  ab->add_option("--train", ab_train, "Training dataset")->required()->check(CLI::ExistingFile);
  ab->add_option("--val", ab_val, "Validation dataset")->required()->check(CLI::ExistingFile);
  ab->add_option("--test", ab_test, "Test dataset")->required()->check(CLI::ExistingFile);
  ab->add_option("--lexicon", ab_lexicon, "Synonym lexicon")->check(CLI::ExistingFile);
  ab->add_option("--threads", ab_threads, "Worker threads");
  ab->add_option("--epsilon-sweep", ab_sweep, "Also run +FGM at each of these epsilons (e.g. 0.1,0.5,1.0)")
      ->delimiter(',');

  // top-split-tokens
  auto* ts = app.add_subcommand("top-split-tokens", "Most frequent words split into several subwords");
  std::string ts_train, ts_val, ts_vocab;
  std::size_t ts_k = 6, ts_size = 1000;
  ts->add_option("--train", ts_train, "Training dataset")->required()->check(CLI::ExistingFile);
  ts->add_option("--val", ts_val, "Validation dataset")->check(CLI::ExistingFile);
  ts->add_option("--vocab", ts_vocab, "Vocabulary file (built from --train when absent)")->check(CLI::ExistingFile);
  ts->add_option("--size", ts_size, "Vocabulary size when building");
  ts->add_option("--k", ts_k, "How many words to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  hft::set_log_level(g.debug ? hft::LogLevel::Debug : g.verbose ? hft::LogLevel::Info : hft::LogLevel::Warning);

  try {
    const hft::StopWords stopwords = load_stopwords(g);

    if (*pre) {
      const auto data = load(pre_input, hft::Split::Train, false);
      std::size_t dropped = 0;
      const auto cleaned = hft::clean_dataset(data, stopwords, &dropped);
      const auto stats = hft::dataset_stats(data, stopwords);
      std::printf("examples %zu\ndropped %zu\nfake %zu\nreal %zu\nmean_tokens %.3f\n", stats.total, dropped,
                  stats.per_label[0], stats.per_label[1], stats.mean_tokens);
      if (!g.out.empty()) {
        std::vector<hft::NewsExample> rows;
        for (const auto& c : cleaned) rows.push_back({c.id, c.tokens_text, c.label, hft::Split::Train});
        auto f = open_out(out_dir(g) / "cleaned.tsv");
        hft::write_dataset(f, rows);
      }
    } else if (*bv) {
      const hft::RunConfig config = load_run_config(g);
      std::vector<std::string> texts;
      for (const auto& c : hft::clean_dataset(load(bv_input, hft::Split::Train), stopwords))
        texts.push_back(c.tokens_text);
      hft::Vocabulary vocab = hft::build_vocab(hft::without_words(texts, config.added_tokens), bv_size);
      if (bv_add) vocab = hft::extend_vocab(vocab, config.added_tokens).vocab;
      if (g.out.empty()) {
        vocab.write(std::cout);
      } else {
        auto f = open_out(out_dir(g) / "vocab.txt");
        vocab.write(f);
      }
      std::cerr << "vocabulary size " << vocab.size() << '\n';
    } else if (*tr) {
      const hft::RunConfig config = load_run_config(g);
      const auto train_set = load(tr_train, hft::Split::Train);
      const auto val_set = load(tr_val, hft::Split::Validation);
      const hft::SynonymLexicon lexicon = load_lexicon(tr_lexicon);
      const fs::path dir = out_dir(g);

      std::optional<hft::Vocabulary> vocab;
      std::optional<hft::TrainedModel> resume;
      hft::TrainOptions options;
      options.stopwords = &stopwords;
      if (!tr_vocab.empty()) {
        std::ifstream f(tr_vocab);
        vocab = hft::Vocabulary::read(f);
        options.vocab = &*vocab;
      }
      if (!tr_resume.empty()) {
        resume = hft::load_trained_model(tr_resume);
        options.initial = &*resume;
      }
      const auto result = hft::run_pipeline(config, train_set, val_set, lexicon, options);

      hft::save_trained_model(dir / "checkpoint.bin", result.model, hft::to_json(config));
      {
        auto f = open_out(dir / "trainlog.jsonl");
        hft::write_trainlog(f, result.log);
      }
      {
        auto f = open_out(dir / "augmented.tsv");
        hft::write_augmented(f, result.augmented);
      }
      const auto& best = result.log.epochs.at(result.log.best_index);
      json report{{"config", hft::to_json(config)},
                  {"best_round", best.round},
                  {"best_epoch", best.epoch},
                  {"validation", hft::report_to_json(best.validation)},
                  {"rounds", json::array()}};
      for (const auto& r : result.log.rounds) report["rounds"].push_back(hft::to_json(r));
      const auto& eval_set_path = tr_test.empty() ? tr_val : tr_test;
      const auto eval_set = tr_test.empty() ? val_set : load(tr_test, hft::Split::Test);
      const auto preds = hft::predict(result.model, eval_set, stopwords);
      {
        auto f = open_out(dir / "predictions.tsv");
        hft::write_predictions(f, preds);
      }
      const auto eval_report = hft::report_for(preds, config.divide_by_classes);
      report[tr_test.empty() ? "predictions_on_validation" : "test"] = hft::report_to_json(eval_report);
      report["predictions_source"] = fs::path(eval_set_path).filename().string();
      write_json(dir / "report.json", report);
      print_report(tr_test.empty() ? "validation" : "test", eval_report);
    } else if (*ev) {
      const hft::RunConfig config = load_run_config(g);
      const auto model = hft::load_trained_model(ev_ckpt);
      const auto data = load(ev_input, hft::Split::Test);
      const auto preds = hft::predict(model, data, stopwords);
      const auto report = hft::report_for(preds, config.divide_by_classes);
      print_report("model", report);
      if (!g.out.empty()) {
        const fs::path dir = out_dir(g);
        write_json(dir / "report.json", json{{"test", hft::report_to_json(report)}});
        auto f = open_out(dir / "predictions.tsv");
        hft::write_predictions(f, preds);
      }
    } else if (*pr) {
      const auto model = hft::load_trained_model(pr_ckpt);
      const auto data = load(pr_input, hft::Split::Test, false);
      const auto preds = hft::predict(model, data, stopwords);
      if (g.out.empty()) {
        hft::write_predictions(std::cout, preds);
      } else {
        auto f = open_out(out_dir(g) / "predictions.tsv");
        hft::write_predictions(f, preds);
      }
    } else if (*fu) {
      const hft::RunConfig config = load_run_config(g);
      const auto a = hft::load_trained_model(fu_a);
      const auto b = hft::load_trained_model(fu_b);
      const auto val_set = load(fu_val, hft::Split::Validation);
      const fs::path dir = out_dir(g);
      const auto fused = hft::train_fused(a, b, val_set, config.fusion_head, config.seed, stopwords);
      hft::save_checkpoint(dir / "fusion.bin", hft::to_checkpoint(fused.head, hft::to_json(config)));
      json report{{"validation", hft::report_to_json(fused.validation)},
                  {"best_epoch", fused.best_epoch},
                  {"epoch_f1", fused.epoch_f1}};
      const auto eval_set = fu_test.empty() ? val_set : load(fu_test, hft::Split::Test);
      const auto preds = hft::predict_fused(a, b, fused.head, eval_set, stopwords);
      {
        auto f = open_out(dir / "predictions.tsv");
        hft::write_predictions(f, preds);
      }
      if (!fu_test.empty()) report["test"] = hft::report_to_json(hft::report_for(preds, config.divide_by_classes));
      write_json(dir / "report.json", report);
      print_report("fused", hft::report_for(preds, config.divide_by_classes));
    } else if (*au) {
      const hft::RunConfig config = load_run_config(g);
      const auto model = hft::load_trained_model(au_ckpt);
      const auto train_set = load(au_train, hft::Split::Train);
      const auto val_set = load(au_val, hft::Split::Validation);
      const auto hard = hft::harvest_hard_samples(model, train_set, val_set, stopwords);
      const auto augmented = hft::augment(hard, load_lexicon(au_lexicon),
                                          hft::mix_seed(config.seed, 7, au_round), au_round, stopwords);
      std::cerr << hard.size() << " hard samples, " << augmented.size() << " augmented\n";
      if (g.out.empty()) {
        hft::write_augmented(std::cout, augmented);
      } else {
        auto f = open_out(out_dir(g) / "augmented.tsv");
        hft::write_augmented(f, augmented);
      }
    } else if (*ab) {
      const hft::RunConfig config = load_run_config(g);
      const auto lexicon = load_lexicon(ab_lexicon);
      hft::AblationOptions options;
      options.threads = ab_threads;
      options.stopwords = &stopwords;
      options.lexicon = &lexicon;
      const auto train_set = load(ab_train, hft::Split::Train);
      const auto val_set = load(ab_val, hft::Split::Validation);
      const auto test_set = load(ab_test, hft::Split::Test);
      auto rows = hft::ablation_suite(config, train_set, val_set, test_set, options);
      if (!ab_sweep.empty()) {
        for (auto& r : hft::epsilon_sweep(config, ab_sweep, train_set, val_set, test_set, options))
          rows.push_back(std::move(r));
      }
      const std::string table = hft::ablation_table(rows);
      std::cout << table;
      if (!g.out.empty()) {
        const fs::path dir = out_dir(g);
        open_out(dir / "ablation.txt") << table;
        json doc = json::array();
        for (const auto& r : rows)
          doc.push_back({{"name", r.name}, {"config", hft::to_json(r.config)}, {"report", hft::report_to_json(r.report)}});
        write_json(dir / "ablation.json", doc);
      }
    } else if (*ts) {
      std::vector<std::string> corpus;
      auto add = [&](const std::string& path, hft::Split split) {
        for (const auto& c : hft::clean_dataset(load(path, split), stopwords)) corpus.push_back(c.tokens_text);
      };
      add(ts_train, hft::Split::Train);
      if (!ts_val.empty()) add(ts_val, hft::Split::Validation);
      hft::Vocabulary vocab;
      if (!ts_vocab.empty()) {
        std::ifstream f(ts_vocab);
        vocab = hft::Vocabulary::read(f);
      } else {
        std::vector<std::string> train_text;
        for (const auto& c : hft::clean_dataset(load(ts_train, hft::Split::Train), stopwords))
          train_text.push_back(c.tokens_text);
        vocab = hft::build_vocab(hft::without_words(train_text, load_run_config(g).added_tokens), ts_size);
      }
      for (const auto& [word, count] : hft::top_split_tokens(corpus, vocab, ts_k))
        std::cout << word << '\t' << count << '\n';
    }
  } catch (const hft::Error& e) {
    if (g.debug && !hft::is_validation_error(e.code())) throw;
    std::cerr << "error (" << hft::to_string(e.code()) << "): " << e.what() << '\n';
    return hft::is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    if (g.debug) throw;
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
