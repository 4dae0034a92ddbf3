// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hft/advtrain.hpp"
#include "hft/error.hpp"
#include "hft/objective.hpp"
#include "hft/pipeline.hpp"
#include "hft/rng.hpp"
#include "hft/synthetic.hpp"
#include "support/finite_diff.hpp"
#include "support/metrics_oracle.hpp"

namespace {

using namespace hft;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<NewsExample> shipped(const std::string& kind, const std::string& file, Split split) {
  return load_dataset(std::string(HFT_DATA_DIR) + "/synthetic/" + kind + "/" + file, LoadOptions{.split = split});
}

// ---- 1 ---------------------------------------------------------------------

ModelConfig miniature(std::uint64_t seed) {
  ModelConfig c;
  c.vocab_size = 12;
  c.max_len = 6;
  c.hidden_dim = 4;
  c.num_layers = 1;
  c.num_heads = 2;
  c.ff_dim = 8;
  c.dropout = 0.0;
  c.init_std = 0.5;
  c.seed = seed;
  return c;
}

TokenSequence random_sequence(Rng& rng, std::size_t max_len, std::size_t vocab) {
  TokenSequence s;
  s.ids.assign(max_len, Vocabulary::kPad);
  s.mask.assign(max_len, 0);
  s.true_length = 2 + rng.uniform_index(max_len - 1);
  s.ids[0] = Vocabulary::kCls;
  for (std::size_t i = 0; i < s.true_length; ++i) {
    if (i > 0) s.ids[i] = static_cast<TokenId>(3 + rng.uniform_index(vocab - 3));
    s.mask[i] = 1;
  }
  return s;
}

Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t models = 0, largest = 0, checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EncoderModel m = init_model(miniature(seed));
    largest = std::max(largest, m.parameter_count());
    Rng rng(mix_seed(seed, 99));
    const std::vector<TokenSequence> batch = {random_sequence(rng, 6, 12), random_sequence(rng, 6, 12)};
    const std::vector<int> labels = {static_cast<int>(rng.uniform_index(2)), static_cast<int>(rng.uniform_index(2))};
    for (double alpha : {0.5, 1.0, 4.0}) {
      auto loss = [&] {
        std::vector<Tensor> rows;
        for (const auto& s : batch) rows.push_back(forward(m, embed(m, s), s.mask).logits);
        return batch_loss(stack_rows(rows), labels, alpha);
      };
      // Floor 1e-5: some entries (the key biases) have an exact gradient of
      // zero, where the central difference only measures roundoff (~1e-10).
      const auto r = testing::check_gradients(m.parameters(), loss, 1e-5, 1e-5);
      worst = std::max(worst, r.max_rel_error);
      checked += r.checked;
    }
    ++models;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && largest <= 500 && secs < 60.0,
          fmt("%zu models (<= %zu params), %zu derivatives, max rel err %.3g < 1e-4, %.1f s < 60 s", models,
              largest, checked, worst, secs)};
}

// ---- 2 ---------------------------------------------------------------------

std::vector<double> plain_softmax(const std::vector<double>& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    p[j] = std::exp(z[j] - mx);
    total += p[j];
  }
  for (double& v : p) v /= total;
  return p;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

Outcome softmax_contract() {
  Rng rng(2);
  std::size_t bitwise_mismatch = 0, entropy_violations = 0;
  double worst_sum = 0.0, worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    std::vector<double> z(n);
    for (double& v : z) v = rng.normal(0.0, 3.0);
    const auto ref = plain_softmax(z);
    const Tensor p1 = softmax_scaled(Tensor::vector(z), 1.0);
    for (std::size_t j = 0; j < n; ++j) bitwise_mismatch += p1.at(j) != ref[j];

    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
      const Tensor p = softmax_scaled(Tensor::vector(z), alpha);
      const auto pv = p.values();
      worst_sum = std::max(worst_sum, std::abs(std::accumulate(pv.begin(), pv.end(), 0.0) - 1.0));
      const int label = static_cast<int>(rng.uniform_index(n));
      const auto lv = heated_ce_loss(z, label, alpha);
      for (std::size_t j = 0; j < n; ++j) {
        const double expected = alpha * (pv[j] - (static_cast<int>(j) == label ? 1.0 : 0.0));
        worst_grad = std::max(worst_grad, std::abs(lv.logit_gradient[j] - expected));
      }
    }

    // Two-class logits, never equal.
    double a = rng.normal(0.0, 2.0), b = rng.normal(0.0, 2.0);
    if (std::abs(a - b) < 1e-3) b = a + 0.5;
    double prev = INFINITY;
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
      const Tensor p = softmax_scaled(Tensor::vector({a, b}), alpha);
      const double h = entropy(p.values());
      if (!(h < prev)) ++entropy_violations;
      prev = h;
    }
  }
  return {bitwise_mismatch == 0 && worst_sum <= 1e-12 && entropy_violations == 0 && worst_grad <= 1e-10,
          fmt("alpha=1 bitwise mismatches %zu; |sum-1| max %.2g <= 1e-12; entropy violations %zu/100 pairs; "
              "|grad - a(p-onehot)| max %.2g <= 1e-10",
              bitwise_mismatch, worst_sum, entropy_violations, worst_grad)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome fgm_contract() {
  Rng rng(3);
  double worst_norm = 0.0, worst_inner = 0.0;
  std::size_t beaten = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + rng.uniform_index(8), cols = 2 + rng.uniform_index(7);
    const double eps = 0.01 + rng.uniform() * 2.0;
    std::vector<double> g(rows * cols);
    for (double& v : g) v = rng.normal(0.0, std::pow(10.0, rng.uniform() * 4.0 - 2.0));
    const Tensor grad = Tensor::matrix(rows, cols, g);
    const auto rec = fgm_perturbation(grad, eps);
    const auto r = rec.r_adv.values();
    double norm2 = 0.0, inner = 0.0, gnorm2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      norm2 += r[i] * r[i];
      inner += r[i] * g[i];
      gnorm2 += g[i] * g[i];
    }
    const double gnorm = std::sqrt(gnorm2);
    worst_norm = std::max(worst_norm, std::abs(std::sqrt(norm2) - eps));
    worst_inner = std::max(worst_inner, std::abs(inner + eps * gnorm) / std::max(1.0, eps * gnorm));

    // Linearized loss increase of a perturbation d is −⟨g, d⟩ (g is the
    // log-likelihood gradient).
    const double adv_gain = -inner;
    bool best = true;
    for (int k = 0; k < 1000 && best; ++k) {
      std::vector<double> d(g.size());
      double dn = 0.0;
      for (double& v : d) {
        v = rng.normal();
        dn += v * v;
      }
      dn = std::sqrt(dn);
      double gain = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) gain -= g[i] * d[i] * eps / dn;
      best = adv_gain > gain;
    }
    beaten += best;
  }
  return {worst_norm <= 1e-9 && worst_inner <= 1e-9 && beaten == 1000,
          fmt("1000 tensors: | |r|-eps | max %.2g <= 1e-9; <r,g>+eps|g| rel max %.2g <= 1e-9; "
              "beats 1000 random same-norm directions in %zu/1000",
              worst_norm, worst_inner, beaten)};
}

// ---- 4 ---------------------------------------------------------------------

RunConfig tiny_run(std::uint64_t seed) {
  RunConfig c = desk_scale_config();
  c.model.hidden_dim = 16;
  c.model.num_layers = 1;
  c.model.num_heads = 2;
  c.model.ff_dim = 32;
  c.model.max_len = 32;
  c.vocab_size = 120;
  c.epochs = 4;
  c.rounds = 1;
  c.seed = seed;
  return c;
}

Outcome adversarial_loss_property() {
  const auto train_set = shipped("noisy", "train.tsv", Split::Train);
  const auto val_set = shipped("noisy", "validation.tsv", Split::Validation);
  const AdvConfig adv{.enabled = true, .epsilon = 0.1};
  std::size_t ok = 0, total = 0, skipped = 0;
  for (std::uint64_t seed : {1, 2}) {
    TrainedModel m = train(tiny_run(seed), train_set, val_set).model;
    Rng rng(mix_seed(seed, 44));
    for (int b = 0; b < 50; ++b) {
      std::vector<TrainingExample> batch;
      for (int i = 0; i < 8; ++i) {
        const auto& ex = train_set[rng.uniform_index(train_set.size())];
        batch.push_back({encode_example(ex, m, default_stopwords()), ex.label});
      }
      const auto rec = adversarial_training_step(m.model, batch, 1.0, adv, 0, /*training=*/false);
      ++total;
      if (rec.skipped_degenerate || !rec.adv_loss) {
        ++skipped;
        continue;
      }
      ok += *rec.adv_loss >= rec.clean_loss;
    }
  }
  const double share = static_cast<double>(ok) / static_cast<double>(total);
  return {share >= 0.95, fmt("eps=0.1, 2 trained models x 50 batches: adv >= clean on %zu/%zu (%.0f%% >= 95%%), "
                             "%zu degenerate",
                             ok, total, 100.0 * share, skipped)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome metrics_oracle() {
  Rng rng(5);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<int> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.uniform_index(2));
      g[i] = static_cast<int>(rng.uniform_index(2));
    }
    const auto r = evaluate_predictions(p, g);
    const auto o = testing::brute_force_weighted(p, g);
    mismatches += r.accuracy != o.accuracy || r.weighted_precision != o.precision ||
                  r.weighted_recall != o.recall || r.weighted_f1 != o.f1;
  }
  const auto hand = evaluate_predictions(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 1});
  const bool hand_ok = std::abs(hand.weighted_precision - 0.875) <= 1e-6 &&
                       std::abs(hand.weighted_recall - 0.75) <= 1e-6 &&
                       std::abs(hand.weighted_f1 - 0.807692) <= 1e-6;
  return {mismatches == 0 && hand_ok,
          fmt("1000 random vectors, %zu inexact; hand example P/R/F1 = %.6f / %.6f / %.6f", mismatches,
              hand.weighted_precision, hand.weighted_recall, hand.weighted_f1)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome tokenizer_extension() {
  const auto train_set = shipped("separable", "train.tsv", Split::Train);
  const auto domain = default_domain_tokens();
  std::vector<std::string> corpus;
  for (const auto& c : clean_dataset(train_set, default_stopwords())) corpus.push_back(c.tokens_text);
  const Vocabulary base = build_vocab(without_words(corpus, domain), desk_scale_config().vocab_size);
  const Vocabulary extended = extend_vocab(base, domain).vocab;
  std::string detail;
  bool pass = true;
  for (const auto& t : domain) {
    const auto before = encode(t, base).true_length - 1;
    const auto after = encode(t, extended).true_length - 1;
    const bool one = after == 1 && extended.is_added(encode(t, extended).ids[1]);
    pass &= before >= 2 && one;
    detail += fmt("%s %zu->%zu; ", t.c_str(), before, after);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ---- 7 ---------------------------------------------------------------------

Outcome desk_learning() {
  const auto t0 = Clock::now();
  const auto train_set = shipped("separable", "train.tsv", Split::Train);
  const auto val_set = shipped("separable", "validation.tsv", Split::Validation);
  RunConfig c = ablation_configs(desk_scale_config()).front().second;
  c.epochs = 15;
  const auto r = train(c, train_set, val_set);
  double best = 0.0;
  std::size_t first = 0;
  for (const auto& e : r.log.epochs) {
    if (e.validation.accuracy >= 0.95 && first == 0) first = e.epoch + 1;
    best = std::max(best, e.validation.accuracy);
  }
  const double secs = seconds_since(t0);
  return {best >= 0.95 && first != 0 && first <= 15 && secs < 300.0,
          fmt("baseline on %zu/%zu examples: val accuracy %.3f >= 0.95 first at epoch %zu of %zu, %.1f s < 300 s",
              train_set.size(), val_set.size(), best, first, r.log.epochs.size(), secs)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome ablation_direction() {
  const auto t0 = Clock::now();
  const auto train_set = shipped("noisy", "train.tsv", Split::Train);
  const auto val_set = shipped("noisy", "validation.tsv", Split::Validation);
  const auto test_set = shipped("noisy", "test.tsv", Split::Test);
  const auto& sw = default_stopwords();

  const std::vector<std::string> wanted = {"baseline", "+FGM", "+heated-loss", "+all-three"};
  std::vector<double> mean(wanted.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig base = desk_scale_config();
    base.seed = seed;
    for (const auto& [name, cfg] : ablation_configs(base)) {
      const auto it = std::find(wanted.begin(), wanted.end(), name);
      if (it == wanted.end()) continue;
      const auto model = run_pipeline(cfg, train_set, val_set, default_lexicon()).model;
      mean[static_cast<std::size_t>(it - wanted.begin())] += evaluate(model, test_set, sw).weighted_f1 / 5.0;
    }
  }
  bool pass = true;
  std::string detail = "noisy, 5 seeds, mean test F1:";
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    detail += fmt(" %s %.4f", wanted[i].c_str(), mean[i]);
    if (i > 0) pass &= mean[i] >= mean[0] - 0.005;
  }

  // Complementary corpus: each source model's vocabulary is blind to one
  // keyword family; the fused head sees both.
  const auto ctrain = shipped("complementary", "train.tsv", Split::Train);
  const auto cval = shipped("complementary", "validation.tsv", Split::Validation);
  const auto ctest = shipped("complementary", "test.tsv", Split::Test);
  RunConfig cfg = desk_scale_config();
  cfg.new_tokens = false;
  cfg.rounds = 1;
  std::vector<TrainedModel> sources;
  std::vector<double> source_f1;
  for (KeywordFamily blind : {KeywordFamily::A, KeywordFamily::B}) {
    const Vocabulary vocab = build_vocab(family_view(ctrain, blind, sw), cfg.vocab_size);
    cfg.seed = blind == KeywordFamily::A ? 1 : 2;
    TrainOptions opts;
    opts.vocab = &vocab;
    sources.push_back(run_pipeline(cfg, ctrain, cval, default_lexicon(), opts).model);
    source_f1.push_back(evaluate(sources.back(), ctest, sw).weighted_f1);
  }
  const auto fused = train_fused(sources[0], sources[1], cval, cfg.fusion_head, cfg.seed, sw);
  const double fused_f1 = report_for(predict_fused(sources[0], sources[1], fused.head, ctest, sw)).weighted_f1;
  pass &= fused_f1 >= source_f1[0] - 0.005 && fused_f1 >= source_f1[1] - 0.005;
  detail += fmt(" (each >= baseline - 0.005); complementary test F1: blind-A %.4f, blind-B %.4f, fused %.4f "
                "(>= each - 0.005); %.0f s",
                source_f1[0], source_f1[1], fused_f1, seconds_since(t0));
  return {pass, detail};
}

// ---- 9 ---------------------------------------------------------------------

Outcome determinism() {
  const auto train_set = shipped("noisy", "train.tsv", Split::Train);
  const auto val_set = shipped("noisy", "validation.tsv", Split::Validation);
  const auto test_set = shipped("noisy", "test.tsv", Split::Test);
  RunConfig c = tiny_run(9);
  c.rounds = 2;
  std::string logs[2], preds[2];
  TrainedModel last;
  for (int run = 0; run < 2; ++run) {
    auto r = run_pipeline(c, train_set, val_set, default_lexicon());
    std::ostringstream l, p;
    write_trainlog(l, r.log);
    write_predictions(p, predict(r.model, test_set, default_stopwords()));
    logs[run] = l.str();
    preds[run] = p.str();
    last = std::move(r.model);
  }
  const auto before = evaluate(last, test_set, default_stopwords());
  const auto path = std::filesystem::temp_directory_path() / "hft_acceptance_ckpt.bin";
  save_trained_model(path, last, to_json(c));
  const auto after = evaluate(load_trained_model(path), test_set, default_stopwords());
  std::filesystem::remove(path);
  const bool same_log = logs[0] == logs[1], same_pred = preds[0] == preds[1], same_report = before == after;
  return {same_log && same_pred && same_report,
          fmt("trainlog identical: %s (%zu bytes); predictions identical: %s; reloaded report identical: %s",
              same_log ? "yes" : "no", logs[0].size(), same_pred ? "yes" : "no", same_report ? "yes" : "no")};
}

// ---- 10 --------------------------------------------------------------------

Outcome augmentation_contract() {
  const auto train_set = shipped("noisy", "train.tsv", Split::Train);
  const auto& lex = default_lexicon();
  const auto& sw = default_stopwords();
  std::size_t checked = 0, violations = 0, swaps = 0, drops = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto batch = augment(train_set, lex, seed, 1, sw);
    const auto again = augment(train_set, lex, seed, 1, sw);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& a = batch[i];
      ++checked;
      bool ok = again[i].record.text == a.record.text && again[i].example.id == a.example.id;
      const auto src = std::find_if(train_set.begin(), train_set.end(),
                                    [&](const NewsExample& e) { return e.id == a.record.source_id; });
      ok &= src != train_set.end() && a.example.label == src->label;
      const auto words = split_words(clean_text(src->raw_text, sw));
      const auto out = split_words(a.record.text);
      const auto& pos = a.record.positions;
      ok &= !pos.empty() && pos.size() <= 2;
      if (a.record.transformation == Transformation::SynonymSwap) {
        ++swaps;
        ok &= out.size() == words.size();
        for (std::size_t j = 0; ok && j < words.size(); ++j) {
          const bool touched = std::find(pos.begin(), pos.end(), j) != pos.end();
          if (!touched) {
            ok &= out[j] == words[j];
          } else {
            const auto syn = lex.synonyms(words[j]);
            ok &= std::find(syn.begin(), syn.end(), out[j]) != syn.end();
          }
        }
      } else {
        ++drops;
        std::vector<std::string> expected;
        for (std::size_t j = 0; j < words.size(); ++j)
          if (std::find(pos.begin(), pos.end(), j) == pos.end()) expected.push_back(words[j]);
        ok &= out == expected;
      }
      violations += !ok;
    }
  }
  return {checked > 0 && violations == 0 && swaps > 0 && drops > 0,
          fmt("%zu augmented examples over 3 seeds (%zu swaps, %zu drops), %zu contract violations", checked,
              swaps, drops, violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient fidelity", gradient_fidelity},
      {"scaled softmax contract", softmax_contract},
      {"FGM perturbation contract", fgm_contract},
      {"adversarial loss property", adversarial_loss_property},
      {"metrics oracle", metrics_oracle},
      {"tokenizer extension", tokenizer_extension},
      {"desk-scale learning", desk_learning},
      {"ablation direction", ablation_direction},
      {"determinism and persistence", determinism},
      {"augmentation contract", augmentation_contract},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%2zu] %-28s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
