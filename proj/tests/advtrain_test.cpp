#include "hft/advtrain.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hft/error.hpp"
#include "hft/rng.hpp"

namespace hft {
namespace {

ModelConfig tiny_config(std::uint64_t seed) {
  ModelConfig c;
  c.vocab_size = 12;
  c.max_len = 8;
  c.hidden_dim = 8;
  c.num_layers = 1;
  c.num_heads = 2;
  c.ff_dim = 16;
  c.dropout = 0.1;
  c.init_std = 0.3;
  c.seed = seed;
  return c;
}

std::vector<TrainingExample> random_batch(Rng& rng, std::size_t n, std::size_t max_len = 8) {
  std::vector<TrainingExample> batch;
  for (std::size_t b = 0; b < n; ++b) {
    TrainingExample ex;
    ex.seq.ids.assign(max_len, Vocabulary::kPad);
    ex.seq.mask.assign(max_len, 0);
    ex.seq.ids[0] = Vocabulary::kCls;
    ex.seq.true_length = 2 + rng.uniform_index(max_len - 2);
    for (std::size_t i = 0; i < ex.seq.true_length; ++i) {
      if (i > 0) ex.seq.ids[i] = static_cast<TokenId>(3 + rng.uniform_index(9));
      ex.seq.mask[i] = 1;
    }
    ex.label = static_cast<int>(rng.uniform_index(2));
    batch.push_back(std::move(ex));
  }
  return batch;
}

std::vector<std::vector<double>> grads(const EncoderModel& m) {
  std::vector<std::vector<double>> out;
  for (const Tensor& p : m.parameters()) out.emplace_back(p.grad().begin(), p.grad().end());
  return out;
}

std::vector<std::vector<double>> values(const EncoderModel& m) {
  std::vector<std::vector<double>> out;
  for (const Tensor& p : m.parameters()) out.emplace_back(p.values().begin(), p.values().end());
  return out;
}

TEST(Fgm, HandExample) {
  const auto r = fgm_perturbation(Tensor::vector({3, 4}), 1.0);
  EXPECT_NEAR(r.r_adv.at(0), -0.6, 1e-15);
  EXPECT_NEAR(r.r_adv.at(1), -0.8, 1e-15);
  EXPECT_DOUBLE_EQ(r.gradient_norm, 5.0);
}

TEST(Fgm, NormAndDirection) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> g(12);
    for (double& v : g) v = rng.normal() * std::pow(10.0, rng.uniform() * 6 - 3);
    const double eps = 0.01 + rng.uniform();
    const auto r = fgm_perturbation(Tensor::matrix(3, 4, g), eps);
    double n2 = 0.0, dot = 0.0, gn = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      n2 += r.r_adv.at(i) * r.r_adv.at(i);
      dot += r.r_adv.at(i) * g[i];
      gn += g[i] * g[i];
    }
    EXPECT_NEAR(std::sqrt(n2), eps, 1e-9);
    EXPECT_NEAR(dot, -eps * std::sqrt(gn), 1e-9 * std::max(1.0, std::sqrt(gn)));
  }
}

TEST(Fgm, PerTokenNormalizesRows) {
  const auto r = fgm_perturbation(Tensor::matrix(2, 2, {3, 4, 0, 2}), 0.5, true);
  EXPECT_NEAR(std::hypot(r.r_adv.at(0, 0), r.r_adv.at(0, 1)), 0.5, 1e-15);
  EXPECT_NEAR(r.r_adv.at(1, 1), -0.5, 1e-15);
}

TEST(Fgm, DegenerateGradient) {
  try {
    fgm_perturbation(Tensor::zeros({2, 3}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGradient);
  }
}

TEST(AdversarialStep, DisabledEqualsPlainStep) {
  EncoderModel a = init_model(tiny_config(1)), b = init_model(tiny_config(1));
  Rng rng(4);
  const auto batch = random_batch(rng, 4);
  const auto ra = plain_training_step(a, batch, 2.0, 99);
  const auto rb = adversarial_training_step(b, batch, 2.0, AdvConfig{.enabled = false}, 99);
  EXPECT_EQ(ra.clean_loss, rb.clean_loss);
  EXPECT_FALSE(rb.adv_loss.has_value());
  EXPECT_EQ(grads(a), grads(b));
}

TEST(AdversarialStep, ZeroEpsilonReproducesCleanPass) {
  EncoderModel a = init_model(tiny_config(2)), b = init_model(tiny_config(2));
  Rng rng(5);
  const auto batch = random_batch(rng, 3);
  plain_training_step(a, batch, 1.0, 7);
  const auto rec = adversarial_training_step(b, batch, 1.0, AdvConfig{.enabled = true, .epsilon = 0.0}, 7);
  ASSERT_TRUE(rec.adv_loss.has_value());
  EXPECT_NEAR(*rec.adv_loss, rec.clean_loss, 1e-12);
  const auto ga = grads(a), gb = grads(b);
  for (std::size_t k = 0; k < ga.size(); ++k)
    for (std::size_t j = 0; j < ga[k].size(); ++j) EXPECT_NEAR(ga[k][j], gb[k][j], 1e-12);
}

TEST(AdversarialStep, LeavesParametersUntouched) {
  EncoderModel m = init_model(tiny_config(3));
  const auto before = values(m);
  Rng rng(6);
  adversarial_training_step(m, random_batch(rng, 4), 4.0, AdvConfig{.enabled = true, .epsilon = 0.5}, 11);
  EXPECT_EQ(values(m), before);
}

TEST(AdversarialStep, CombinesGradients) {
  EncoderModel clean = init_model(tiny_config(4)), adv_only = init_model(tiny_config(4)),
               mixed = init_model(tiny_config(4));
  Rng rng(8);
  const auto batch = random_batch(rng, 3);
  plain_training_step(clean, batch, 1.0, 5);
  adversarial_training_step(adv_only, batch, 1.0, AdvConfig{.enabled = true, .epsilon = 0.2, .combine_weight = 1.0}, 5);
  adversarial_training_step(mixed, batch, 1.0, AdvConfig{.enabled = true, .epsilon = 0.2, .combine_weight = 0.25}, 5);
  const auto gc = grads(clean), ga = grads(adv_only), gm = grads(mixed);
  for (std::size_t k = 0; k < gc.size(); ++k)
    for (std::size_t j = 0; j < gc[k].size(); ++j) EXPECT_NEAR(gm[k][j], 0.75 * gc[k][j] + 0.25 * ga[k][j], 1e-12);
}

TEST(AdversarialStep, AdvLossUsuallyExceedsCleanLoss) {
  Rng rng(9);
  int hits = 0;
  for (int trial = 0; trial < 40; ++trial) {
    EncoderModel m = init_model(tiny_config(100 + trial));
    const auto rec = adversarial_training_step(m, random_batch(rng, 4), 1.0,
                                               AdvConfig{.enabled = true, .epsilon = 0.1, .combine_weight = 1.0},
                                               static_cast<std::uint64_t>(trial));
    hits += *rec.adv_loss >= rec.clean_loss;
  }
  EXPECT_GE(hits, 38);
}

}  // namespace
}  // namespace hft
