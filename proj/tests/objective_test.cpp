#include "hft/objective.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hft/error.hpp"
#include "hft/rng.hpp"

namespace hft {
namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(Schedule, DefaultPhases) {
  const auto s = TemperatureSchedule::heated_default();
  EXPECT_EQ(schedule_alpha(s, 0), 4.0);
  EXPECT_EQ(schedule_alpha(s, 9), 4.0);
  EXPECT_EQ(schedule_alpha(s, 10), 1.0);
  EXPECT_EQ(schedule_alpha(s, 19), 1.0);
  EXPECT_EQ(schedule_alpha(s, 25), 0.5);
  EXPECT_EQ(schedule_alpha(s, 1000), 0.5);
}

TEST(Schedule, Validation) {
  using P = TemperatureSchedule::Phase;
  EXPECT_THROW(TemperatureSchedule({}), Error);
  EXPECT_THROW(TemperatureSchedule({P{1, 1.0}}), Error);
  EXPECT_THROW(TemperatureSchedule({P{0, 1.0}, P{0, 2.0}}), Error);
  EXPECT_THROW(TemperatureSchedule({P{0, 0.0}}), Error);
}

TEST(Schedule, JsonRoundTrip) {
  const nlohmann::json j = TemperatureSchedule::heated_default();
  EXPECT_EQ(j.dump(), "[[0,4.0],[10,1.0],[20,0.5]]");
  const auto back = schedule_from_json(j);
  EXPECT_EQ(back.alpha_at(15), 1.0);
}

TEST(HeatedCe, SymmetricLogits) {
  for (double alpha : {0.5, 1.0, 4.0}) EXPECT_NEAR(heated_ce_loss(std::vector<double>{0, 0}, 1, alpha).loss, std::log(2.0), 1e-15);
}

TEST(HeatedCe, StandardSoftmaxValue) {
  const auto v = heated_ce_loss(std::vector<double>{1, 2}, 1, 1.0);
  EXPECT_NEAR(v.loss, 0.31326, 1e-5);
  EXPECT_NEAR(v.loss, std::log1p(std::exp(-1.0)), 1e-15);
}

TEST(HeatedCe, GradientClosedForm) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> z = {3 * rng.normal(), 3 * rng.normal()};
    const int y = static_cast<int>(rng.uniform_index(2));
    const double alpha = 0.25 + 4 * rng.uniform();
    const auto v = heated_ce_loss(z, y, alpha);
    // p from an independent two-class formula.
    const double p1 = 1.0 / (1.0 + std::exp(-alpha * (z[1] - z[0])));
    const double p[2] = {1.0 - p1, p1};
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(v.logit_gradient[k], alpha * (p[k] - (k == y ? 1.0 : 0.0)), 1e-10);
  }
}

TEST(HeatedCe, HotterGradientOnMisclassified) {
  const auto g4 = heated_ce_loss(std::vector<double>{2, 1}, 1, 4.0).logit_gradient;
  const auto g1 = heated_ce_loss(std::vector<double>{2, 1}, 1, 1.0).logit_gradient;
  EXPECT_GT(norm(g4), norm(g1));
}

TEST(HeatedCe, GradientNormIncreasesWithAlphaWhenWrong) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const double margin = 0.05 + 3 * rng.uniform();
    const std::vector<double> z = {margin, 0.0};  // favours class 0; label 1
    double prev = 0.0;
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
      const double n = norm(heated_ce_loss(z, 1, alpha).logit_gradient);
      EXPECT_GT(n, prev);
      prev = n;
    }
    // A confidently correct example gets a smaller push at α = 4.
    const std::vector<double> right = {0.0, margin + 1.0};
    EXPECT_LT(norm(heated_ce_loss(right, 1, 4.0).logit_gradient), norm(heated_ce_loss(z, 1, 4.0).logit_gradient));
  }
}

TEST(HeatedCe, NonPositiveAlpha) {
  try {
    heated_ce_loss(std::vector<double>{1, 2}, 0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveAlpha);
  }
}

TEST(BatchLoss, MeanOfPerExampleLosses) {
  const Tensor one = Tensor::matrix(1, 2, {0.3, -0.4});
  EXPECT_NEAR(batch_loss(one, std::vector<int>{1}, 2.0).item(),
              heated_ce_loss(std::vector<double>{0.3, -0.4}, 1, 2.0).loss, 1e-15);

  const Tensor dup = Tensor::matrix(2, 2, {0.3, -0.4, 0.3, -0.4});
  EXPECT_NEAR(batch_loss(dup, std::vector<int>{1, 1}, 2.0).item(), batch_loss(one, std::vector<int>{1}, 2.0).item(),
              1e-15);

  const Tensor mixed = Tensor::matrix(3, 2, {0.3, -0.4, 2, 1, -1, 0.5});
  const std::vector<int> labels = {1, 0, 0};
  double hand = 0.0;
  hand += heated_ce_loss(std::vector<double>{0.3, -0.4}, 1, 0.5).loss;
  hand += heated_ce_loss(std::vector<double>{2, 1}, 0, 0.5).loss;
  hand += heated_ce_loss(std::vector<double>{-1, 0.5}, 0, 0.5).loss;
  EXPECT_NEAR(batch_loss(mixed, labels, 0.5).item(), hand / 3.0, 1e-15);
}

TEST(BatchLoss, GradientScaledByBatch) {
  const Tensor z = Tensor::matrix(2, 2, {0.3, -0.4, 2, 1}, true);
  backward(batch_loss(z, std::vector<int>{1, 0}, 1.0));
  const auto g0 = heated_ce_loss(std::vector<double>{0.3, -0.4}, 1, 1.0).logit_gradient;
  EXPECT_NEAR(z.grad()[0], g0[0] / 2.0, 1e-15);
  EXPECT_NEAR(z.grad()[1], g0[1] / 2.0, 1e-15);
}

TEST(BatchLoss, Errors) {
  try {
    batch_loss(Tensor::zeros({1, 2}), std::vector<int>{}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBatch);
  }
  EXPECT_THROW(batch_loss(Tensor::zeros({2, 2}), std::vector<int>{1}, 1.0), Error);
}

}  // namespace
}  // namespace hft
