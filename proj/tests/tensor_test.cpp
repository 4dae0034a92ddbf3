#include "hft/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hft/error.hpp"
#include "hft/rng.hpp"
#include "support/finite_diff.hpp"

namespace hft {
namespace {

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng, bool grad = true) {
  std::vector<double> v(r * c);
  for (double& x : v) x = rng.normal();
  return Tensor::matrix(r, c, v, grad);
}

void expect_values(const Tensor& t, std::vector<double> expected, double tol = 0.0) {
  ASSERT_EQ(t.numel(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(t.at(i), expected[i], tol) << "index " << i;
}

TEST(Matmul, IdentityAndHandProduct) {
  const Tensor id = Tensor::matrix(2, 2, {1, 0, 0, 1});
  const Tensor m = Tensor::matrix(2, 2, {3, -1, 2.5, 7});
  expect_values(matmul(id, m), {3, -1, 2.5, 7});
  const Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
  const Tensor ones = Tensor::matrix(2, 1, {1, 1});
  const Tensor c = matmul(a, ones);
  EXPECT_EQ(c.shape(), (Shape{2, 1}));
  expect_values(c, {3, 7});
}

TEST(Matmul, ShapeMismatch) {
  try {
    matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(SoftmaxScaled, HandValues) {
  expect_values(softmax_scaled(Tensor::vector({0, 0}), 7.0), {0.5, 0.5}, 1e-15);
  expect_values(softmax_scaled(Tensor::vector({1, 2}), 1.0), {0.26894142, 0.73105858}, 1e-8);
  const double e4 = std::exp(4.0);
  expect_values(softmax_scaled(Tensor::vector({1, 2}), 4.0), {1.0 / (1.0 + e4), e4 / (1.0 + e4)}, 1e-15);
  EXPECT_NEAR(softmax_scaled(Tensor::vector({1, 2}), 4.0).at(0), 0.01799, 1e-5);
}

TEST(SoftmaxScaled, ShiftInvarianceAndNormalization) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(5);
    for (double& v : z) v = 3.0 * rng.normal();
    std::vector<double> shifted = z;
    for (double& v : shifted) v += 17.25;
    const Tensor p = softmax_scaled(Tensor::vector(z), 1.7);
    const Tensor q = softmax_scaled(Tensor::vector(shifted), 1.7);
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      s += p.at(i);
      EXPECT_NEAR(p.at(i), q.at(i), 1e-12);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SoftmaxScaled, NonPositiveAlpha) {
  EXPECT_THROW(softmax_scaled(Tensor::vector({1, 2}), 0.0), Error);
  EXPECT_THROW(log_softmax_scaled(Tensor::vector({1, 2}), -1.0), Error);
}

TEST(Elementwise, ReluLayerNormDropout) {
  expect_values(relu(Tensor::vector({-1, 2})), {0, 2});
  const Tensor gain = Tensor::vector({2, 3, 4});
  const Tensor bias = Tensor::vector({0.5, -1, 7});
  expect_values(layer_norm(Tensor::vector({5, 5, 5}), gain, bias), {0.5, -1, 7});
  const Tensor x = Tensor::vector({1, -2, 3, 4});
  expect_values(dropout(x, 0.0, 99), {1, -2, 3, 4});
  expect_values(dropout(x, 0.5, 99, /*training=*/false), {1, -2, 3, 4});
}

TEST(Elementwise, GeluTanhForm) {
  const double x = 0.7;
  const double expected = 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
  EXPECT_NEAR(gelu(Tensor::vector({x})).at(0), expected, 1e-15);
}

TEST(Elementwise, DropoutReplaysWithSeed) {
  const Tensor x = Tensor::vector(std::vector<double>(64, 1.0));
  const Tensor a = dropout(x, 0.3, 5), b = dropout(x, 0.3, 5);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(a.at(i), b.at(i));
    EXPECT_TRUE(a.at(i) == 0.0 || std::abs(a.at(i) - 1.0 / 0.7) < 1e-15);
  }
}

TEST(Backward, LinearAndSquare) {
  const Tensor w = Tensor::vector({0.5, -1.5, 2.0}, true);
  const Tensor x = Tensor::vector({3, 4, 5});
  backward(sum(mul(w, x)));
  expect_values(Tensor::vector(std::vector<double>(w.grad().begin(), w.grad().end())), {3, 4, 5});

  const Tensor v = Tensor::vector({1, 2}, true);
  backward(sum(mul(v, v)));
  EXPECT_EQ(v.grad()[0], 2.0);
  EXPECT_EQ(v.grad()[1], 4.0);
}

TEST(Backward, NotScalarAndConsumed) {
  const Tensor w = Tensor::vector({1, 2}, true);
  try {
    backward(mul(w, w));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotScalarLoss);
  }
  const Tensor loss = sum(mul(w, w));
  Graph g(loss);
  g.backward();
  try {
    g.backward();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GraphAlreadyConsumed);
  }
  g.reset();
  w.node()->grad.clear();
  g.backward();
  EXPECT_EQ(w.grad()[1], 4.0);
}

TEST(Backward, LeafGradientsAccumulate) {
  const Tensor w = Tensor::vector({1, 2}, true);
  backward(sum(w));
  backward(sum(w));
  EXPECT_EQ(w.grad()[0], 2.0);
}

TEST(Backward, CompositeMatchesFiniteDifferences) {
  // Ten parameters through matmul, layer norm, gelu, softmax and friends.
  Rng rng(42);
  Tensor w = random_matrix(2, 3, rng);
  Tensor gain = Tensor::vector({1.1, 0.9, 1.2}, true);
  Tensor b = Tensor::vector({0.1}, true);
  const Tensor x = random_matrix(4, 2, rng, false);
  auto loss = [&]() {
    Tensor h = layer_norm(matmul(x, w), gain, Tensor::vector({0, 0, 0}));
    h = gelu(h);
    const Tensor mask_scores = masked_softmax_rows(matmul(h, transpose(h)), std::vector<std::uint8_t>{1, 1, 0, 1});
    const Tensor mixed = matmul(mask_scores, h);
    const Tensor row = slice_rows(mixed, 0, 1);
    const Tensor logits = reshape(slice_cols(row, 0, 2), {2});
    const Tensor shifted = add(logits, concat(std::vector<Tensor>{b, b}));
    return scale(pick(log_softmax_scaled(shifted, 2.5), 1), -1.0);
  };
  const auto result = testing::check_gradients({w, gain, b}, loss);
  EXPECT_EQ(result.checked, 10u);
  EXPECT_LT(result.max_rel_error, 1e-4);
}

TEST(Backward, GatherStackAndPickRowsMatchFiniteDifferences) {
  Rng rng(7);
  Tensor table = random_matrix(5, 3, rng);
  auto loss = [&]() {
    const Tensor rows = gather_rows(table, std::vector<std::int32_t>{4, 1, 4});
    const Tensor stacked = stack_rows(std::vector<Tensor>{reshape(slice_rows(rows, 0, 1), {3}),
                                                          reshape(slice_rows(rows, 2, 1), {3})});
    const Tensor act = relu(add_row(concat_cols(std::vector<Tensor>{stacked, stacked}), Tensor::vector({0.1, -0.2, 0.3, 0, 0, 0})));
    return mean(pick_rows(log_softmax_scaled(act, 1.0), std::vector<int>{0, 5}));
  };
  EXPECT_LT(testing::check_gradients({table}, loss).max_rel_error, 1e-4);
}

TEST(Tensor, Determinism) {
  Rng a(5), b(5);
  const Tensor x = random_matrix(3, 3, a), y = random_matrix(3, 3, b);
  const Tensor p = gelu(matmul(x, x)), q = gelu(matmul(y, y));
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(p.at(i), q.at(i));
}

TEST(GatherRows, IdOutOfRange) {
  try {
    gather_rows(Tensor::zeros({3, 2}), std::vector<std::int32_t>{3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdOutOfRange);
  }
}

}  // namespace
}  // namespace hft
