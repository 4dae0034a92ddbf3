#include "hft/metrics.hpp"

#include <gtest/gtest.h>

#include "hft/error.hpp"
#include "hft/rng.hpp"
#include "support/metrics_oracle.hpp"

namespace hft {
namespace {

TEST(WeightedReport, HandExample) {
  const auto r = evaluate_predictions(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 1});
  EXPECT_NEAR(r.weighted_precision, 0.875, 1e-12);
  EXPECT_NEAR(r.weighted_recall, 0.75, 1e-12);
  EXPECT_NEAR(r.weighted_f1, 0.807692, 1e-6);
  EXPECT_NEAR(r.accuracy, 0.75, 1e-12);
}

TEST(WeightedReport, PerfectAndConstant) {
  const std::vector<int> labels = {0, 1, 0, 1, 1, 0, 1, 0, 0, 1};
  const auto perfect = evaluate_predictions(labels, labels);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.weighted_f1, 1.0);

  const auto constant = evaluate_predictions(std::vector<int>(10, 1), labels);
  EXPECT_EQ(constant.accuracy, 0.5);
  EXPECT_TRUE(constant.per_class[0].precision_undefined);
  EXPECT_EQ(constant.per_class[0].precision, 0.0);
}

TEST(WeightedReport, MatchesBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    std::vector<int> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng.uniform_index(2));
      labels[i] = static_cast<int>(rng.uniform_index(2));
    }
    const auto r = evaluate_predictions(preds, labels);
    const auto o = testing::brute_force_weighted(preds, labels);
    EXPECT_DOUBLE_EQ(r.accuracy, o.accuracy);
    EXPECT_DOUBLE_EQ(r.weighted_precision, o.precision);
    EXPECT_DOUBLE_EQ(r.weighted_recall, o.recall);
    EXPECT_DOUBLE_EQ(r.weighted_f1, o.f1);
  }
}

TEST(WeightedReport, LiteralFormDividesByClassCount) {
  const auto counts = confusion_counts(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 1});
  const auto lit = weighted_report(counts, true);
  EXPECT_NEAR(lit.weighted_precision, 0.875 / 2, 1e-12);
  EXPECT_NEAR(lit.weighted_recall, 0.75 / 2, 1e-12);
  EXPECT_TRUE(lit.divide_by_classes);
}

TEST(ConfusionCounts, SupportsSumToTotal) {
  const auto c = confusion_counts(std::vector<int>{0, 1, 1, 0, 1}, std::vector<int>{1, 1, 0, 0, 1});
  EXPECT_EQ(c.total, 5u);
  EXPECT_EQ(c.classes[0].support + c.classes[1].support, 5u);
  EXPECT_EQ(c.classes[1].true_positive, 2u);
  EXPECT_EQ(c.classes[1].false_positive, 1u);
  EXPECT_EQ(c.classes[1].false_negative, 1u);
}

TEST(ConfusionCounts, Errors) {
  try {
    confusion_counts(std::vector<int>{}, std::vector<int>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Empty);
  }
  try {
    confusion_counts(std::vector<int>{0, 1}, std::vector<int>{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  EXPECT_THROW(weighted_report(ConfusionCounts{{ClassCounts{}, ClassCounts{}}, 0}), Error);
}

TEST(Table, HeaderAndRowFormat) {
  EXPECT_EQ(table_header(), "Accuracy Precision Recall F1");
  EXPECT_EQ(format_table_row(0.990654, 0.990688, 0.990654, 0.990185), "0.990654 0.990688 0.990654 0.990185");
  const auto r = evaluate_predictions(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 1});
  EXPECT_EQ(report_to_table(r), "0.750000 0.875000 0.750000 0.807692");
}

TEST(Table, RenderedRows) {
  const auto r = evaluate_predictions(std::vector<int>{0, 1}, std::vector<int>{0, 1});
  const std::vector<std::pair<std::string, ClassificationReport>> rows = {{"baseline", r}};
  const std::string t = render_table(rows);
  EXPECT_NE(t.find("Accuracy | Precision | Recall   | F1"), std::string::npos);
  EXPECT_NE(t.find("baseline | 1.000000 | 1.000000  | 1.000000 | 1.000000"), std::string::npos);
}

TEST(Json, HasHeadlineFields) {
  const auto j = report_to_json(evaluate_predictions(std::vector<int>{0, 1}, std::vector<int>{0, 1}));
  for (const char* key : {"accuracy", "weighted_precision", "weighted_recall", "weighted_f1"}) EXPECT_TRUE(j.contains(key)) << key;
}

}  // namespace
}  // namespace hft
