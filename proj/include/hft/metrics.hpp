#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hft {

struct ClassCounts {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  /// Number of examples whose true label is this class.
  std::size_t support = 0;
};

struct ConfusionCounts {
  std::vector<ClassCounts> classes;
  std::size_t total = 0;
};

/// Throws Empty for zero-length input, LengthMismatch for unequal lengths and
/// for labels outside [0, num_classes).
ConfusionCounts confusion_counts(std::span<const int> predictions, std::span<const int> labels,
                                 std::size_t num_classes = 2);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// support / total
  double weight = 0.0;
  std::size_t support = 0;
  /// Zero denominators: the value is reported as 0 and flagged.
  bool precision_undefined = false;
  bool recall_undefined = false;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct ClassificationReport {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  /// 2·P·R / (P + R) of the weighted precision and recall (0 when both are 0).
  double weighted_f1 = 0.0;
  bool divide_by_classes = false;

  friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

/// Support-weighted precision and recall: Σ w_i·P_i and Σ w_i·R_i with
/// w_i = support_i / total. With divide_by_classes both sums are additionally
/// divided by the number of classes (an alternative reading of the
/// weighting, kept for audit only). Throws EmptyCounts when total is 0.
ClassificationReport weighted_report(const ConfusionCounts& counts, bool divide_by_classes = false);

ClassificationReport evaluate_predictions(std::span<const int> predictions, std::span<const int> labels,
                                          bool divide_by_classes = false);

/// Column titles "Accuracy Precision Recall F1".
std::string table_header();
/// Four values with six decimals, single-space separated.
std::string format_table_row(double accuracy, double precision, double recall, double f1);
std::string report_to_table(const ClassificationReport& report);

/// Rows of (name, report) as an aligned text table with a Method column.
std::string render_table(std::span<const std::pair<std::string, ClassificationReport>> rows);

nlohmann::json report_to_json(const ClassificationReport& report);

}  // namespace hft
