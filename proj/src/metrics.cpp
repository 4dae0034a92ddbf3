#include "hft/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "hft/error.hpp"

namespace hft {

ConfusionCounts confusion_counts(std::span<const int> predictions, std::span<const int> labels,
                                 std::size_t num_classes) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw Error(ErrorCode::Empty, "no predictions");
  ConfusionCounts counts;
  counts.classes.resize(num_classes);
  counts.total = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], p = predictions[i];
    if (y < 0 || p < 0 || static_cast<std::size_t>(y) >= num_classes ||
        static_cast<std::size_t>(p) >= num_classes) {
      throw Error(ErrorCode::LengthMismatch, "class index out of range at position " + std::to_string(i));
    }
    auto& truth = counts.classes[static_cast<std::size_t>(y)];
    ++truth.support;
    if (p == y) {
      ++truth.true_positive;
    } else {
      ++truth.false_negative;
      ++counts.classes[static_cast<std::size_t>(p)].false_positive;
    }
  }
  return counts;
}

ClassificationReport weighted_report(const ConfusionCounts& counts, bool divide_by_classes) {
  if (counts.total == 0) throw Error(ErrorCode::EmptyCounts, "no examples counted");
  ClassificationReport report;
  report.divide_by_classes = divide_by_classes;
  const double total = static_cast<double>(counts.total);
  std::size_t correct = 0;
  for (const ClassCounts& c : counts.classes) {
    ClassMetrics m;
    m.support = c.support;
    m.weight = static_cast<double>(c.support) / total;
    const std::size_t p_den = c.true_positive + c.false_positive;
    const std::size_t r_den = c.true_positive + c.false_negative;
    m.precision_undefined = p_den == 0;
    m.recall_undefined = r_den == 0;
    m.precision = p_den == 0 ? 0.0 : static_cast<double>(c.true_positive) / static_cast<double>(p_den);
    m.recall = r_den == 0 ? 0.0 : static_cast<double>(c.true_positive) / static_cast<double>(r_den);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    report.weighted_precision += m.weight * m.precision;
    report.weighted_recall += m.weight * m.recall;
    correct += c.true_positive;
    report.per_class.push_back(m);
  }
  if (divide_by_classes) {
    const double n = static_cast<double>(counts.classes.size());
    report.weighted_precision /= n;
    report.weighted_recall /= n;
  }
  const double pr = report.weighted_precision + report.weighted_recall;
  report.weighted_f1 = pr > 0.0 ? 2.0 * report.weighted_precision * report.weighted_recall / pr : 0.0;
  report.accuracy = static_cast<double>(correct) / total;
  return report;
}

ClassificationReport evaluate_predictions(std::span<const int> predictions, std::span<const int> labels,
                                          bool divide_by_classes) {
  return weighted_report(confusion_counts(predictions, labels), divide_by_classes);
}

std::string table_header() { return "Accuracy Precision Recall F1"; }

std::string format_table_row(double accuracy, double precision, double recall, double f1) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %.6f", accuracy, precision, recall, f1);
  return buf;
}

std::string report_to_table(const ClassificationReport& r) {
  return format_table_row(r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1);
}

std::string render_table(std::span<const std::pair<std::string, ClassificationReport>> rows) {
  std::size_t width = 6;  // "Method"
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  auto pad = [width](std::string s) {
    s.resize(width, ' ');
    return s;
  };
  std::string out = pad("Method") + " | Accuracy | Precision | Recall   | F1\n";
  for (const auto& [name, r] : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " | %.6f | %.6f  | %.6f | %.6f\n", r.accuracy, r.weighted_precision,
                  r.weighted_recall, r.weighted_f1);
    out += pad(name) + buf;
  }
  return out;
}

nlohmann::json report_to_json(const ClassificationReport& r) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t i = 0; i < r.per_class.size(); ++i) {
    const auto& m = r.per_class[i];
    per_class.push_back({{"class", i},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"weight", m.weight},
                         {"support", m.support},
                         {"precision_undefined", m.precision_undefined},
                         {"recall_undefined", m.recall_undefined}});
  }
  return {{"accuracy", r.accuracy},
          {"weighted_precision", r.weighted_precision},
          {"weighted_recall", r.weighted_recall},
          {"weighted_f1", r.weighted_f1},
          {"divide_by_classes", r.divide_by_classes},
          {"per_class", per_class}};
}

}  // namespace hft
