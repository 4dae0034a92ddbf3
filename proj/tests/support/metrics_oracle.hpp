#pragma once

// Brute-force weighted metrics computed straight from the label lists,
// without going through confusion counts.

#include <cstddef>
#include <vector>

namespace hft::testing {

struct OracleReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline OracleReport brute_force_weighted(const std::vector<int>& preds, const std::vector<int>& labels,
                                         int num_classes = 2) {
  const double n = static_cast<double>(labels.size());
  OracleReport r;
  double correct = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += preds[i] == labels[i];
  r.accuracy = correct / n;
  for (int c = 0; c < num_classes; ++c) {
    double predicted = 0.0, actual = 0.0, hit = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      predicted += preds[i] == c;
      actual += labels[i] == c;
      hit += preds[i] == c && labels[i] == c;
    }
    const double p = predicted > 0.0 ? hit / predicted : 0.0;
    const double rec = actual > 0.0 ? hit / actual : 0.0;
    r.precision += actual / n * p;
    r.recall += actual / n * rec;
  }
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

}  // namespace hft::testing
