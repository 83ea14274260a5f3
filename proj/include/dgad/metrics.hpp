#pragma once

#include <span>
#include <utility>

namespace dgad {

// Probability that a random positive outranks a random negative; ties count
// one half.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Mean precision at the ranks of the positives, ranking by descending score
// with ties kept in index order.
double average_precision(std::span<const double> scores, std::span<const int> labels);

struct F1Result {
  double f1 = 0.0;
  double threshold = 0.0;
};

// Best F1 over thresholds at every distinct score (predict score >= thr);
// the lowest threshold wins ties.
F1Result best_f1(std::span<const double> scores, std::span<const int> labels);

}  // namespace dgad
