#include "dgad/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dgad/error.hpp"

namespace dgad {

namespace {

void check_lengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
}

size_t count_positives(std::span<const int> labels) {
  return static_cast<size_t>(std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const size_t pos = count_positives(labels);
  const size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("roc_auc needs both classes");

  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // sum of midranks of positives (Mann-Whitney U)
  double rank_sum = 0.0;
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t k = i; k < j; ++k) {
      if (labels[idx[k]] != 0) rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const size_t pos = count_positives(labels);
  if (pos == 0) throw DataError("average_precision needs at least one positive");
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double total = 0.0;
  size_t hits = 0;
  for (size_t r = 0; r < idx.size(); ++r) {
    if (labels[idx[r]] != 0) {
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return total / static_cast<double>(pos);
}

F1Result best_f1(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const size_t pos = count_positives(labels);
  if (pos == 0) throw DataError("best_f1 needs at least one positive");
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  F1Result best;
  bool first = true;
  size_t tp = 0, predicted = 0;
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    const double thr = scores[idx[i]];
    while (j < idx.size() && scores[idx[j]] == thr) {
      tp += labels[idx[j]] != 0 ? 1 : 0;
      ++predicted;
      ++j;
    }
    const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(predicted + pos);
    // thresholds are visited in decreasing order, so >= keeps the lowest
    if (first || f1 >= best.f1) {
      best = {f1, thr};
      first = false;
    }
    i = j;
  }
  return best;
}

}  // namespace dgad
