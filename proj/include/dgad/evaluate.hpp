#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dgad/ctdg.hpp"
#include "dgad/model.hpp"

namespace dgad {

struct EvalReport {
  EventKind task = EventKind::Edge;
  // Edge task: test edge ids. Node task: one entry per test timestep, scored
  // by the most anomalous sensor reading at that time.
  std::vector<double> ids;
  std::vector<double> scores;
  std::vector<int> labels;
  double auc = 0.0;
  double ap = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
  std::string config_hash;
  double wall_ms = 0.0;

  bool operator==(const EvalReport&) const = default;
};

// Computes AUC, AP and best-threshold F1 for already scored events.
EvalReport make_report(EventKind task, std::vector<double> ids, std::vector<double> scores,
                       std::vector<int> labels);

// Scores every test event against the train+test history.
EvalReport evaluate(Model& model, const DatasetSplit& split, std::uint64_t seed);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string scores_csv(const EvalReport& r);

}  // namespace dgad
