#include "dgad/evaluate.hpp"

#include <chrono>
#include <map>
#include <sstream>

#include "dgad/error.hpp"
#include "dgad/metrics.hpp"

namespace dgad {

EvalReport make_report(EventKind task, std::vector<double> ids, std::vector<double> scores,
                       std::vector<int> labels) {
  if (ids.size() != scores.size()) throw DataError("ids and scores differ in length");
  EvalReport r;
  r.task = task;
  r.ids = std::move(ids);
  r.scores = std::move(scores);
  r.labels = std::move(labels);
  r.auc = roc_auc(r.scores, r.labels);
  r.ap = average_precision(r.scores, r.labels);
  const auto f1 = best_f1(r.scores, r.labels);
  r.f1 = f1.f1;
  r.threshold = f1.threshold;
  return r;
}

EvalReport evaluate(Model& model, const DatasetSplit& split, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const TemporalGraph history = history_graph(split);
  std::vector<double> ids, scores;
  std::vector<int> labels;
  const EventKind task = model.config().task;

  if (task == EventKind::Edge) {
    const EdgeId offset = split.train.num_edges();
    for (const auto& e : split.test.edges()) {
      const EdgeId id = offset + e.id;
      const auto& he = history.edge(id);
      if (he.src != e.src || he.dst != e.dst || he.t != e.t) {
        throw std::logic_error("history graph does not preserve test edge order");
      }
      auto seq = model.make_sequence(history, center_of(history, history.edge_event(id)), seed);
      ids.push_back(e.id);
      scores.push_back(model.score(seq));
      labels.push_back(e.label);
    }
  } else {
    // per timestep: max over sensors
    std::map<Timestamp, std::pair<double, int>> per_step;
    for (const auto& o : split.test.observations()) {
      auto seq = model.make_sequence(history, EgoCenter{EventKind::Node, o.node, -1, -1, o.t, o.feat}, seed);
      const double s = model.score(seq);
      auto [it, fresh] = per_step.try_emplace(o.t, s, o.label);
      if (!fresh) {
        it->second.first = std::max(it->second.first, s);
        it->second.second = std::max(it->second.second, o.label);
      }
    }
    for (const auto& [t, entry] : per_step) {
      ids.push_back(t);
      scores.push_back(entry.first);
      labels.push_back(entry.second);
    }
  }
  EvalReport r = make_report(task, std::move(ids), std::move(scores), std::move(labels));
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"task", to_string(r.task)}, {"ids", r.ids},     {"scores", r.scores},
          {"labels", r.labels},        {"auc", r.auc},     {"ap", r.ap},
          {"f1", r.f1},                {"threshold", r.threshold},
          {"config_hash", r.config_hash}, {"wall_ms", r.wall_ms}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.task = event_kind_from_string(j.at("task").get<std::string>());
    r.ids = j.at("ids").get<std::vector<double>>();
    r.scores = j.at("scores").get<std::vector<double>>();
    r.labels = j.at("labels").get<std::vector<int>>();
    r.auc = j.at("auc").get<double>();
    r.ap = j.at("ap").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.wall_ms = j.at("wall_ms").get<double>();
    if (r.scores.size() != r.labels.size() || r.ids.size() != r.scores.size()) {
      throw DataError("report columns differ in length");
    }
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed report: ") + ex.what());
  }
}

std::string scores_csv(const EvalReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "id,score,label\n";
  for (size_t i = 0; i < r.scores.size(); ++i) out << r.ids[i] << ',' << r.scores[i] << ',' << r.labels[i] << '\n';
  return out.str();
}

}  // namespace dgad
