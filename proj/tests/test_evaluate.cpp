#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "dgad/error.hpp"
#include "dgad/evaluate.hpp"
#include "dgad/synthetic.hpp"

using namespace dgad;

namespace {

ModelConfig tiny_model(EventKind task) {
  ModelConfig m;
  m.task = task;
  m.k = 1;
  m.budget = 4;
  m.gnn_hidden = 4;
  m.gnn_layers = 1;
  m.width = 4;
  m.heads = 1;
  m.layers = 1;
  m.ffn_width = 4;
  return m;
}

}  // namespace

TEST_CASE("label-matching scores give perfect metrics, constant scores give one half") {
  const auto perfect = make_report(EventKind::Edge, {0, 1, 2, 3}, {0.0, 1.0, 1.0, 0.0}, {0, 1, 1, 0});
  CHECK(perfect.auc == 1.0);
  CHECK(perfect.ap == 1.0);
  CHECK(perfect.f1 == 1.0);
  const auto flat = make_report(EventKind::Edge, {0, 1, 2}, {0.3, 0.3, 0.3}, {0, 1, 0});
  CHECK(flat.auc == 0.5);
  CHECK_THROWS_AS(make_report(EventKind::Edge, {0}, {0.1, 0.2}, {0, 1}), DataError);
}

TEST_CASE("reports round-trip through json bit-exactly") {
  auto r = make_report(EventKind::Node, {3.5, 4.5, 9.0}, {0.1 / 3.0, 2.0 / 3.0, 1e-300}, {0, 1, 0});
  r.config_hash = "00ff00ff00ff00ff";
  r.wall_ms = 12.345678901234567;
  const auto back = eval_report_from_json(nlohmann::json::parse(to_json(r).dump()));
  CHECK(back == r);
  CHECK_THROWS_AS(eval_report_from_json({{"task", "edge"}}), DataError);
  auto bad = to_json(r);
  bad["labels"] = {0, 1};
  CHECK_THROWS_AS(eval_report_from_json(bad), DataError);
}

TEST_CASE("scores csv has one row per event and full precision") {
  const auto r = make_report(EventKind::Edge, {7, 8}, {1.0 / 3.0, 0.5}, {1, 0});
  std::istringstream in(scores_csv(r));
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,score,label");
  std::getline(in, line);
  CHECK(line.rfind("7,", 0) == 0);
  CHECK(std::stod(line.substr(2, line.rfind(',') - 2)) == 1.0 / 3.0);
  CHECK(line.back() == '1');
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("edge evaluation scores every test edge deterministically") {
  CommunityStreamConfig c;
  c.nodes = 40;
  c.edges = 160;
  c.communities = 4;
  const auto split = inject_edge_anomalies(chronological_split(make_community_stream(c).graph, 0.5), 0.2, 3);
  Model model(tiny_model(EventKind::Edge), 1, 1, 5);
  const auto r = evaluate(model, split, 1);
  REQUIRE(r.scores.size() == static_cast<size_t>(split.test.num_edges()));
  for (EdgeId e = 0; e < split.test.num_edges(); ++e) {
    CHECK(r.ids[static_cast<size_t>(e)] == e);
    CHECK(r.labels[static_cast<size_t>(e)] == split.test.edge(e).label);
    CHECK(r.scores[static_cast<size_t>(e)] >= 0.0);
    CHECK(r.scores[static_cast<size_t>(e)] <= 1.0);
  }
  CHECK(evaluate(model, split, 1).scores == r.scores);
}

TEST_CASE("node evaluation reports one row per test timestep") {
  SensorSeriesConfig sc;
  sc.sensors = 5;
  sc.groups = 1;
  sc.rows = 400;
  sc.attacks = 3;
  sc.attack_length = 30;
  const auto series = make_sensor_series(sc);
  const auto split = chronological_split(build_series_graph(series.values, series.labels, {}), 0.5);
  Model model(tiny_model(EventKind::Node), split.test.node_dim(), split.test.edge_dim(), 2);
  const auto r = evaluate(model, split, 1);
  std::set<double> times;
  for (const auto& o : split.test.observations()) times.insert(o.t);
  CHECK(r.ids.size() == times.size());
  CHECK(std::set<double>(r.ids.begin(), r.ids.end()) == times);
  for (size_t i = 0; i < r.ids.size(); ++i) {
    int label = 0;
    for (const auto& o : split.test.observations()) {
      if (o.t == r.ids[i]) label = std::max(label, o.label);
    }
    CHECK(r.labels[i] == label);
  }
}
