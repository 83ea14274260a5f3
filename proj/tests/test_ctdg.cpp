#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "dgad/ctdg.hpp"
#include "dgad/error.hpp"
#include "dgad/synthetic.hpp"
#include "support/random_graphs.hpp"

using namespace dgad;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "dgad_test_ctdg";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

TemporalGraph line_graph_4() {
  // 0-1 at t=3, 1-2 at t=1, 2-3 at t=2, 0-1 again at t=1
  std::vector<TemporalEdge> edges{
      {0, 0, 1, 3.0, {0.1}, 0}, {0, 1, 2, 1.0, {0.2}, 0}, {0, 2, 3, 2.0, {0.3}, 0}, {0, 1, 0, 1.0, {0.4}, 0}};
  return TemporalGraph(4, 1, 1, std::vector<double>(4, 0.0), edges);
}

}  // namespace

TEST_CASE("edges are stably time ordered and ids follow that order") {
  const auto g = line_graph_4();
  REQUIRE(g.num_edges() == 4);
  CHECK(g.edge(0).feat[0] == doctest::Approx(0.2));
  CHECK(g.edge(1).feat[0] == doctest::Approx(0.4));
  CHECK(g.edge(2).feat[0] == doctest::Approx(0.3));
  CHECK(g.edge(3).feat[0] == doctest::Approx(0.1));
  for (EdgeId e = 0; e < g.num_edges(); ++e) CHECK(g.edge(e).id == e);
}

TEST_CASE("incident lists are time sorted and cut inclusively") {
  const auto g = line_graph_4();
  auto inc = g.incident(1);
  REQUIRE(inc.size() == 3);
  CHECK(std::is_sorted(inc.begin(), inc.end()));
  CHECK(g.incident_until(1, 1.0).size() == 2);
  CHECK(g.incident_until(1, 0.5).empty());
  CHECK(g.incident_until(1, 3.0).size() == 3);
}

TEST_CASE("pair existence ignores direction") {
  const auto g = line_graph_4();
  CHECK(g.has_pair(0, 1));
  CHECK(g.has_pair(1, 0));
  CHECK(g.has_pair(3, 2));
  CHECK_FALSE(g.has_pair(0, 3));
  CHECK(g.distinct_pairs() == 3);
  CHECK_FALSE(g.is_complete());
}

TEST_CASE("constructor rejects inconsistent inputs") {
  CHECK_THROWS_AS(TemporalGraph(2, 1, 1, {0.0}, {}), DataError);
  CHECK_THROWS_AS(TemporalGraph(2, 1, 1, {0.0, 0.0}, {{0, 0, 5, 1.0, {0.0}, 0}}), DataError);
  CHECK_THROWS_AS(TemporalGraph(2, 1, 1, {0.0, 0.0}, {{0, 0, 1, 1.0, {0.0, 1.0}, 0}}), DataError);
  CHECK_THROWS_AS(TemporalGraph(2, 1, 1, {0.0, 0.0}, {{0, 0, 1, NAN, {0.0}, 0}}), DataError);
}

TEST_CASE("node features fall back to the static row before the first reading") {
  std::vector<NodeObservation> obs{{0, 2.0, {5.0}, 0}, {0, 4.0, {7.0}, 0}};
  TemporalGraph g(2, 1, 1, {1.0, 2.0}, {}, obs);
  CHECK(g.node_feature_at(0, 1.0)[0] == 1.0);
  CHECK(g.node_feature_at(0, 2.0)[0] == 5.0);
  CHECK(g.node_feature_at(0, 3.9)[0] == 5.0);
  CHECK(g.node_feature_at(0, 10.0)[0] == 7.0);
  CHECK(g.node_feature_at(1, 10.0)[0] == 2.0);
}

TEST_CASE("edge stream loader compacts ids, normalizes ratings and drops self-loops") {
  const auto p = write_temp("stream.csv", "src;dst;rating;time\n10;20;-10;5\n20;30;10;3\n30;30;1;4\n20;10;0;9\n");
  EdgeStreamSchema schema;
  schema.delimiter = ';';
  schema.has_header = true;
  LoadStats stats;
  const auto g = load_edge_stream(p, schema, &stats);
  CHECK(stats.rows == 4);
  CHECK(stats.self_loops_dropped == 1);
  CHECK(stats.warnings.size() == 1);
  REQUIRE(g.num_nodes() == 3);
  REQUIRE(g.num_edges() == 3);
  CHECK(g.node_dim() == 1);
  // time order: (20,30,t=3), (10,20,t=5), (20,10,t=9)
  CHECK(g.edge(0).src == 1);
  CHECK(g.edge(0).dst == 2);
  CHECK(g.edge(0).feat[0] == doctest::Approx(1.0));
  CHECK(g.edge(1).feat[0] == doctest::Approx(0.0));
  CHECK(g.edge(2).feat[0] == doctest::Approx(0.5));
  for (double x : g.node_attrs()) CHECK(x == 0.0);
}

TEST_CASE("edge stream loader reports the failing line") {
  const auto p = write_temp("bad.csv", "1,2,3,4\n1,x,3,5\n");
  try {
    load_edge_stream(p, {});
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("parse error at line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_edge_stream(write_temp("empty.csv", ""), {}), DataError);
  CHECK_THROWS_AS(load_edge_stream(write_temp("loops.csv", "1,1,0,0\n"), {}), DataError);
  CHECK_THROWS_AS(load_edge_stream("/nonexistent/file.csv", {}), DataError);
}

TEST_CASE("constant ratings normalize to zero") {
  const auto g = load_edge_stream(write_temp("const.csv", "1,2,4,0\n2,3,4,1\n"), {});
  for (const auto& e : g.edges()) CHECK(e.feat[0] == 0.0);
}

TEST_CASE("series graph: median windows, majority labels, top-k edges, history observations") {
  // three sensors, 8 rows, window 2 -> 4 steps
  std::vector<std::vector<double>> v{{0, 0, 5}, {2, 4, 5}, {1, 2, 5}, {3, 6, 5},
                                     {2, 4, 5}, {4, 8, 5}, {3, 6, 5}, {5, 10, 5}};
  std::vector<int> labels{0, 0, 0, 0, 0, 0, 1, 0};
  SeriesSchema schema;
  schema.window = 2;
  schema.topk = 1;
  schema.history = 2;
  schema.train_frac = 0.75;
  LoadStats stats;
  const auto g = build_series_graph(v, labels, schema, &stats);
  CHECK(g.num_nodes() == 3);
  CHECK(g.node_dim() == 2);
  // sensor 2 is constant
  REQUIRE(stats.warnings.size() == 1);
  CHECK(stats.warnings[0].find("sensor 2") != std::string::npos);
  // sensors 0 and 1 are perfectly correlated; sensor 2 picks a 0-correlation peer
  CHECK(g.has_pair(0, 1));
  CHECK(g.num_edges() == 2);
  for (const auto& e : g.edges()) CHECK(e.t == 0.0);
  // steps 1..3 produce one observation per sensor
  CHECK(g.observations().size() == 9);
  // medians of sensor 0: 1, 2, 3, 4 -> min-max on first 3 steps: 0, .5, 1, 1.5
  const auto& o = g.observations()[0];
  CHECK(o.node == 0);
  CHECK(o.t == 1.0);
  CHECK(o.feat[0] == doctest::Approx(0.0));
  CHECK(o.feat[1] == doctest::Approx(0.5));
  CHECK(g.observations().back().feat[1] == doctest::Approx(0.0));
  // 1 attack row out of 2 counts as an attack step
  CHECK(g.observations().back().label == 1);
  CHECK(g.observations()[0].label == 0);
}

TEST_CASE("series graph validates its schema") {
  std::vector<std::vector<double>> v{{0, 1}, {1, 2}};
  SeriesSchema s;
  s.window = 1;
  s.topk = 2;
  CHECK_THROWS_AS(build_series_graph(v, {0, 0}, s, nullptr), ConfigError);
  s.topk = 1;
  CHECK_THROWS_AS(build_series_graph(v, {0}, s, nullptr), DataError);
  s.window = 5;
  CHECK_THROWS_AS(build_series_graph(v, {0, 0}, s, nullptr), DataError);
}

TEST_CASE("chronological split of an edge stream") {
  std::mt19937_64 rng(3);
  const auto g = testing::random_graph(rng, 200);
  if (g.num_edges() < 4) return;
  const auto split = chronological_split(g, 0.5);
  CHECK(split.train.num_edges() == g.num_edges() / 2);
  CHECK(split.train.num_edges() + split.test.num_edges() == g.num_edges());
  CHECK(split.train.max_time() <= split.test.min_time());
  CHECK_THROWS_AS(chronological_split(g, 0.0), ConfigError);
  CHECK_THROWS_AS(chronological_split(g, 1.0), ConfigError);
}

TEST_CASE("split refuses anomalies in the train portion") {
  std::vector<TemporalEdge> edges{{0, 0, 1, 0.0, {0.0}, 1}, {0, 1, 2, 1.0, {0.0}, 0}};
  TemporalGraph g(3, 1, 1, {0, 0, 0}, edges);
  CHECK_THROWS_AS(chronological_split(g, 0.5), DataError);
}

TEST_CASE("injection adds ceil(ratio * m) labeled non-existent pairs inside the test range") {
  CommunityStreamConfig cfg;
  cfg.nodes = 100;
  cfg.edges = 600;
  cfg.communities = 4;
  const auto stream = make_community_stream(cfg);
  const auto split = chronological_split(stream.graph, 0.5);
  const int m = split.test.num_edges();
  for (double ratio : {0.01, 0.05, 0.1}) {
    const auto inj = inject_edge_anomalies(split, ratio, 42);
    const int expected = static_cast<int>(std::ceil(ratio * m - 1e-9));
    CHECK(inj.test.num_edges() == m + expected);
    int anomalies = 0;
    for (const auto& e : inj.test.edges()) {
      if (e.label == 0) continue;
      ++anomalies;
      CHECK(e.src != e.dst);
      CHECK_FALSE(split.train.has_pair(e.src, e.dst));
      CHECK_FALSE(split.test.has_pair(e.src, e.dst));
      CHECK(e.t >= split.test.min_time());
      CHECK(e.t <= split.test.max_time());
    }
    CHECK(anomalies == expected);
    CHECK(inj.train.edges() == split.train.edges());
  }
}

TEST_CASE("injection is deterministic under a seed and honours the pair filter") {
  const auto stream = make_community_stream({});
  const auto split = chronological_split(stream.graph, 0.5);
  const auto a = inject_edge_anomalies(split, 0.05, 9);
  const auto b = inject_edge_anomalies(split, 0.05, 9);
  const auto c = inject_edge_anomalies(split, 0.05, 10);
  CHECK(canonical_serialization(a.test) == canonical_serialization(b.test));
  CHECK(canonical_serialization(a.test) != canonical_serialization(c.test));
  const auto cross = inject_edge_anomalies(
      split, 0.05, 9, [&](NodeId u, NodeId v) { return !stream.same_community(u, v); });
  for (const auto& e : cross.test.edges()) {
    if (e.label == 1) CHECK_FALSE(stream.same_community(e.src, e.dst));
  }
}

TEST_CASE("injection fails loudly when no free pair remains") {
  std::vector<TemporalEdge> edges{{0, 0, 1, 0.0, {0.0}, 0}, {0, 0, 2, 1.0, {0.0}, 0}, {0, 1, 2, 2.0, {0.0}, 0},
                                  {0, 0, 1, 3.0, {0.0}, 0}};
  TemporalGraph g(3, 1, 1, {0, 0, 0}, edges);
  const auto split = chronological_split(g, 0.5);
  CHECK_THROWS_AS(inject_edge_anomalies(split, 0.5, 1), DataError);
  CHECK_THROWS_AS(inject_edge_anomalies(split, 0.0, 1), ConfigError);
}

TEST_CASE("history graph maps test edge e to e + |train|") {
  const auto stream = make_community_stream({});
  const auto split = inject_edge_anomalies(chronological_split(stream.graph, 0.5), 0.05, 1);
  const auto h = history_graph(split);
  const int offset = split.train.num_edges();
  REQUIRE(h.num_edges() == offset + split.test.num_edges());
  for (const auto& e : split.test.edges()) {
    const auto& he = h.edge(offset + e.id);
    CHECK(he.src == e.src);
    CHECK(he.dst == e.dst);
    CHECK(he.label == e.label);
  }
}

TEST_CASE("graph json round-trips and the canonical form is byte stable") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto g = testing::random_graph(rng, 60, i % 2 == 0);
    const auto back = graph_from_json(to_json(g));
    CHECK(back.edges() == g.edges());
    CHECK(back.observations() == g.observations());
    CHECK(back.node_attrs() == g.node_attrs());
    CHECK(canonical_serialization(back) == canonical_serialization(g));
  }
  CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"version", 2}}), DataError);
}

TEST_CASE("community stream has no cross edges unless asked") {
  CommunityStreamConfig cfg;
  cfg.nodes = 60;
  cfg.edges = 400;
  cfg.communities = 3;
  const auto s = make_community_stream(cfg);
  CHECK(s.graph.num_edges() == 400);
  for (const auto& e : s.graph.edges()) {
    CHECK(s.same_community(e.src, e.dst));
    CHECK(e.src != e.dst);
  }
  cfg.cross_prob = 0.5;
  const auto mixed = make_community_stream(cfg);
  int cross = 0;
  for (const auto& e : mixed.graph.edges()) cross += mixed.same_community(e.src, e.dst) ? 0 : 1;
  CHECK(cross > 100);
}
