#include "dgad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dgad/error.hpp"

namespace dgad {

CommunityStream make_community_stream(const CommunityStreamConfig& cfg) {
  if (cfg.nodes < 2 || cfg.communities < 1 || cfg.nodes < 2 * cfg.communities) {
    throw ConfigError("community stream needs at least two nodes per community");
  }
  std::mt19937_64 rng(cfg.seed);
  CommunityStream out;
  out.community.resize(static_cast<size_t>(cfg.nodes));
  std::vector<std::vector<NodeId>> members(static_cast<size_t>(cfg.communities));
  for (NodeId v = 0; v < cfg.nodes; ++v) {
    const int c = v % cfg.communities;
    out.community[static_cast<size_t>(v)] = c;
    members[static_cast<size_t>(c)].push_back(v);
  }

  std::uniform_int_distribution<int> pick_comm(0, cfg.communities - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> times(static_cast<size_t>(cfg.edges));
  for (auto& t : times) t = std::floor(unit(rng) * cfg.horizon);
  std::sort(times.begin(), times.end());

  auto member = [&](int c) {
    const auto& m = members[static_cast<size_t>(c)];
    std::uniform_int_distribution<size_t> idx(0, m.size() - 1);
    return m[idx(rng)];
  };

  std::vector<TemporalEdge> edges;
  edges.reserve(times.size());
  for (double t : times) {
    const int a = pick_comm(rng);
    int b = a;
    if (cfg.communities > 1 && unit(rng) < cfg.cross_prob) {
      while (b == a) b = pick_comm(rng);
    }
    NodeId u = member(a), v = member(b);
    while (v == u) v = member(b);
    TemporalEdge e;
    e.src = u;
    e.dst = v;
    e.t = t;
    e.feat = {std::round(unit(rng) * 20.0) / 20.0};
    edges.push_back(std::move(e));
  }
  out.graph = TemporalGraph(cfg.nodes, 1, 1, std::vector<double>(static_cast<size_t>(cfg.nodes), 0.0),
                            std::move(edges));
  return out;
}

SensorSeries make_sensor_series(const SensorSeriesConfig& cfg) {
  if (cfg.sensors < 2 || cfg.groups < 1 || cfg.rows < 1) throw ConfigError("bad sensor series config");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> period(static_cast<size_t>(cfg.groups)), phase(static_cast<size_t>(cfg.groups));
  for (int g = 0; g < cfg.groups; ++g) {
    period[static_cast<size_t>(g)] = 150.0 + 100.0 * g;
    phase[static_cast<size_t>(g)] = 2.0 * std::numbers::pi * unit(rng);
  }
  std::vector<double> gain(static_cast<size_t>(cfg.sensors)), offset(static_cast<size_t>(cfg.sensors));
  for (int s = 0; s < cfg.sensors; ++s) {
    gain[static_cast<size_t>(s)] = 0.8 + 0.4 * unit(rng);
    offset[static_cast<size_t>(s)] = unit(rng);
  }

  SensorSeries out;
  out.values.assign(static_cast<size_t>(cfg.rows), std::vector<double>(static_cast<size_t>(cfg.sensors)));
  out.labels.assign(static_cast<size_t>(cfg.rows), 0);

  // attack windows: [start, start+len) with one victim sensor each
  std::vector<std::pair<int, int>> windows;
  const int first = static_cast<int>(cfg.attack_after * cfg.rows);
  const int span = cfg.rows - first - cfg.attack_length;
  if (cfg.attacks > 0 && span <= 0) throw ConfigError("no room for attacks in the series");
  std::uniform_int_distribution<int> start(first, std::max(first, first + span));
  std::uniform_int_distribution<int> victim(0, cfg.sensors - 1);
  std::vector<int> victim_of(static_cast<size_t>(cfg.rows), -1);
  for (int a = 0; a < cfg.attacks; ++a) {
    const int s0 = start(rng);
    const int who = victim(rng);
    for (int r = s0; r < std::min(cfg.rows, s0 + cfg.attack_length); ++r) {
      victim_of[static_cast<size_t>(r)] = who;
      out.labels[static_cast<size_t>(r)] = 1;
    }
  }

  for (int r = 0; r < cfg.rows; ++r) {
    for (int s = 0; s < cfg.sensors; ++s) {
      const auto g = static_cast<size_t>(s % cfg.groups);
      const double latent = std::sin(2.0 * std::numbers::pi * r / period[g] + phase[g]);
      double v = gain[static_cast<size_t>(s)] * latent + offset[static_cast<size_t>(s)];
      if (victim_of[static_cast<size_t>(r)] == s) {
        // decoupled from its group: mirrored signal
        v = -gain[static_cast<size_t>(s)] * latent + offset[static_cast<size_t>(s)];
      }
      out.values[static_cast<size_t>(r)][static_cast<size_t>(s)] = v + cfg.noise * gauss(rng);
    }
  }
  return out;
}

}  // namespace dgad
