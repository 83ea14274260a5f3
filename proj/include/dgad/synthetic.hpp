#pragma once

#include <cstdint>
#include <vector>

#include "dgad/ctdg.hpp"

namespace dgad {

// Planted-partition edge stream: each edge picks a community (or, with
// probability `cross_prob`, two communities) and joins two uniform members.
struct CommunityStreamConfig {
  int nodes = 500;
  int edges = 5000;
  int communities = 10;
  double cross_prob = 0.0;
  double horizon = 10000.0;
  std::uint64_t seed = 7;
};

struct CommunityStream {
  TemporalGraph graph;
  std::vector<int> community;  // per node

  bool same_community(NodeId u, NodeId v) const {
    return community[static_cast<size_t>(u)] == community[static_cast<size_t>(v)];
  }
};

CommunityStream make_community_stream(const CommunityStreamConfig& cfg);

// Grouped sensors sharing latent periodic signals. Attacks start after
// `attack_after` (fraction of rows) and decouple one sensor from its group.
struct SensorSeriesConfig {
  int sensors = 12;
  int groups = 3;
  int rows = 4000;
  double noise = 0.05;
  double attack_after = 0.6;
  int attacks = 8;
  int attack_length = 60;
  std::uint64_t seed = 11;
};

struct SensorSeries {
  std::vector<std::vector<double>> values;  // rows x sensors
  std::vector<int> labels;                  // per row
};

SensorSeries make_sensor_series(const SensorSeriesConfig& cfg);

}  // namespace dgad
