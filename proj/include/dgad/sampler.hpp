#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dgad/ctdg.hpp"

namespace dgad {

inline constexpr int kUnlimitedBudget = std::numeric_limits<int>::max();
// Global id carried by a hypothetical (not yet inserted) center edge.
inline constexpr EdgeId kProbeEdge = -1;

struct EventRef {
  EventKind kind = EventKind::Edge;
  std::int32_t id = 0;

  auto operator<=>(const EventRef&) const = default;
};

// A center that need not exist in the graph: negative samples and corrupted
// node readings are scored through this.
struct EgoCenter {
  EventKind kind = EventKind::Edge;
  std::int32_t ref = 0;  // NodeId, EdgeId or kProbeEdge
  NodeId src = -1;       // edge endpoints (edge centers only)
  NodeId dst = -1;
  Timestamp t = 0.0;
  FeatVec feat;
  // Stream edge a probe stands in for (a corrupted positive, say). The sampler
  // treats it as absent.
  EdgeId hidden = kProbeEdge;
};

struct EgoSubgraph {
  EgoCenter center;
  int k = 0;

  std::vector<NodeId> node_ids;  // local -> global
  std::vector<EdgeId> edge_ids;  // local -> global; center edge is local 0
  std::vector<int> node_hop;     // -1: endpoint kept only so every edge has both ends
  std::vector<int> edge_hop;
  std::vector<Timestamp> node_time;
  std::vector<Timestamp> edge_time;

  Eigen::MatrixXd adj_nodes;   // A_v, N_v x N_v
  Eigen::MatrixXd adj_edges;   // A_e, N_e x N_e (line graph)
  Eigen::MatrixXd incidence;   // T,   N_v x N_e
  Eigen::MatrixXd node_feats;  // H_v0
  Eigen::MatrixXd edge_feats;  // H_e0

  int num_nodes() const { return static_cast<int>(node_ids.size()); }
  int num_edges() const { return static_cast<int>(edge_ids.size()); }
  std::optional<int> local_node(NodeId v) const;
  std::optional<int> local_edge(EdgeId e) const;
  std::optional<int> hop_of(EventRef ev) const;
  // Every event reached within k hops (structural-only endpoints excluded).
  std::vector<std::pair<EventRef, int>> reached() const;

  std::unordered_map<NodeId, int> node_index;
  std::unordered_map<EdgeId, int> edge_index;
};

EgoCenter center_of(const TemporalGraph& g, const Event& ev);
EgoCenter probe_edge(NodeId src, NodeId dst, Timestamp t, FeatVec feat);

// Temporal k-hop ego-graph over the mixed event adjacency (edges sharing an
// endpoint, node-edge incidence, node-node via an edge), restricted to
// t <= center.t. Hops holding more than `budget` events of one kind keep a
// seeded uniform subset; only kept events are expanded further.
EgoSubgraph khop_ego(const TemporalGraph& g, const Event& center, int k, int budget,
                     std::uint64_t seed);
EgoSubgraph khop_ego(const TemporalGraph& g, const EgoCenter& center, int k, int budget,
                     std::uint64_t seed);

struct Token {
  bool khs = false;
  int local = -1;  // row in the subgraph matrices of the target kind
  int hop = -1;
  Timestamp t = 0.0;
  std::int32_t global = 0;
};

struct SequenceOptions {
  bool special_tokens = true;
  bool temporal_sort = true;
  std::uint64_t shuffle_seed = 0;  // used when temporal_sort is off
};

struct EgoGraphSequence {
  std::vector<Token> tokens;
  EventKind target = EventKind::Edge;
  int center_position = 1;
  EgoSubgraph subgraph;
};

EgoGraphSequence build_sequence(EgoSubgraph sub, const SequenceOptions& opts = {});

struct SequenceStats {
  int token_count = 0;
  std::vector<int> per_hop_counts;
};

SequenceStats sequence_stats(const EgoGraphSequence& seq);

nlohmann::json to_json(const EgoGraphSequence& seq);

}  // namespace dgad
