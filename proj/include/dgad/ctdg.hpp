#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dgad {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;
using Timestamp = double;
using FeatVec = std::vector<double>;

struct TemporalEdge {
  EdgeId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  Timestamp t = 0.0;
  FeatVec feat;
  int label = 0;

  bool operator==(const TemporalEdge&) const = default;
};

// A time-stamped attribute reading of one node (a sensor value window, say).
// Node-level tasks score these.
struct NodeObservation {
  NodeId node = 0;
  Timestamp t = 0.0;
  FeatVec feat;
  int label = 0;

  bool operator==(const NodeObservation&) const = default;
};

enum class EventKind { Node, Edge };

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);

// Unified anomaly event. `ref` is a NodeId for node events and an EdgeId for
// edge events.
struct Event {
  EventKind kind = EventKind::Edge;
  std::int32_t ref = 0;
  Timestamp t = 0.0;
  FeatVec feat;
  std::optional<int> label;
};

// Continuous-time dynamic graph. Immutable once constructed: edges are held in
// (t, input order) order and their ids are rewritten to match that order, so
// id order and time order coincide.
class TemporalGraph {
 public:
  TemporalGraph() = default;
  TemporalGraph(int num_nodes, int node_dim, int edge_dim,
                std::vector<double> node_attrs,
                std::vector<TemporalEdge> edges,
                std::vector<NodeObservation> observations = {});

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int node_dim() const { return d_n_; }
  int edge_dim() const { return d_e_; }

  const TemporalEdge& edge(EdgeId e) const { return edges_.at(static_cast<size_t>(e)); }
  const std::vector<TemporalEdge>& edges() const { return edges_; }
  std::span<const double> node_attr(NodeId v) const;
  const std::vector<double>& node_attrs() const { return x_; }

  // Incident edge ids of v in time order.
  std::span<const EdgeId> incident(NodeId v) const;
  // Prefix of incident(v) whose timestamps are <= cutoff.
  std::span<const EdgeId> incident_until(NodeId v, Timestamp cutoff) const;

  const std::vector<NodeObservation>& observations() const { return obs_; }
  bool has_observations() const { return !obs_.empty(); }
  // Latest observation of v with t <= cutoff, falling back to the static row.
  std::span<const double> node_feature_at(NodeId v, Timestamp cutoff) const;
  // Index into observations() of the latest reading of v at or before cutoff.
  std::optional<size_t> observation_at(NodeId v, Timestamp cutoff) const;

  bool has_pair(NodeId u, NodeId v) const;
  std::size_t distinct_pairs() const { return pair_keys_.size(); }
  bool is_complete() const;

  Timestamp min_time() const;
  Timestamp max_time() const;

  Event edge_event(EdgeId e) const;
  Event node_event(size_t observation_index) const;

 private:
  int n_ = 0;
  int d_n_ = 0;
  int d_e_ = 0;
  std::vector<double> x_;
  std::vector<TemporalEdge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<NodeObservation> obs_;
  std::vector<std::vector<size_t>> obs_by_node_;
  std::vector<std::uint64_t> pair_keys_;  // sorted unordered (min, max) keys
};

std::uint64_t pair_key(NodeId u, NodeId v);

struct DatasetSplit {
  TemporalGraph train;
  TemporalGraph test;
  double injection_ratio = 0.0;
  std::uint64_t seed = 0;
};

struct EdgeStreamSchema {
  char delimiter = ',';
  bool has_header = false;
  int src_col = 0;
  int dst_col = 1;
  int rating_col = 2;
  int time_col = 3;
  int edge_dim = 1;
};

struct LoadStats {
  std::size_t rows = 0;
  std::size_t self_loops_dropped = 0;
  std::vector<std::string> warnings;
};

// Reads a (src, dst, rating, timestamp) stream. Raw node ids are compacted in
// ascending order; self-loops are dropped and counted in `stats`.
TemporalGraph load_edge_stream(const std::filesystem::path& path,
                               const EdgeStreamSchema& schema,
                               LoadStats* stats = nullptr);

struct SeriesSchema {
  char delimiter = ',';
  bool has_header = true;
  int label_col = -1;  // -1: last column
  int window = 10;     // median downsampling length
  int topk = 3;
  int history = 5;     // observation feature length
  double train_frac = 0.5;
};

// Sensor table -> static top-k correlation graph plus one observation per
// (sensor, downsampled step).
TemporalGraph load_multivariate_series(const std::filesystem::path& path,
                                       const SeriesSchema& schema,
                                       LoadStats* stats = nullptr);

// Same pipeline over an in-memory table (rows = raw timesteps).
TemporalGraph build_series_graph(const std::vector<std::vector<double>>& values,
                                 const std::vector<int>& labels,
                                 const SeriesSchema& schema,
                                 LoadStats* stats = nullptr);

// Edge graphs split by edge count; observation graphs split by distinct
// observation timestamps and keep the static structure on both sides.
DatasetSplit chronological_split(const TemporalGraph& g, double train_frac);

using PairFilter = std::function<bool(NodeId, NodeId)>;

DatasetSplit inject_edge_anomalies(const DatasetSplit& split, double ratio,
                                   std::uint64_t seed,
                                   const PairFilter& admissible = {});

// Train edges followed by test edges (and observations), the history visible
// when scoring test events. Test edge e maps to id e + train.num_edges().
TemporalGraph history_graph(const DatasetSplit& split);

nlohmann::json to_json(const TemporalGraph& g);
TemporalGraph graph_from_json(const nlohmann::json& j);
std::string canonical_serialization(const TemporalGraph& g);

}  // namespace dgad
