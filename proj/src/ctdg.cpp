#include "dgad/ctdg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dgad/error.hpp"

namespace dgad {

const char* to_string(EventKind kind) {
  return kind == EventKind::Node ? "node" : "edge";
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "node") return EventKind::Node;
  if (s == "edge") return EventKind::Edge;
  throw ConfigError("unknown event kind '" + s + "' (expected node|edge)");
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  auto lo = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::min(u, v)));
  auto hi = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::max(u, v)));
  return (lo << 32) | hi;
}

TemporalGraph::TemporalGraph(int num_nodes, int node_dim, int edge_dim,
                             std::vector<double> node_attrs,
                             std::vector<TemporalEdge> edges,
                             std::vector<NodeObservation> observations)
    : n_(num_nodes),
      d_n_(node_dim),
      d_e_(edge_dim),
      x_(std::move(node_attrs)),
      edges_(std::move(edges)),
      obs_(std::move(observations)) {
  if (n_ < 0 || d_n_ < 0 || d_e_ < 0) throw DataError("negative graph dimension");
  if (x_.size() != static_cast<size_t>(n_) * static_cast<size_t>(d_n_)) {
    throw DataError("node attribute matrix must have n*d_n entries");
  }
  for (const auto& e : edges_) {
    if (e.src < 0 || e.src >= n_ || e.dst < 0 || e.dst >= n_) {
      throw DataError("edge endpoint out of range");
    }
    if (e.feat.size() != static_cast<size_t>(d_e_)) {
      throw DataError("edge feature dimension mismatch");
    }
    if (!std::isfinite(e.t)) throw DataError("non-finite edge timestamp");
  }
  std::stable_sort(edges_.begin(), edges_.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.t < b.t; });
  for (size_t i = 0; i < edges_.size(); ++i) edges_[i].id = static_cast<EdgeId>(i);

  incident_.assign(static_cast<size_t>(n_), {});
  pair_keys_.reserve(edges_.size());
  for (const auto& e : edges_) {
    incident_[static_cast<size_t>(e.src)].push_back(e.id);
    if (e.dst != e.src) incident_[static_cast<size_t>(e.dst)].push_back(e.id);
    pair_keys_.push_back(pair_key(e.src, e.dst));
  }
  std::sort(pair_keys_.begin(), pair_keys_.end());
  pair_keys_.erase(std::unique(pair_keys_.begin(), pair_keys_.end()), pair_keys_.end());

  for (const auto& o : obs_) {
    if (o.node < 0 || o.node >= n_) throw DataError("observation node out of range");
    if (o.feat.size() != static_cast<size_t>(d_n_)) {
      throw DataError("observation feature dimension mismatch");
    }
  }
  std::stable_sort(obs_.begin(), obs_.end(), [](const NodeObservation& a, const NodeObservation& b) {
    return a.t < b.t || (a.t == b.t && a.node < b.node);
  });
  obs_by_node_.assign(static_cast<size_t>(n_), {});
  for (size_t i = 0; i < obs_.size(); ++i) {
    obs_by_node_[static_cast<size_t>(obs_[i].node)].push_back(i);
  }
}

std::span<const double> TemporalGraph::node_attr(NodeId v) const {
  return std::span<const double>(x_).subspan(static_cast<size_t>(v) * static_cast<size_t>(d_n_),
                                             static_cast<size_t>(d_n_));
}

std::span<const EdgeId> TemporalGraph::incident(NodeId v) const {
  return incident_.at(static_cast<size_t>(v));
}

std::span<const EdgeId> TemporalGraph::incident_until(NodeId v, Timestamp cutoff) const {
  const auto& inc = incident_.at(static_cast<size_t>(v));
  auto it = std::upper_bound(inc.begin(), inc.end(), cutoff, [this](Timestamp c, EdgeId e) {
    return c < edges_[static_cast<size_t>(e)].t;
  });
  return std::span<const EdgeId>(inc.data(), static_cast<size_t>(it - inc.begin()));
}

std::optional<size_t> TemporalGraph::observation_at(NodeId v, Timestamp cutoff) const {
  const auto& list = obs_by_node_.at(static_cast<size_t>(v));
  auto it = std::upper_bound(list.begin(), list.end(), cutoff,
                             [this](Timestamp c, size_t i) { return c < obs_[i].t; });
  if (it == list.begin()) return std::nullopt;
  return *(it - 1);
}

std::span<const double> TemporalGraph::node_feature_at(NodeId v, Timestamp cutoff) const {
  if (auto i = observation_at(v, cutoff)) return obs_[*i].feat;
  return node_attr(v);
}

bool TemporalGraph::has_pair(NodeId u, NodeId v) const {
  return std::binary_search(pair_keys_.begin(), pair_keys_.end(), pair_key(u, v));
}

bool TemporalGraph::is_complete() const {
  const auto all = static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(n_ - 1) / 2;
  std::uint64_t proper = 0;
  for (auto key : pair_keys_) proper += ((key >> 32) != (key & 0xffffffffULL)) ? 1 : 0;
  return proper >= all;
}

Timestamp TemporalGraph::min_time() const {
  Timestamp t = std::numeric_limits<double>::infinity();
  if (!edges_.empty()) t = edges_.front().t;
  if (!obs_.empty()) t = std::min(t, obs_.front().t);
  return t;
}

Timestamp TemporalGraph::max_time() const {
  Timestamp t = -std::numeric_limits<double>::infinity();
  if (!edges_.empty()) t = edges_.back().t;
  if (!obs_.empty()) t = std::max(t, obs_.back().t);
  return t;
}

Event TemporalGraph::edge_event(EdgeId e) const {
  const auto& te = edge(e);
  return Event{EventKind::Edge, e, te.t, te.feat, te.label};
}

Event TemporalGraph::node_event(size_t observation_index) const {
  const auto& o = obs_.at(observation_index);
  return Event{EventKind::Node, o.node, o.t, o.feat, o.label};
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& raw, size_t line_no, int col) {
  std::string s = trim(raw);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("parse error at line " + std::to_string(line_no) + ", column " +
                    std::to_string(col) + ": '" + s + "' is not a number");
  }
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

TemporalGraph load_edge_stream(const std::filesystem::path& path, const EdgeStreamSchema& schema,
                               LoadStats* stats) {
  if (schema.edge_dim < 1) throw ConfigError("edge_dim must be >= 1");
  const int max_col = std::max({schema.src_col, schema.dst_col, schema.rating_col, schema.time_col});
  if (std::min({schema.src_col, schema.dst_col, schema.rating_col, schema.time_col}) < 0) {
    throw ConfigError("schema column indices must be non-negative");
  }
  auto lines = read_lines(path);

  struct Row {
    double src, dst, rating, t;
  };
  std::vector<Row> rows;
  LoadStats local;
  for (size_t i = schema.has_header ? 1 : 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const size_t line_no = i + 1;
    auto cells = split_line(lines[i], schema.delimiter);
    if (static_cast<int>(cells.size()) <= max_col) {
      throw DataError("parse error at line " + std::to_string(line_no) + ": expected at least " +
                      std::to_string(max_col + 1) + " columns");
    }
    Row r{parse_number(cells[static_cast<size_t>(schema.src_col)], line_no, schema.src_col),
          parse_number(cells[static_cast<size_t>(schema.dst_col)], line_no, schema.dst_col),
          parse_number(cells[static_cast<size_t>(schema.rating_col)], line_no, schema.rating_col),
          parse_number(cells[static_cast<size_t>(schema.time_col)], line_no, schema.time_col)};
    ++local.rows;
    if (r.src == r.dst) {
      ++local.self_loops_dropped;
      continue;
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError("empty edge stream: " + path.string());
  if (local.self_loops_dropped > 0) {
    local.warnings.push_back("dropped " + std::to_string(local.self_loops_dropped) + " self-loop rows");
  }

  std::map<double, NodeId> ids;
  for (const auto& r : rows) {
    ids.emplace(r.src, 0);
    ids.emplace(r.dst, 0);
  }
  NodeId next = 0;
  for (auto& [raw, id] : ids) id = next++;

  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                      [](const Row& a, const Row& b) { return a.rating < b.rating; });
  const double rmin = lo->rating;
  const double span = hi->rating - rmin;

  std::vector<TemporalEdge> edges;
  edges.reserve(rows.size());
  for (const auto& r : rows) {
    TemporalEdge e;
    e.src = ids.at(r.src);
    e.dst = ids.at(r.dst);
    e.t = r.t;
    e.feat.assign(static_cast<size_t>(schema.edge_dim), 0.0);
    e.feat[0] = span > 0 ? (r.rating - rmin) / span : 0.0;
    edges.push_back(std::move(e));
  }
  const int n = static_cast<int>(ids.size());
  if (stats) *stats = local;
  return TemporalGraph(n, 1, schema.edge_dim, std::vector<double>(static_cast<size_t>(n), 0.0),
                       std::move(edges));
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b, size_t len) {
  double ma = 0, mb = 0;
  for (size_t i = 0; i < len; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(len);
  mb /= static_cast<double>(len);
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < len; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TemporalGraph build_series_graph(const std::vector<std::vector<double>>& values,
                                 const std::vector<int>& labels, const SeriesSchema& schema,
                                 LoadStats* stats) {
  if (schema.window < 1) throw ConfigError("window must be >= 1");
  if (schema.history < 1) throw ConfigError("history must be >= 1");
  if (!(schema.train_frac > 0 && schema.train_frac < 1)) throw ConfigError("train_frac must be in (0,1)");
  if (values.empty()) throw DataError("empty series");
  if (values.size() != labels.size()) throw DataError("label column length mismatch");
  const size_t sensors = values.front().size();
  for (const auto& row : values) {
    if (row.size() != sensors) throw DataError("ragged sensor table");
  }
  if (schema.topk < 1 || static_cast<size_t>(schema.topk) >= sensors) {
    throw ConfigError("topk must satisfy 1 <= topk < #sensors (" + std::to_string(sensors) + ")");
  }
  LoadStats local;
  local.rows = values.size();

  const size_t w = static_cast<size_t>(schema.window);
  const size_t steps = values.size() / w;
  if (steps == 0) throw DataError("series shorter than one downsampling window");

  // series[s][i]: downsampled value of sensor s at step i
  std::vector<std::vector<double>> series(sensors, std::vector<double>(steps));
  std::vector<int> step_label(steps);
  std::vector<double> buf(w);
  for (size_t i = 0; i < steps; ++i) {
    for (size_t s = 0; s < sensors; ++s) {
      for (size_t j = 0; j < w; ++j) buf[j] = values[i * w + j][s];
      series[s][i] = median(buf);
    }
    size_t attacks = 0;
    for (size_t j = 0; j < w; ++j) attacks += labels[i * w + j] != 0 ? 1 : 0;
    step_label[i] = 2 * attacks >= w ? 1 : 0;
  }

  const size_t train_steps = std::max<size_t>(1, static_cast<size_t>(std::floor(schema.train_frac * static_cast<double>(steps))));
  for (size_t s = 0; s < sensors; ++s) {
    auto [lo, hi] = std::minmax_element(series[s].begin(), series[s].begin() + static_cast<long>(train_steps));
    const double mn = *lo, range = *hi - *lo;
    if (range <= 0) {
      local.warnings.push_back("sensor " + std::to_string(s) +
                               " is constant on the train portion; correlation treated as 0");
    }
    for (auto& x : series[s]) x = range > 0 ? (x - mn) / range : 0.0;
  }

  std::set<std::uint64_t> pairs;
  std::vector<TemporalEdge> edges;
  for (size_t s = 0; s < sensors; ++s) {
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t o = 0; o < sensors; ++o) {
      if (o == s) continue;
      ranked.emplace_back(std::abs(pearson(series[s], series[o], train_steps)), o);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int r = 0; r < schema.topk; ++r) {
      const auto [corr, o] = ranked[static_cast<size_t>(r)];
      if (!pairs.insert(pair_key(static_cast<NodeId>(s), static_cast<NodeId>(o))).second) continue;
      edges.push_back(TemporalEdge{0, static_cast<NodeId>(std::min(s, o)),
                                   static_cast<NodeId>(std::max(s, o)), 0.0, {corr}, 0});
    }
  }

  const size_t h = static_cast<size_t>(schema.history);
  std::vector<NodeObservation> obs;
  for (size_t i = h - 1; i < steps; ++i) {
    for (size_t s = 0; s < sensors; ++s) {
      NodeObservation o;
      o.node = static_cast<NodeId>(s);
      o.t = static_cast<double>(i);
      o.feat.assign(series[s].begin() + static_cast<long>(i + 1 - h),
                    series[s].begin() + static_cast<long>(i + 1));
      o.label = step_label[i];
      obs.push_back(std::move(o));
    }
  }
  if (stats) *stats = local;
  const int n = static_cast<int>(sensors);
  return TemporalGraph(n, schema.history, 1,
                       std::vector<double>(sensors * h, 0.0), std::move(edges), std::move(obs));
}

TemporalGraph load_multivariate_series(const std::filesystem::path& path, const SeriesSchema& schema,
                                       LoadStats* stats) {
  auto lines = read_lines(path);
  std::vector<std::vector<double>> values;
  std::vector<int> labels;
  for (size_t i = schema.has_header ? 1 : 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cells = split_line(lines[i], schema.delimiter);
    if (cells.size() < 3) {
      throw DataError("parse error at line " + std::to_string(i + 1) +
                      ": need at least two sensors and a label column");
    }
    const size_t label_col = schema.label_col < 0 ? cells.size() - 1 : static_cast<size_t>(schema.label_col);
    if (label_col >= cells.size()) throw DataError("label column out of range at line " + std::to_string(i + 1));
    std::vector<double> row;
    for (size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_number(cells[c], i + 1, static_cast<int>(c));
      if (c == label_col) {
        labels.push_back(v != 0.0 ? 1 : 0);
      } else {
        row.push_back(v);
      }
    }
    values.push_back(std::move(row));
  }
  if (values.empty()) throw DataError("empty series file: " + path.string());
  return build_series_graph(values, labels, schema, stats);
}

// ---------------------------------------------------------------------------
// Splitting and injection

DatasetSplit chronological_split(const TemporalGraph& g, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw ConfigError("train_frac must lie strictly between 0 and 1");
  }
  DatasetSplit split;
  if (g.has_observations()) {
    std::vector<Timestamp> times;
    for (const auto& o : g.observations()) {
      if (times.empty() || times.back() != o.t) times.push_back(o.t);
    }
    const auto cut = static_cast<size_t>(std::floor(train_frac * static_cast<double>(times.size())));
    if (cut == 0 || cut == times.size()) throw DataError("split leaves one side without observations");
    const Timestamp boundary = times[cut - 1];
    std::vector<NodeObservation> train_obs, test_obs;
    for (const auto& o : g.observations()) (o.t <= boundary ? train_obs : test_obs).push_back(o);
    for (const auto& o : train_obs) {
      if (o.label != 0) throw DataError("train portion contains anomalous observations");
    }
    split.train = TemporalGraph(g.num_nodes(), g.node_dim(), g.edge_dim(), g.node_attrs(), g.edges(),
                                std::move(train_obs));
    split.test = TemporalGraph(g.num_nodes(), g.node_dim(), g.edge_dim(), g.node_attrs(), g.edges(),
                               std::move(test_obs));
    return split;
  }
  const auto m = static_cast<size_t>(g.num_edges());
  const auto cut = static_cast<size_t>(std::floor(train_frac * static_cast<double>(m)));
  if (cut == 0 || cut == m) throw DataError("split leaves one side without edges");
  std::vector<TemporalEdge> train(g.edges().begin(), g.edges().begin() + static_cast<long>(cut));
  std::vector<TemporalEdge> test(g.edges().begin() + static_cast<long>(cut), g.edges().end());
  for (const auto& e : train) {
    if (e.label != 0) throw DataError("train portion contains anomalous edges");
  }
  split.train = TemporalGraph(g.num_nodes(), g.node_dim(), g.edge_dim(), g.node_attrs(), std::move(train));
  split.test = TemporalGraph(g.num_nodes(), g.node_dim(), g.edge_dim(), g.node_attrs(), std::move(test));
  return split;
}

DatasetSplit inject_edge_anomalies(const DatasetSplit& split, double ratio, std::uint64_t seed,
                                   const PairFilter& admissible) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("injection ratio must lie in (0,1)");
  const auto& test = split.test;
  const auto& train = split.train;
  if (test.num_edges() == 0) throw DataError("cannot inject into an empty test graph");
  const int n = test.num_nodes();
  // ceil with a guard against ratio*m landing a hair above an integer
  const auto count = static_cast<size_t>(
      std::ceil(ratio * static_cast<double>(test.num_edges()) - 1e-9));

  std::unordered_set<std::uint64_t> taken;
  for (const auto& e : train.edges()) taken.insert(pair_key(e.src, e.dst));
  for (const auto& e : test.edges()) taken.insert(pair_key(e.src, e.dst));
  const auto all_pairs = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n > 0 ? n - 1 : 0) / 2;
  if (taken.size() + count > all_pairs) {
    throw DataError("not enough non-existent node pairs to inject " + std::to_string(count) + " edges");
  }

  FeatVec mean(static_cast<size_t>(train.edge_dim()), 0.0);
  for (const auto& e : train.edges()) {
    for (size_t d = 0; d < mean.size(); ++d) mean[d] += e.feat[d];
  }
  if (train.num_edges() > 0) {
    for (auto& x : mean) x /= static_cast<double>(train.num_edges());
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::uniform_real_distribution<double> when(test.min_time(), test.max_time());
  const size_t max_attempts = 1000 + 200 * count;
  size_t attempts = 0;

  std::vector<TemporalEdge> edges = test.edges();
  for (size_t added = 0; added < count;) {
    if (++attempts > max_attempts) {
      throw DataError("rejection sampling exhausted after " + std::to_string(max_attempts) +
                      " attempts while injecting anomalies");
    }
    const NodeId u = pick(rng);
    const NodeId v = pick(rng);
    if (u == v) continue;
    if (admissible && !admissible(u, v)) continue;
    if (!taken.insert(pair_key(u, v)).second) continue;
    TemporalEdge e;
    e.src = u;
    e.dst = v;
    e.t = test.min_time() == test.max_time() ? test.min_time() : when(rng);
    e.feat = mean;
    e.label = 1;
    edges.push_back(std::move(e));
    ++added;
  }

  DatasetSplit out;
  out.train = split.train;
  out.test = TemporalGraph(test.num_nodes(), test.node_dim(), test.edge_dim(), test.node_attrs(),
                           std::move(edges), test.observations());
  out.injection_ratio = ratio;
  out.seed = seed;
  return out;
}

TemporalGraph history_graph(const DatasetSplit& split) {
  const auto& tr = split.train;
  const auto& te = split.test;
  std::vector<TemporalEdge> edges = tr.edges();
  std::vector<NodeObservation> obs = tr.observations();
  if (!tr.has_observations() || tr.edges() != te.edges()) {
    edges.insert(edges.end(), te.edges().begin(), te.edges().end());
  }
  obs.insert(obs.end(), te.observations().begin(), te.observations().end());
  return TemporalGraph(tr.num_nodes(), tr.node_dim(), tr.edge_dim(), tr.node_attrs(), std::move(edges),
                       std::move(obs));
}

// ---------------------------------------------------------------------------
// Canonical JSON

nlohmann::json to_json(const TemporalGraph& g) {
  nlohmann::json j;
  j["version"] = 1;
  j["n"] = g.num_nodes();
  j["d_n"] = g.node_dim();
  j["d_e"] = g.edge_dim();
  auto nodes = nlohmann::json::array();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto row = g.node_attr(v);
    nodes.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["nodes"] = std::move(nodes);
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"id", e.id}, {"src", e.src}, {"dst", e.dst}, {"t", e.t}, {"feat", e.feat},
                     {"label", e.label}});
  }
  j["edges"] = std::move(edges);
  if (g.has_observations()) {
    auto obs = nlohmann::json::array();
    for (const auto& o : g.observations()) {
      obs.push_back({{"node", o.node}, {"t", o.t}, {"feat", o.feat}, {"label", o.label}});
    }
    j["observations"] = std::move(obs);
  }
  return j;
}

TemporalGraph graph_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw DataError("unsupported graph version");
    const int n = j.at("n").get<int>();
    const int d_n = j.at("d_n").get<int>();
    const int d_e = j.at("d_e").get<int>();
    std::vector<double> x;
    for (const auto& row : j.at("nodes")) {
      auto r = row.get<std::vector<double>>();
      if (r.size() != static_cast<size_t>(d_n)) throw DataError("node row has wrong width");
      x.insert(x.end(), r.begin(), r.end());
    }
    std::vector<TemporalEdge> edges;
    for (const auto& je : j.at("edges")) {
      edges.push_back(TemporalEdge{je.at("id").get<EdgeId>(), je.at("src").get<NodeId>(),
                                   je.at("dst").get<NodeId>(), je.at("t").get<double>(),
                                   je.at("feat").get<FeatVec>(), je.at("label").get<int>()});
    }
    std::vector<NodeObservation> obs;
    if (j.contains("observations")) {
      for (const auto& jo : j.at("observations")) {
        obs.push_back(NodeObservation{jo.at("node").get<NodeId>(), jo.at("t").get<double>(),
                                      jo.at("feat").get<FeatVec>(), jo.at("label").get<int>()});
      }
    }
    return TemporalGraph(n, d_n, d_e, std::move(x), std::move(edges), std::move(obs));
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed graph document: ") + ex.what());
  }
}

std::string canonical_serialization(const TemporalGraph& g) { return to_json(g).dump() + "\n"; }

}  // namespace dgad
