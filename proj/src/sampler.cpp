#include "dgad/sampler.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <unordered_set>

#include "dgad/error.hpp"

namespace dgad {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

// Keeps a seeded uniform subset of `ids` (already sorted) of size <= budget.
template <typename Id>
void subsample(std::vector<Id>& ids, int budget, std::uint64_t seed) {
  if (budget == kUnlimitedBudget || ids.size() <= static_cast<size_t>(budget)) return;
  std::mt19937_64 rng(seed);
  const auto keep = static_cast<size_t>(budget);
  for (size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(keep);
  std::sort(ids.begin(), ids.end());
}

}  // namespace

std::optional<int> EgoSubgraph::local_node(NodeId v) const {
  auto it = node_index.find(v);
  if (it == node_index.end()) return std::nullopt;
  return it->second;
}

std::optional<int> EgoSubgraph::local_edge(EdgeId e) const {
  auto it = edge_index.find(e);
  if (it == edge_index.end()) return std::nullopt;
  return it->second;
}

std::optional<int> EgoSubgraph::hop_of(EventRef ev) const {
  if (ev.kind == EventKind::Node) {
    auto l = local_node(ev.id);
    if (!l || node_hop[static_cast<size_t>(*l)] < 0) return std::nullopt;
    return node_hop[static_cast<size_t>(*l)];
  }
  auto l = local_edge(ev.id);
  if (!l) return std::nullopt;
  return edge_hop[static_cast<size_t>(*l)];
}

std::vector<std::pair<EventRef, int>> EgoSubgraph::reached() const {
  std::vector<std::pair<EventRef, int>> out;
  for (size_t i = 0; i < node_ids.size(); ++i) {
    if (node_hop[i] >= 0) out.push_back({EventRef{EventKind::Node, node_ids[i]}, node_hop[i]});
  }
  for (size_t i = 0; i < edge_ids.size(); ++i) {
    out.push_back({EventRef{EventKind::Edge, edge_ids[i]}, edge_hop[i]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

EgoCenter center_of(const TemporalGraph& g, const Event& ev) {
  EgoCenter c;
  c.kind = ev.kind;
  c.ref = ev.ref;
  c.t = ev.t;
  if (ev.kind == EventKind::Edge) {
    if (ev.ref < 0 || ev.ref >= g.num_edges()) {
      throw DataError("center edge " + std::to_string(ev.ref) + " is not in the graph");
    }
    const auto& e = g.edge(ev.ref);
    c.src = e.src;
    c.dst = e.dst;
    c.t = e.t;
    c.feat = ev.feat.empty() ? e.feat : ev.feat;
  } else {
    if (ev.ref < 0 || ev.ref >= g.num_nodes()) {
      throw DataError("center node " + std::to_string(ev.ref) + " is not in the graph");
    }
    if (ev.feat.empty()) {
      auto f = g.node_feature_at(ev.ref, ev.t);
      c.feat.assign(f.begin(), f.end());
    } else {
      c.feat = ev.feat;
    }
  }
  return c;
}

EgoCenter probe_edge(NodeId src, NodeId dst, Timestamp t, FeatVec feat) {
  return EgoCenter{EventKind::Edge, kProbeEdge, src, dst, t, std::move(feat)};
}

EgoSubgraph khop_ego(const TemporalGraph& g, const Event& center, int k, int budget,
                     std::uint64_t seed) {
  return khop_ego(g, center_of(g, center), k, budget, seed);
}

EgoSubgraph khop_ego(const TemporalGraph& g, const EgoCenter& center, int k, int budget,
                     std::uint64_t seed) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (budget < 1) throw ConfigError("budget must be >= 1");
  const bool edge_center = center.kind == EventKind::Edge;
  if (edge_center) {
    if (center.src < 0 || center.src >= g.num_nodes() || center.dst < 0 || center.dst >= g.num_nodes()) {
      throw DataError("center edge endpoints are not in the graph");
    }
    if (center.ref != kProbeEdge && (center.ref < 0 || center.ref >= g.num_edges())) {
      throw DataError("center edge " + std::to_string(center.ref) + " is not in the graph");
    }
    if (static_cast<int>(center.feat.size()) != g.edge_dim()) throw DataError("center feature width mismatch");
  } else {
    if (center.ref < 0 || center.ref >= g.num_nodes()) {
      throw DataError("center node " + std::to_string(center.ref) + " is not in the graph");
    }
    if (static_cast<int>(center.feat.size()) != g.node_dim()) throw DataError("center feature width mismatch");
  }
  if (center.hidden != kProbeEdge && (center.hidden < 0 || center.hidden >= g.num_edges())) {
    throw DataError("hidden edge " + std::to_string(center.hidden) + " is not in the graph");
  }
  const Timestamp cutoff = center.t;

  std::uint64_t base = mix(mix(seed, edge_center ? 1 : 2), static_cast<std::uint64_t>(center.ref));
  base = mix(base, std::bit_cast<std::uint64_t>(cutoff));
  base = mix(mix(base, static_cast<std::uint64_t>(center.src)), static_cast<std::uint64_t>(center.dst));

  std::unordered_map<NodeId, int> node_hop;
  std::unordered_map<EdgeId, int> edge_hop;
  std::vector<NodeId> frontier_nodes;
  std::vector<EdgeId> frontier_edges;
  if (edge_center) {
    edge_hop[center.ref] = 0;
    frontier_edges.push_back(center.ref);
  } else {
    node_hop[center.ref] = 0;
    frontier_nodes.push_back(center.ref);
  }

  std::vector<NodeId> cand_nodes;
  std::vector<EdgeId> cand_edges;
  for (int h = 1; h <= k; ++h) {
    cand_nodes.clear();
    cand_edges.clear();
    auto touch_node = [&](NodeId v) {
      if (node_hop.emplace(v, h).second) cand_nodes.push_back(v);
    };
    auto touch_edge = [&](EdgeId e) {
      if (edge_hop.emplace(e, h).second) cand_edges.push_back(e);
    };
    auto expand_node = [&](NodeId v, bool with_neighbours) {
      for (EdgeId f : g.incident_until(v, cutoff)) {
        if (f == center.hidden) continue;
        touch_edge(f);
        if (with_neighbours) {
          const auto& fe = g.edge(f);
          touch_node(fe.src == v ? fe.dst : fe.src);
        }
      }
    };
    for (EdgeId e : frontier_edges) {
      const NodeId a = e == kProbeEdge ? center.src : g.edge(e).src;
      const NodeId b = e == kProbeEdge ? center.dst : g.edge(e).dst;
      touch_node(a);
      touch_node(b);
      expand_node(a, false);
      expand_node(b, false);
    }
    for (NodeId v : frontier_nodes) expand_node(v, true);

    std::sort(cand_nodes.begin(), cand_nodes.end());
    std::sort(cand_edges.begin(), cand_edges.end());
    const std::uint64_t hop_seed = mix(base, static_cast<std::uint64_t>(h));
    subsample(cand_nodes, budget, mix(hop_seed, 1));
    subsample(cand_edges, budget, mix(hop_seed, 2));
    frontier_nodes = cand_nodes;
    frontier_edges = cand_edges;
    // dropped events stay marked as visited so hops remain shortest distances,
    // but they are not part of the subgraph
    for (NodeId v : cand_nodes) node_hop[v] = h + 1000 * (k + 1);
    for (EdgeId e : cand_edges) edge_hop[e] = h + 1000 * (k + 1);
  }

  // Recover kept events: marked ones (offset) plus the center.
  const int mark = 1000 * (k + 1);
  EgoSubgraph sub;
  sub.center = center;
  sub.k = k;

  struct EdgeEntry {
    int hop;
    Timestamp t;
    EdgeId id;
  };
  std::vector<EdgeEntry> kept_edges;
  for (const auto& [e, hop] : edge_hop) {
    if (hop == 0) continue;
    if (hop > mark) kept_edges.push_back({hop - mark, g.edge(e).t, e});
  }
  std::sort(kept_edges.begin(), kept_edges.end(), [](const EdgeEntry& a, const EdgeEntry& b) {
    return std::tie(a.hop, a.t, a.id) < std::tie(b.hop, b.t, b.id);
  });
  if (edge_center) kept_edges.insert(kept_edges.begin(), EdgeEntry{0, center.t, center.ref});

  std::vector<std::pair<int, NodeId>> kept_nodes;
  for (const auto& [v, hop] : node_hop) {
    if (hop == 0) kept_nodes.push_back({0, v});
    else if (hop > mark) kept_nodes.push_back({hop - mark, v});
  }
  std::sort(kept_nodes.begin(), kept_nodes.end());

  for (const auto& [hop, v] : kept_nodes) {
    sub.node_index.emplace(v, static_cast<int>(sub.node_ids.size()));
    sub.node_ids.push_back(v);
    sub.node_hop.push_back(hop);
  }
  auto endpoints = [&](const EdgeEntry& e) -> std::pair<NodeId, NodeId> {
    if (e.id == kProbeEdge) return {center.src, center.dst};
    return {g.edge(e.id).src, g.edge(e.id).dst};
  };
  std::vector<NodeId> closure;
  for (const auto& e : kept_edges) {
    auto [a, b] = endpoints(e);
    for (NodeId v : {a, b}) {
      if (!sub.node_index.count(v)) closure.push_back(v);
    }
  }
  std::sort(closure.begin(), closure.end());
  closure.erase(std::unique(closure.begin(), closure.end()), closure.end());
  for (NodeId v : closure) {
    sub.node_index.emplace(v, static_cast<int>(sub.node_ids.size()));
    sub.node_ids.push_back(v);
    sub.node_hop.push_back(-1);
  }
  for (const auto& e : kept_edges) {
    sub.edge_index.emplace(e.id, static_cast<int>(sub.edge_ids.size()));
    sub.edge_ids.push_back(e.id);
    sub.edge_hop.push_back(e.hop);
    sub.edge_time.push_back(e.t);
  }

  const int nv = sub.num_nodes();
  const int ne = sub.num_edges();
  sub.node_time.resize(static_cast<size_t>(nv));
  sub.adj_nodes = Eigen::MatrixXd::Zero(nv, nv);
  sub.adj_edges = Eigen::MatrixXd::Zero(ne, ne);
  sub.incidence = Eigen::MatrixXd::Zero(nv, ne);
  sub.node_feats = Eigen::MatrixXd::Zero(nv, g.node_dim());
  sub.edge_feats = Eigen::MatrixXd::Zero(ne, g.edge_dim());

  std::vector<std::vector<int>> edges_at(static_cast<size_t>(nv));
  for (int p = 0; p < ne; ++p) {
    auto [a, b] = endpoints(kept_edges[static_cast<size_t>(p)]);
    const int la = sub.node_index.at(a);
    const int lb = sub.node_index.at(b);
    sub.incidence(la, p) = 1.0;
    sub.incidence(lb, p) = 1.0;
    if (la != lb) {
      sub.adj_nodes(la, lb) = 1.0;
      sub.adj_nodes(lb, la) = 1.0;
    }
    edges_at[static_cast<size_t>(la)].push_back(p);
    if (lb != la) edges_at[static_cast<size_t>(lb)].push_back(p);
    const EdgeId id = kept_edges[static_cast<size_t>(p)].id;
    const FeatVec& f = (id == kProbeEdge || (edge_center && p == 0)) ? center.feat : g.edge(id).feat;
    for (int d = 0; d < g.edge_dim(); ++d) sub.edge_feats(p, d) = f[static_cast<size_t>(d)];
  }
  for (const auto& list : edges_at) {
    for (size_t i = 0; i < list.size(); ++i) {
      for (size_t j = i + 1; j < list.size(); ++j) {
        sub.adj_edges(list[i], list[j]) = 1.0;
        sub.adj_edges(list[j], list[i]) = 1.0;
      }
    }
  }
  for (int i = 0; i < nv; ++i) {
    const NodeId v = sub.node_ids[static_cast<size_t>(i)];
    const bool is_center = !edge_center && i == 0;
    auto f = is_center ? std::span<const double>(center.feat) : g.node_feature_at(v, cutoff);
    for (int d = 0; d < g.node_dim(); ++d) sub.node_feats(i, d) = f[static_cast<size_t>(d)];
    Timestamp t = cutoff;
    if (!is_center) {
      if (auto o = g.observation_at(v, cutoff)) {
        t = g.observations()[*o].t;
      } else {
        for (auto inc = g.incident_until(v, cutoff); !inc.empty(); inc = inc.first(inc.size() - 1)) {
          if (inc.back() != center.hidden) {
            t = g.edge(inc.back()).t;
            break;
          }
        }
      }
    }
    sub.node_time[static_cast<size_t>(i)] = t;
  }
  return sub;
}

EgoGraphSequence build_sequence(EgoSubgraph sub, const SequenceOptions& opts) {
  EgoGraphSequence seq;
  seq.target = sub.center.kind;
  const bool edges = seq.target == EventKind::Edge;
  std::vector<std::vector<Token>> segments(static_cast<size_t>(sub.k + 1));
  const auto& hops = edges ? sub.edge_hop : sub.node_hop;
  const auto& times = edges ? sub.edge_time : sub.node_time;
  for (size_t i = 0; i < hops.size(); ++i) {
    if (hops[i] < 0) continue;
    Token tok;
    tok.local = static_cast<int>(i);
    tok.hop = hops[i];
    tok.t = times[i];
    tok.global = edges ? sub.edge_ids[i] : sub.node_ids[i];
    segments[static_cast<size_t>(hops[i])].push_back(tok);
  }
  for (size_t h = 0; h < segments.size(); ++h) {
    auto& seg = segments[h];
    if (opts.temporal_sort) {
      std::sort(seg.begin(), seg.end(), [](const Token& a, const Token& b) {
        return a.t < b.t || (a.t == b.t && a.global < b.global);
      });
    } else {
      std::sort(seg.begin(), seg.end(), [](const Token& a, const Token& b) { return a.global < b.global; });
      std::mt19937_64 rng(mix(opts.shuffle_seed, h));
      std::shuffle(seg.begin(), seg.end(), rng);
    }
  }
  Token khs;
  khs.khs = true;
  if (opts.special_tokens) seq.tokens.push_back(khs);
  seq.center_position = static_cast<int>(seq.tokens.size());
  for (size_t h = 0; h < segments.size(); ++h) {
    seq.tokens.insert(seq.tokens.end(), segments[h].begin(), segments[h].end());
    if (opts.special_tokens) seq.tokens.push_back(khs);
  }
  seq.subgraph = std::move(sub);
  return seq;
}

SequenceStats sequence_stats(const EgoGraphSequence& seq) {
  SequenceStats s;
  s.token_count = static_cast<int>(seq.tokens.size());
  s.per_hop_counts.assign(static_cast<size_t>(seq.subgraph.k + 1), 0);
  for (const auto& tok : seq.tokens) {
    if (!tok.khs) ++s.per_hop_counts[static_cast<size_t>(tok.hop)];
  }
  return s;
}

nlohmann::json to_json(const EgoGraphSequence& seq) {
  nlohmann::json j;
  j["target"] = to_string(seq.target);
  j["center"] = seq.subgraph.center.ref;
  j["center_t"] = seq.subgraph.center.t;
  j["k"] = seq.subgraph.k;
  auto toks = nlohmann::json::array();
  for (const auto& t : seq.tokens) {
    if (t.khs) {
      toks.push_back("KHS");
    } else {
      toks.push_back({{"id", t.global}, {"hop", t.hop}, {"t", t.t}});
    }
  }
  j["tokens"] = std::move(toks);
  auto st = sequence_stats(seq);
  j["token_count"] = st.token_count;
  j["per_hop_counts"] = st.per_hop_counts;
  j["num_nodes"] = seq.subgraph.num_nodes();
  j["num_edges"] = seq.subgraph.num_edges();
  return j;
}

}  // namespace dgad
