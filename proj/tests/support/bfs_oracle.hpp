#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "dgad/ctdg.hpp"
#include "dgad/sampler.hpp"

namespace dgad::testing {

// Reference k-hop search over the explicit mixed event graph: every node and
// every edge with t <= cutoff becomes a vertex, adjacency is tested pairwise.
inline std::vector<std::pair<EventRef, int>> bfs_oracle(const TemporalGraph& g, const EgoCenter& c, int k) {
  struct Vertex {
    EventRef ref;
    NodeId a = -1, b = -1;  // endpoints for edges, a == node for nodes
  };
  std::vector<Vertex> vs;
  for (NodeId v = 0; v < g.num_nodes(); ++v) vs.push_back({{EventKind::Node, v}, v, v});
  for (const auto& e : g.edges()) {
    if (e.t <= c.t && e.id != c.hidden) vs.push_back({{EventKind::Edge, e.id}, e.src, e.dst});
  }
  size_t start = 0;
  if (c.kind == EventKind::Edge) {
    if (c.ref == kProbeEdge) {
      vs.push_back({{EventKind::Edge, kProbeEdge}, c.src, c.dst});
      start = vs.size() - 1;
    } else {
      for (size_t i = 0; i < vs.size(); ++i) {
        if (vs[i].ref == EventRef{EventKind::Edge, c.ref}) start = i;
      }
    }
  } else {
    start = static_cast<size_t>(c.ref);
  }

  auto touches = [](const Vertex& e, NodeId v) { return e.a == v || e.b == v; };
  auto adjacent = [&](const Vertex& x, const Vertex& y) {
    const bool xe = x.ref.kind == EventKind::Edge, ye = y.ref.kind == EventKind::Edge;
    if (xe && ye) return touches(y, x.a) || touches(y, x.b);
    if (xe) return touches(x, y.a);
    if (ye) return touches(y, x.a);
    // two nodes: joined by some visible edge
    for (const auto& w : vs) {
      if (w.ref.kind == EventKind::Edge && ((w.a == x.a && w.b == y.a) || (w.a == y.a && w.b == x.a))) return true;
    }
    return false;
  };

  std::vector<int> dist(vs.size(), -1);
  dist[start] = 0;
  std::deque<size_t> queue{start};
  while (!queue.empty()) {
    const size_t u = queue.front();
    queue.pop_front();
    if (dist[u] == k) continue;
    for (size_t w = 0; w < vs.size(); ++w) {
      if (w == u || dist[w] >= 0 || !adjacent(vs[u], vs[w])) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  std::vector<std::pair<EventRef, int>> out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (dist[i] >= 0) out.push_back({vs[i].ref, dist[i]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dgad::testing
