#pragma once

#include <numeric>
#include <random>
#include <vector>

#include "dgad/sampler.hpp"

namespace dgad::testing {

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Row i of P X is row perm[i] of X.
inline Eigen::MatrixXd permutation_matrix(const std::vector<int>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, perm[static_cast<size_t>(i)]) = 1.0;
  return p;
}

// Relabels the local node and edge rows of a sequence's subgraph (new row i
// is old row perm[i]) and rewrites the tokens so they still point at the same
// events.
inline EgoGraphSequence relabel(const EgoGraphSequence& seq, const std::vector<int>& node_perm,
                                const std::vector<int>& edge_perm) {
  const auto& s = seq.subgraph;
  const Eigen::MatrixXd pv = permutation_matrix(node_perm), pe = permutation_matrix(edge_perm);
  EgoGraphSequence out = seq;
  auto& t = out.subgraph;
  auto reorder = [](const auto& v, const std::vector<int>& perm) {
    std::remove_cvref_t<decltype(v)> r(v.size());
    for (size_t i = 0; i < perm.size(); ++i) r[i] = v[static_cast<size_t>(perm[i])];
    return r;
  };
  t.node_ids = reorder(s.node_ids, node_perm);
  t.node_hop = reorder(s.node_hop, node_perm);
  t.node_time = reorder(s.node_time, node_perm);
  t.edge_ids = reorder(s.edge_ids, edge_perm);
  t.edge_hop = reorder(s.edge_hop, edge_perm);
  t.edge_time = reorder(s.edge_time, edge_perm);
  t.adj_nodes = pv * s.adj_nodes * pv.transpose();
  t.adj_edges = pe * s.adj_edges * pe.transpose();
  t.incidence = pv * s.incidence * pe.transpose();
  t.node_feats = pv * s.node_feats;
  t.edge_feats = s.edge_feats.rows() == 0 ? s.edge_feats : Eigen::MatrixXd(pe * s.edge_feats);
  t.node_index.clear();
  t.edge_index.clear();
  for (int i = 0; i < t.num_nodes(); ++i) t.node_index[t.node_ids[static_cast<size_t>(i)]] = i;
  for (int i = 0; i < t.num_edges(); ++i) t.edge_index[t.edge_ids[static_cast<size_t>(i)]] = i;

  const auto& perm = seq.target == EventKind::Edge ? edge_perm : node_perm;
  std::vector<int> inverse(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inverse[static_cast<size_t>(perm[i])] = static_cast<int>(i);
  for (auto& tok : out.tokens) {
    if (!tok.khs) tok.local = inverse[static_cast<size_t>(tok.local)];
  }
  return out;
}

}  // namespace dgad::testing
