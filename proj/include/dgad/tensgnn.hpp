#pragma once

#include <random>
#include <vector>

#include "dgad/autodiff.hpp"
#include "dgad/sampler.hpp"

namespace dgad {

struct GnnConfig {
  int node_in = 1;
  int edge_in = 1;
  int hidden = 128;
  int layers = 2;  // number of (node, edge) layer pairs
  // One-hot hop columns appended to the raw features: hops 0..k, then one
  // slot for closure endpoints. 0 disables the encoding.
  int hop_slots = 0;
};

struct GnnLayerParams {
  ad::Parameter node_self;  // W_v: acts on normalized node neighbourhoods
  ad::Parameter node_gate;  // W'_e: gates nodes with incident edge states
  ad::Parameter edge_self;  // W_e: acts on line-graph neighbourhoods
  ad::Parameter edge_gate;  // W'_v: gates edges with endpoint node states
};

struct GnnParams {
  GnnConfig config;
  ad::Parameter node_proj, node_proj_bias;
  ad::Parameter edge_proj, edge_proj_bias;
  ad::Parameter khs;  // structural embedding of the hop marker
  ad::Parameter out_gain, out_bias;  // layer norm on the final event states
  std::vector<GnnLayerParams> layers;

  std::vector<ad::Parameter*> all();
};

GnnParams init_gnn_params(const GnnConfig& cfg, std::mt19937_64& rng);

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
ad::Matrix normalize_adjacency(const ad::Matrix& a);

// sigma((T H_e W'_e) .* (Abar_v H_v W_v)); with no edges the gate is all ones.
ad::Var node_layer(ad::Var h_nodes, ad::Var h_edges, const ad::Matrix& incidence,
                   const ad::Matrix& norm_adj_nodes, ad::Var node_self, ad::Var node_gate);

// sigma((T^T H_v W'_v) .* (Abar_e H_e W_e)).
ad::Var edge_layer(ad::Var h_edges, ad::Var h_nodes, const ad::Matrix& incidence,
                   const ad::Matrix& norm_adj_edges, ad::Var edge_self, ad::Var edge_gate);

// Raw features followed by the one-hot hop encoding of each row.
ad::Matrix with_hop_encoding(const ad::Matrix& feats, const std::vector<int>& hops, int slots);

struct GnnOutput {
  ad::Var nodes;   // final H_v
  ad::Var edges;   // final H_e (invalid when the subgraph has no edges)
  ad::Var tokens;  // Phi: one row per sequence token
};

// Projects raw features (plus hop encoding), alternates layers so the last one
// matches the sequence's target kind, standardizing every row after each
// layer, and maps every token to its row (KHS tokens to the learned marker
// embedding).
GnnOutput tensgnn_forward(ad::Tape& tape, const EgoGraphSequence& seq, GnnParams& params);

}  // namespace dgad
