#include "dgad/tensgnn.hpp"

#include <cmath>
#include <stdexcept>

#include "dgad/error.hpp"
#include "dgad/init.hpp"

namespace dgad {

using ad::Matrix;
using ad::Var;

std::vector<ad::Parameter*> GnnParams::all() {
  std::vector<ad::Parameter*> out{&node_proj, &node_proj_bias, &edge_proj, &edge_proj_bias, &khs, &out_gain, &out_bias};
  for (auto& l : layers) {
    out.insert(out.end(), {&l.node_self, &l.node_gate, &l.edge_self, &l.edge_gate});
  }
  return out;
}

GnnParams init_gnn_params(const GnnConfig& cfg, std::mt19937_64& rng) {
  if (cfg.layers < 1 || cfg.layers > 8) throw ConfigError("gnn layers must be in [1, 8]");
  if (cfg.hidden < 1 || cfg.node_in < 1 || cfg.edge_in < 1) throw ConfigError("gnn widths must be >= 1");
  GnnParams p;
  p.config = cfg;
  const int h = cfg.hidden;
  if (cfg.hop_slots < 0) throw ConfigError("gnn hop slots must be >= 0");
  p.node_proj = {"gnn.node_proj", glorot(cfg.node_in + cfg.hop_slots, h, rng)};
  p.node_proj_bias = {"gnn.node_proj_bias", gaussian(1, h, 1.0, rng)};
  p.edge_proj = {"gnn.edge_proj", glorot(cfg.edge_in + cfg.hop_slots, h, rng)};
  p.edge_proj_bias = {"gnn.edge_proj_bias", gaussian(1, h, 1.0, rng)};
  p.khs = {"gnn.khs", gaussian(1, h, 1.0, rng)};
  p.out_gain = {"gnn.out_gain", Matrix::Ones(1, h)};
  p.out_bias = {"gnn.out_bias", Matrix::Zero(1, h)};
  const double s = 1.0 / std::sqrt(static_cast<double>(h));
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "gnn.layer" + std::to_string(l) + ".";
    GnnLayerParams lp;
    lp.node_self = {pre + "node_self", gaussian(h, h, s, rng)};
    lp.node_gate = {pre + "node_gate", gaussian(h, h, s, rng)};
    lp.edge_self = {pre + "edge_self", gaussian(h, h, s, rng)};
    lp.edge_gate = {pre + "edge_gate", gaussian(h, h, s, rng)};
    p.layers.push_back(std::move(lp));
  }
  return p;
}

Matrix normalize_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("normalize_adjacency: matrix is not square");
  Matrix with_loops = a + Matrix::Identity(a.rows(), a.cols());
  Eigen::VectorXd inv_sqrt = with_loops.rowwise().sum().array().rsqrt();
  return inv_sqrt.asDiagonal() * with_loops * inv_sqrt.asDiagonal();
}

Matrix with_hop_encoding(const Matrix& feats, const std::vector<int>& hops, int slots) {
  if (static_cast<Eigen::Index>(hops.size()) != feats.rows()) {
    throw std::invalid_argument("with_hop_encoding: one hop per row expected");
  }
  Matrix out = Matrix::Zero(feats.rows(), feats.cols() + slots);
  out.leftCols(feats.cols()) = feats;
  if (slots == 0) return out;
  for (Eigen::Index r = 0; r < feats.rows(); ++r) {
    const int hop = hops[static_cast<size_t>(r)];
    const int slot = hop < 0 || hop >= slots - 1 ? slots - 1 : hop;
    out(r, feats.cols() + slot) = 1.0;
  }
  return out;
}

Var node_layer(Var h_nodes, Var h_edges, const Matrix& incidence, const Matrix& norm_adj_nodes,
               Var node_self, Var node_gate) {
  if (norm_adj_nodes.rows() != h_nodes.rows() || norm_adj_nodes.cols() != h_nodes.rows() ||
      incidence.rows() != h_nodes.rows()) {
    throw std::invalid_argument("node_layer: shape mismatch");
  }
  Var msg = matmul(lmul(norm_adj_nodes, h_nodes), node_self);
  if (incidence.cols() == 0) return relu(msg);
  if (incidence.cols() != h_edges.rows()) throw std::invalid_argument("node_layer: shape mismatch");
  Var gate = matmul(lmul(incidence, h_edges), node_gate);
  return relu(hadamard(gate, msg));
}

Var edge_layer(Var h_edges, Var h_nodes, const Matrix& incidence, const Matrix& norm_adj_edges,
               Var edge_self, Var edge_gate) {
  if (norm_adj_edges.rows() != h_edges.rows() || norm_adj_edges.cols() != h_edges.rows() ||
      incidence.cols() != h_edges.rows() || incidence.rows() != h_nodes.rows()) {
    throw std::invalid_argument("edge_layer: shape mismatch");
  }
  Var msg = matmul(lmul(norm_adj_edges, h_edges), edge_self);
  Var gate = matmul(lmul(incidence.transpose(), h_nodes), edge_gate);
  return relu(hadamard(gate, msg));
}

GnnOutput tensgnn_forward(ad::Tape& tape, const EgoGraphSequence& seq, GnnParams& params) {
  const auto& sub = seq.subgraph;
  const bool has_edges = sub.num_edges() > 0;
  if (sub.node_feats.cols() != params.config.node_in ||
      (has_edges && sub.edge_feats.cols() != params.config.edge_in)) {
    throw std::invalid_argument("tensgnn_forward: feature width does not match parameters");
  }
  const Matrix adj_v = normalize_adjacency(sub.adj_nodes);
  const Matrix adj_e = normalize_adjacency(sub.adj_edges);

  const int slots = params.config.hop_slots;
  Var h_v = add_row(matmul(tape.constant(with_hop_encoding(sub.node_feats, sub.node_hop, slots)),
                           tape.param(params.node_proj)),
                    tape.param(params.node_proj_bias));
  Var h_e;
  if (has_edges) {
    h_e = add_row(matmul(tape.constant(with_hop_encoding(sub.edge_feats, sub.edge_hop, slots)),
                         tape.param(params.edge_proj)),
                  tape.param(params.edge_proj_bias));
  }
  const int h = params.config.hidden;
  const Var ones = tape.constant(Matrix::Ones(1, h));
  const Var zeros = tape.constant(Matrix::Zero(1, h));
  auto standardize = [&](Var x) { return layer_norm_rows(x, ones, zeros); };

  const bool edge_last = seq.target == EventKind::Edge;
  for (auto& layer : params.layers) {
    auto step_nodes = [&] {
      h_v = standardize(node_layer(h_v, h_e.valid() ? h_e : h_v, sub.incidence, adj_v,
                                   tape.param(layer.node_self), tape.param(layer.node_gate)));
    };
    auto step_edges = [&] {
      if (!has_edges) return;
      h_e = standardize(edge_layer(h_e, h_v, sub.incidence, adj_e, tape.param(layer.edge_self),
                                   tape.param(layer.edge_gate)));
    };
    if (edge_last) {
      step_nodes();
      step_edges();
    } else {
      step_edges();
      step_nodes();
    }
  }

  Var source = edge_last ? h_e : h_v;
  if (!source.valid()) throw std::invalid_argument("tensgnn_forward: edge task on a subgraph without edges");
  source = layer_norm_rows(source, tape.param(params.out_gain), tape.param(params.out_bias));
  std::vector<int> rows;
  rows.reserve(seq.tokens.size());
  for (const auto& tok : seq.tokens) {
    if (tok.khs) {
      rows.push_back(-1);
      continue;
    }
    if (tok.local < 0 || tok.local >= source.rows()) {
      throw DataError("token " + std::to_string(tok.global) + " has no row in the ego-subgraph");
    }
    rows.push_back(tok.local);
  }
  return GnnOutput{h_v, h_e, gather_rows(source, tape.param(params.khs), rows)};
}

}  // namespace dgad
