#include "dgad/attention.hpp"

#include <cmath>
#include <stdexcept>

#include "dgad/error.hpp"
#include "dgad/init.hpp"

namespace dgad {

using ad::Matrix;
using ad::Var;

std::vector<ad::Parameter*> AttnParams::all() {
  std::vector<ad::Parameter*> out{&node_proj, &node_proj_bias, &edge_proj, &edge_proj_bias, &khs};
  for (auto& l : layers) {
    out.insert(out.end(), {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo, &l.ln1_gain,
                           &l.ln1_bias, &l.ff1, &l.ff1_bias, &l.ff2, &l.ff2_bias, &l.ln2_gain,
                           &l.ln2_bias});
  }
  return out;
}

AttnParams init_attn_params(const AttnConfig& cfg, std::mt19937_64& rng) {
  if (cfg.heads < 1 || cfg.width < 1 || cfg.width % cfg.heads != 0) {
    throw ConfigError("model width must be a positive multiple of the head count");
  }
  if (cfg.layers < 1) throw ConfigError("transformer layers must be >= 1");
  if (cfg.ffn_width < 1 || cfg.struct_width < 1) throw ConfigError("transformer widths must be >= 1");
  AttnParams p;
  p.config = cfg;
  const int d = cfg.width;
  p.node_proj = {"tat.node_proj", glorot(cfg.node_in, d, rng)};
  p.node_proj_bias = {"tat.node_proj_bias", gaussian(1, d, 0.5, rng)};
  p.edge_proj = {"tat.edge_proj", glorot(cfg.edge_in, d, rng)};
  p.edge_proj_bias = {"tat.edge_proj_bias", gaussian(1, d, 0.5, rng)};
  p.khs = {"tat.khs", gaussian(1, d, 0.5, rng)};
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "tat.layer" + std::to_string(l) + ".";
    const int qk_in = l == 0 && cfg.structural_qk ? cfg.struct_width : d;
    AttnLayerParams lp;
    lp.wq = {pre + "wq", glorot(qk_in, d, rng)};
    lp.bq = {pre + "bq", Matrix::Zero(1, d)};
    lp.wk = {pre + "wk", glorot(qk_in, d, rng)};
    lp.bk = {pre + "bk", Matrix::Zero(1, d)};
    lp.wv = {pre + "wv", glorot(d, d, rng)};
    lp.bv = {pre + "bv", Matrix::Zero(1, d)};
    lp.wo = {pre + "wo", glorot(d, d, rng)};
    lp.bo = {pre + "bo", Matrix::Zero(1, d)};
    lp.ln1_gain = {pre + "ln1_gain", Matrix::Ones(1, d)};
    lp.ln1_bias = {pre + "ln1_bias", Matrix::Zero(1, d)};
    lp.ff1 = {pre + "ff1", glorot(d, cfg.ffn_width, rng)};
    lp.ff1_bias = {pre + "ff1_bias", Matrix::Zero(1, cfg.ffn_width)};
    lp.ff2 = {pre + "ff2", glorot(cfg.ffn_width, d, rng)};
    lp.ff2_bias = {pre + "ff2_bias", Matrix::Zero(1, d)};
    lp.ln2_gain = {pre + "ln2_gain", Matrix::Ones(1, d)};
    lp.ln2_bias = {pre + "ln2_bias", Matrix::Zero(1, d)};
    p.layers.push_back(std::move(lp));
  }
  return p;
}

ScoringHead init_scoring_head(int width, std::mt19937_64& rng) {
  return ScoringHead{{"head.weight", glorot(width, 1, rng)}, {"head.bias", Matrix::Zero(1, 1)}};
}

AttentionOutput attend(Var q, Var k, Var v) {
  if (q.rows() == 0) throw std::invalid_argument("attention over an empty token list");
  if (q.cols() != k.cols() || k.rows() != v.rows() || q.rows() != k.rows()) {
    throw std::invalid_argument("attend: shape mismatch");
  }
  const double temp = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Var weights = softmax_rows(scale(matmul_nt(q, k), temp));
  return AttentionOutput{matmul(weights, v), weights};
}

AttentionOutput kernel_attention(Var raw, Var structure, Var wq, Var bq, Var wk, Var bk, Var wv, Var bv) {
  if (raw.rows() == 0) throw std::invalid_argument("attention over an empty token list");
  if (raw.rows() != structure.rows()) throw std::invalid_argument("kernel_attention: rows not aligned");
  Var q = add_row(matmul(structure, wq), bq);
  Var k = add_row(matmul(structure, wk), bk);
  Var v = add_row(matmul(raw, wv), bv);
  return attend(q, k, v);
}

Var raw_token_features(ad::Tape& tape, const EgoGraphSequence& seq, AttnParams& params) {
  const auto& sub = seq.subgraph;
  const bool edges = seq.target == EventKind::Edge;
  const Matrix& feats = edges ? sub.edge_feats : sub.node_feats;
  auto& proj = edges ? params.edge_proj : params.node_proj;
  auto& bias = edges ? params.edge_proj_bias : params.node_proj_bias;
  if (feats.cols() != proj.value.rows()) throw std::invalid_argument("raw feature width mismatch");

  // project only the rows that appear as tokens
  std::vector<int> rows;
  Matrix picked(static_cast<Eigen::Index>(seq.tokens.size()), feats.cols());
  Eigen::Index n = 0;
  for (const auto& tok : seq.tokens) {
    if (tok.khs) {
      rows.push_back(-1);
      continue;
    }
    if (tok.local < 0 || tok.local >= feats.rows()) throw DataError("token without a feature row");
    picked.row(n) = feats.row(tok.local);
    rows.push_back(static_cast<int>(n++));
  }
  if (n == 0) throw std::invalid_argument("sequence has no event tokens");
  picked.conservativeResize(n, Eigen::NoChange);
  Var projected = add_row(matmul(tape.constant(std::move(picked)), tape.param(proj)), tape.param(bias));
  return gather_rows(projected, tape.param(params.khs), rows);
}

TransformerOutput transformer_forward(ad::Tape& tape, const EgoGraphSequence& seq, Var structure,
                                      AttnParams& params) {
  const auto& cfg = params.config;
  Var raw = raw_token_features(tape, seq, params);
  Var qk_first = cfg.structural_qk ? structure : raw;
  if (qk_first.rows() != raw.rows()) throw std::invalid_argument("structure rows do not match tokens");
  const Eigen::Index dh = cfg.head_width();

  TransformerOutput out;
  Var x = raw;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    auto& lp = params.layers[l];
    Var qk_src = l == 0 ? qk_first : x;
    Var q = add_row(matmul(qk_src, tape.param(lp.wq)), tape.param(lp.bq));
    Var k = add_row(matmul(qk_src, tape.param(lp.wk)), tape.param(lp.bk));
    Var v = add_row(matmul(x, tape.param(lp.wv)), tape.param(lp.bv));
    std::vector<Var> heads;
    for (int h = 0; h < cfg.heads; ++h) {
      auto a = attend(slice_cols(q, h * dh, dh), slice_cols(k, h * dh, dh), slice_cols(v, h * dh, dh));
      heads.push_back(a.values);
      out.attention.push_back(a.weights);
    }
    Var mixed = add_row(matmul(cfg.heads == 1 ? heads.front() : concat_cols(heads), tape.param(lp.wo)),
                        tape.param(lp.bo));
    Var x1 = layer_norm_rows(add(x, mixed), tape.param(lp.ln1_gain), tape.param(lp.ln1_bias));
    Var hidden = relu(add_row(matmul(x1, tape.param(lp.ff1)), tape.param(lp.ff1_bias)));
    Var ff = add_row(matmul(hidden, tape.param(lp.ff2)), tape.param(lp.ff2_bias));
    x = layer_norm_rows(add(x1, ff), tape.param(lp.ln2_gain), tape.param(lp.ln2_bias));
  }
  out.embeddings = x;
  return out;
}

Var score_row(Var embeddings, int row, ScoringHead& head) {
  ad::Tape& tape = *embeddings.tape();
  if (row < 0 || row >= embeddings.rows()) throw std::out_of_range("score_row: row out of range");
  Var picked = gather_rows(embeddings, tape.constant(Matrix::Zero(1, embeddings.cols())), {row});
  return sigmoid(add(matmul(picked, tape.param(head.weight)), tape.param(head.bias)));
}

Var score_event(Var embeddings, const EgoGraphSequence& seq, ScoringHead& head) {
  return score_row(embeddings, seq.center_position, head);
}

}  // namespace dgad
