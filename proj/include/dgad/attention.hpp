#pragma once

#include <random>
#include <vector>

#include "dgad/autodiff.hpp"
#include "dgad/sampler.hpp"

namespace dgad {

struct AttnConfig {
  int node_in = 1;
  int edge_in = 1;
  int struct_width = 128;  // width of the structural embeddings fed to Q/K
  int width = 256;         // d_m
  int heads = 4;
  int layers = 6;
  int ffn_width = 512;
  // false: the first layer's queries and keys come from the projected raw
  // features instead of the structural embeddings
  bool structural_qk = true;

  int head_width() const { return width / heads; }
};

struct AttnLayerParams {
  // Per-head projections are stored side by side: head h owns columns
  // [h*d_out, (h+1)*d_out).
  ad::Parameter wq, bq, wk, bk, wv, bv;
  ad::Parameter wo, bo;
  ad::Parameter ln1_gain, ln1_bias;
  ad::Parameter ff1, ff1_bias, ff2, ff2_bias;
  ad::Parameter ln2_gain, ln2_bias;
};

struct AttnParams {
  AttnConfig config;
  ad::Parameter node_proj, node_proj_bias;
  ad::Parameter edge_proj, edge_proj_bias;
  ad::Parameter khs;  // raw-feature embedding of the hop marker
  std::vector<AttnLayerParams> layers;

  std::vector<ad::Parameter*> all();
};

AttnParams init_attn_params(const AttnConfig& cfg, std::mt19937_64& rng);

struct ScoringHead {
  ad::Parameter weight;  // d_m x 1
  ad::Parameter bias;    // 1 x 1

  std::vector<ad::Parameter*> all() { return {&weight, &bias}; }
};

ScoringHead init_scoring_head(int width, std::mt19937_64& rng);

struct AttentionOutput {
  ad::Var values;   // tokens x d_out
  ad::Var weights;  // tokens x tokens, rows sum to one
};

// Exponential-kernel smoothing: row i of the output is the softmax over j of
// <Q_i, K_j>/sqrt(d_out) applied to V_j, with Q/K taken from `structure` and
// V from `raw`.
AttentionOutput kernel_attention(ad::Var raw, ad::Var structure, ad::Var wq, ad::Var bq, ad::Var wk,
                                 ad::Var bk, ad::Var wv, ad::Var bv);

// Same kernel on already projected Q, K, V.
AttentionOutput attend(ad::Var q, ad::Var k, ad::Var v);

struct TransformerOutput {
  ad::Var embeddings;                // tokens x d_m
  std::vector<ad::Var> attention;    // layers*heads weight matrices
};

// Raw token features projected to d_m (marker tokens get the learned marker row).
ad::Var raw_token_features(ad::Tape& tape, const EgoGraphSequence& seq, AttnParams& params);

TransformerOutput transformer_forward(ad::Tape& tape, const EgoGraphSequence& seq, ad::Var structure,
                                      AttnParams& params);

// logistic(affine(embedding of the center token)).
ad::Var score_event(ad::Var embeddings, const EgoGraphSequence& seq, ScoringHead& head);
ad::Var score_row(ad::Var embeddings, int row, ScoringHead& head);

}  // namespace dgad
