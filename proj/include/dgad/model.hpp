#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dgad/attention.hpp"
#include "dgad/autodiff.hpp"
#include "dgad/sampler.hpp"
#include "dgad/tensgnn.hpp"

namespace dgad {

struct ModelConfig {
  EventKind task = EventKind::Edge;
  int k = 2;           // ego-graph hops
  int gnn_layers = 2;  // TensGNN depth
  int budget = 32;     // events kept per hop and kind
  int gnn_hidden = 128;
  int width = 256;
  int heads = 4;
  int layers = 6;
  int ffn_width = 512;
  // ablation switches
  bool use_tensgnn = true;
  bool temporal_sort = true;
  bool special_tokens = true;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

// TensGNN extractor + temporal-aware transformer + scoring head.
class Model {
 public:
  Model() = default;
  Model(const ModelConfig& cfg, int node_dim, int edge_dim, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  int node_dim() const { return node_dim_; }
  int edge_dim() const { return edge_dim_; }

  EgoGraphSequence make_sequence(const TemporalGraph& g, const EgoCenter& center,
                                 std::uint64_t seed) const;

  // Records the full pipeline on `tape` and returns the 1x1 anomaly score.
  ad::Var forward(ad::Tape& tape, const EgoGraphSequence& seq);
  double score(const EgoGraphSequence& seq);

  // Parameters that take part in the forward pass.
  std::vector<ad::Parameter*> parameters();
  void zero_grad();

  GnnParams& gnn() { return gnn_; }
  AttnParams& attn() { return attn_; }
  ScoringHead& head() { return head_; }

 private:
  ModelConfig cfg_;
  int node_dim_ = 1;
  int edge_dim_ = 1;
  GnnParams gnn_;
  AttnParams attn_;
  ScoringHead head_;
};

// Tensor dump: {name: {"shape": [r, c], "values": [row-major]}}.
nlohmann::json tensors_to_json(const std::vector<ad::Parameter*>& params);
void tensors_from_json(const nlohmann::json& j, const std::vector<ad::Parameter*>& params);

nlohmann::json model_to_json(Model& model);
Model model_from_json(const nlohmann::json& j);

}  // namespace dgad
