#include "dgad/model.hpp"

#include <random>

#include "dgad/error.hpp"

namespace dgad {

void ModelConfig::validate() const {
  if (k < 1) throw ConfigError("model.k must be >= 1");
  if (gnn_layers < 1 || gnn_layers > 8) throw ConfigError("model.gnn_layers must be in [1, 8]");
  if (budget < 1) throw ConfigError("model.budget must be >= 1");
  if (gnn_hidden < 1) throw ConfigError("model.gnn_hidden must be >= 1");
  if (width < 1 || heads < 1 || width % heads != 0) {
    throw ConfigError("model.width must be a positive multiple of model.heads");
  }
  if (layers < 1) throw ConfigError("model.layers must be >= 1");
  if (ffn_width < 1) throw ConfigError("model.ffn_width must be >= 1");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"task", to_string(c.task)},
          {"k", c.k},
          {"gnn_layers", c.gnn_layers},
          {"budget", c.budget},
          {"gnn_hidden", c.gnn_hidden},
          {"width", c.width},
          {"heads", c.heads},
          {"layers", c.layers},
          {"ffn_width", c.ffn_width},
          {"use_tensgnn", c.use_tensgnn},
          {"temporal_sort", c.temporal_sort},
          {"special_tokens", c.special_tokens}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    if (j.contains("task")) c.task = event_kind_from_string(j.at("task").get<std::string>());
    c.k = j.value("k", c.k);
    c.gnn_layers = j.value("gnn_layers", c.gnn_layers);
    c.budget = j.value("budget", c.budget);
    c.gnn_hidden = j.value("gnn_hidden", c.gnn_hidden);
    c.width = j.value("width", c.width);
    c.heads = j.value("heads", c.heads);
    c.layers = j.value("layers", c.layers);
    c.ffn_width = j.value("ffn_width", c.ffn_width);
    c.use_tensgnn = j.value("use_tensgnn", c.use_tensgnn);
    c.temporal_sort = j.value("temporal_sort", c.temporal_sort);
    c.special_tokens = j.value("special_tokens", c.special_tokens);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("model: ") + ex.what());
  }
  c.validate();
  return c;
}

Model::Model(const ModelConfig& cfg, int node_dim, int edge_dim, std::uint64_t seed)
    : cfg_(cfg), node_dim_(node_dim), edge_dim_(edge_dim) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  gnn_ = init_gnn_params(GnnConfig{node_dim, edge_dim, cfg.gnn_hidden, cfg.gnn_layers, cfg.k + 2}, rng);
  AttnConfig ac;
  ac.node_in = node_dim;
  ac.edge_in = edge_dim;
  ac.struct_width = cfg.gnn_hidden;
  ac.width = cfg.width;
  ac.heads = cfg.heads;
  ac.layers = cfg.layers;
  ac.ffn_width = cfg.ffn_width;
  ac.structural_qk = cfg.use_tensgnn;
  attn_ = init_attn_params(ac, rng);
  head_ = init_scoring_head(cfg.width, rng);
}

EgoGraphSequence Model::make_sequence(const TemporalGraph& g, const EgoCenter& center,
                                      std::uint64_t seed) const {
  SequenceOptions opts;
  opts.special_tokens = cfg_.special_tokens;
  opts.temporal_sort = cfg_.temporal_sort;
  opts.shuffle_seed = seed ^ 0x5bd1e995ULL;
  return build_sequence(khop_ego(g, center, cfg_.k, cfg_.budget, seed), opts);
}

ad::Var Model::forward(ad::Tape& tape, const EgoGraphSequence& seq) {
  ad::Var structure;
  if (cfg_.use_tensgnn) structure = tensgnn_forward(tape, seq, gnn_).tokens;
  auto out = transformer_forward(tape, seq, structure, attn_);
  return score_event(out.embeddings, seq, head_);
}

double Model::score(const EgoGraphSequence& seq) {
  ad::Tape tape;
  return forward(tape, seq).scalar();
}

std::vector<ad::Parameter*> Model::parameters() {
  std::vector<ad::Parameter*> out;
  if (cfg_.use_tensgnn) out = gnn_.all();
  for (auto* p : attn_.all()) out.push_back(p);
  for (auto* p : head_.all()) out.push_back(p);
  return out;
}

void Model::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

nlohmann::json tensors_to_json(const std::vector<ad::Parameter*>& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto* p : params) {
    std::vector<double> values;
    values.reserve(static_cast<size_t>(p->value.size()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) values.push_back(p->value(r, c));
    }
    j[p->name] = {{"shape", {p->value.rows(), p->value.cols()}}, {"values", std::move(values)}};
  }
  return j;
}

void tensors_from_json(const nlohmann::json& j, const std::vector<ad::Parameter*>& params) {
  for (auto* p : params) {
    if (!j.contains(p->name)) throw DataError("checkpoint is missing tensor " + p->name);
    const auto& t = j.at(p->name);
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    const auto values = t.at("values").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != p->value.rows() || shape[1] != p->value.cols() ||
        values.size() != static_cast<size_t>(shape[0] * shape[1])) {
      throw DataError("checkpoint tensor " + p->name + " has the wrong shape");
    }
    size_t i = 0;
    for (Eigen::Index r = 0; r < shape[0]; ++r) {
      for (Eigen::Index c = 0; c < shape[1]; ++c) p->value(r, c) = values[i++];
    }
    p->zero_grad();
  }
}

nlohmann::json model_to_json(Model& model) {
  return {{"version", 1},
          {"config", to_json(model.config())},
          {"node_dim", model.node_dim()},
          {"edge_dim", model.edge_dim()},
          {"tensors", tensors_to_json(model.parameters())}};
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw DataError("unsupported checkpoint version");
    Model m(model_config_from_json(j.at("config")), j.at("node_dim").get<int>(),
            j.at("edge_dim").get<int>(), 0);
    tensors_from_json(j.at("tensors"), m.parameters());
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed checkpoint: ") + ex.what());
  }
}

}  // namespace dgad
