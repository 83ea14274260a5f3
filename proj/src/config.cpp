#include "dgad/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

#include "dgad/error.hpp"

namespace dgad {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + "." + key + ": unknown field");
  }
}

template <typename T>
void read(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

char read_delimiter(const json& j, const std::string& where, char fallback) {
  std::string s(1, fallback);
  read(j, where, "delimiter", s);
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw ConfigError(where + ".delimiter: must be a single character");
  return s[0];
}

const char* format_name(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::EdgeStream: return "edge_stream";
    case DatasetFormat::Multivariate: return "multivariate";
    case DatasetFormat::SyntheticCommunity: return "synthetic_community";
    case DatasetFormat::SyntheticSensors: return "synthetic_sensors";
  }
  return "?";
}

DatasetFormat parse_format(const std::string& s) {
  for (auto f : {DatasetFormat::EdgeStream, DatasetFormat::Multivariate, DatasetFormat::SyntheticCommunity,
                 DatasetFormat::SyntheticSensors}) {
    if (s == format_name(f)) return f;
  }
  throw ConfigError("dataset.format: unknown format '" + s + "'");
}

DatasetConfig parse_dataset(const json& j) {
  const std::string w = "dataset";
  require_object(j, w);
  reject_unknown(j, w, {"format", "path", "schema", "synthetic"});
  DatasetConfig d;
  std::string format = format_name(d.format);
  read(j, w, "format", format);
  d.format = parse_format(format);
  read(j, w, "path", d.path);

  const json schema = j.value("schema", json::object());
  const std::string ws = w + ".schema";
  require_object(schema, ws);
  if (d.format == DatasetFormat::EdgeStream) {
    reject_unknown(schema, ws, {"delimiter", "has_header", "src_col", "dst_col", "rating_col", "time_col"});
    auto& s = d.edge_schema;
    s.delimiter = read_delimiter(schema, ws, s.delimiter);
    read(schema, ws, "has_header", s.has_header);
    read(schema, ws, "src_col", s.src_col);
    read(schema, ws, "dst_col", s.dst_col);
    read(schema, ws, "rating_col", s.rating_col);
    read(schema, ws, "time_col", s.time_col);
    for (int c : {s.src_col, s.dst_col, s.time_col}) {
      if (c < 0) throw ConfigError(ws + ": column indices must be >= 0");
    }
  } else {
    reject_unknown(schema, ws, {"delimiter", "has_header", "label_col", "window", "topk", "history"});
    auto& s = d.series_schema;
    s.delimiter = read_delimiter(schema, ws, s.delimiter);
    read(schema, ws, "has_header", s.has_header);
    read(schema, ws, "label_col", s.label_col);
    read(schema, ws, "window", s.window);
    read(schema, ws, "topk", s.topk);
    read(schema, ws, "history", s.history);
    if (s.window < 1) throw ConfigError(ws + ".window: must be >= 1");
    if (s.topk < 1) throw ConfigError(ws + ".topk: must be >= 1");
    if (s.history < 1) throw ConfigError(ws + ".history: must be >= 1");
  }

  const json syn = j.value("synthetic", json::object());
  const std::string wy = w + ".synthetic";
  require_object(syn, wy);
  if (d.format == DatasetFormat::SyntheticCommunity) {
    reject_unknown(syn, wy, {"nodes", "edges", "communities", "cross_prob", "horizon", "seed"});
    auto& c = d.community;
    read(syn, wy, "nodes", c.nodes);
    read(syn, wy, "edges", c.edges);
    read(syn, wy, "communities", c.communities);
    read(syn, wy, "cross_prob", c.cross_prob);
    read(syn, wy, "horizon", c.horizon);
    read(syn, wy, "seed", c.seed);
    if (c.nodes < 2) throw ConfigError(wy + ".nodes: must be >= 2");
    if (c.edges < 2) throw ConfigError(wy + ".edges: must be >= 2");
    if (c.communities < 1 || c.communities > c.nodes) throw ConfigError(wy + ".communities: out of range");
    if (c.cross_prob < 0.0 || c.cross_prob > 1.0) throw ConfigError(wy + ".cross_prob: must be in [0, 1]");
    if (!(c.horizon > 0.0)) throw ConfigError(wy + ".horizon: must be positive");
  } else if (d.format == DatasetFormat::SyntheticSensors) {
    reject_unknown(syn, wy,
                   {"sensors", "groups", "rows", "noise", "attack_after", "attacks", "attack_length", "seed"});
    auto& s = d.sensors;
    read(syn, wy, "sensors", s.sensors);
    read(syn, wy, "groups", s.groups);
    read(syn, wy, "rows", s.rows);
    read(syn, wy, "noise", s.noise);
    read(syn, wy, "attack_after", s.attack_after);
    read(syn, wy, "attacks", s.attacks);
    read(syn, wy, "attack_length", s.attack_length);
    read(syn, wy, "seed", s.seed);
    if (s.sensors < 2) throw ConfigError(wy + ".sensors: must be >= 2");
    if (s.groups < 1 || s.groups > s.sensors) throw ConfigError(wy + ".groups: out of range");
    if (s.rows < 10) throw ConfigError(wy + ".rows: must be >= 10");
    if (s.attack_after <= 0.0 || s.attack_after >= 1.0) throw ConfigError(wy + ".attack_after: must be in (0, 1)");
  } else if (!syn.empty()) {
    throw ConfigError(wy + ": only valid for synthetic formats");
  }

  const bool synthetic = d.format == DatasetFormat::SyntheticCommunity || d.format == DatasetFormat::SyntheticSensors;
  if (!synthetic && d.path.empty()) throw ConfigError("dataset.path: required for format " + format);
  return d;
}

SplitConfig parse_split(const json& j) {
  const std::string w = "split";
  require_object(j, w);
  reject_unknown(j, w, {"train_frac", "injection_ratio", "injection_seed", "cross_community_only"});
  SplitConfig s;
  read(j, w, "train_frac", s.train_frac);
  read(j, w, "injection_ratio", s.injection_ratio);
  read(j, w, "injection_seed", s.injection_seed);
  read(j, w, "cross_community_only", s.cross_community_only);
  if (!(s.train_frac > 0.0 && s.train_frac < 1.0)) throw ConfigError("split.train_frac: must be in (0, 1)");
  if (!(s.injection_ratio >= 0.0 && s.injection_ratio <= 1.0)) {
    throw ConfigError("split.injection_ratio: must be in [0, 1]");
  }
  return s;
}

json schema_json(const DatasetConfig& d) {
  if (d.format == DatasetFormat::EdgeStream) {
    const auto& s = d.edge_schema;
    return {{"delimiter", std::string(1, s.delimiter)}, {"has_header", s.has_header}, {"src_col", s.src_col},
            {"dst_col", s.dst_col}, {"rating_col", s.rating_col}, {"time_col", s.time_col}};
  }
  const auto& s = d.series_schema;
  return {{"delimiter", std::string(1, s.delimiter)}, {"has_header", s.has_header}, {"label_col", s.label_col},
          {"window", s.window}, {"topk", s.topk}, {"history", s.history}};
}

json synthetic_json(const DatasetConfig& d) {
  if (d.format == DatasetFormat::SyntheticCommunity) {
    const auto& c = d.community;
    return {{"nodes", c.nodes}, {"edges", c.edges}, {"communities", c.communities},
            {"cross_prob", c.cross_prob}, {"horizon", c.horizon}, {"seed", c.seed}};
  }
  if (d.format == DatasetFormat::SyntheticSensors) {
    const auto& s = d.sensors;
    return {{"sensors", s.sensors}, {"groups", s.groups}, {"rows", s.rows}, {"noise", s.noise},
            {"attack_after", s.attack_after}, {"attacks", s.attacks}, {"attack_length", s.attack_length},
            {"seed", s.seed}};
  }
  return json::object();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "config", {"dataset", "model", "split", "train", "seed", "output_dir"});
  if (!j.contains("dataset")) throw ConfigError("config.dataset: required");
  ExperimentConfig c;
  c.dataset = parse_dataset(j.at("dataset"));
  const json model = j.value("model", json::object());
  require_object(model, "model");
  reject_unknown(model, "model",
                 {"task", "k", "gnn_layers", "budget", "gnn_hidden", "width", "heads", "layers", "ffn_width",
                  "use_tensgnn", "temporal_sort", "special_tokens"});
  c.model = model_config_from_json(model);
  c.split = parse_split(j.value("split", json::object()));
  const json train = j.value("train", json::object());
  require_object(train, "train");
  reject_unknown(train, "train", {"lr", "epochs", "batch_size", "seed", "alpha", "beta", "negative_ratio"});
  c.train = train_config_from_json(train);
  read(j, "config", "seed", c.seed);
  read(j, "config", "output_dir", c.output_dir);
  if (c.output_dir.empty()) throw ConfigError("config.output_dir: must not be empty");

  const bool node_data =
      c.dataset.format == DatasetFormat::Multivariate || c.dataset.format == DatasetFormat::SyntheticSensors;
  if (node_data != (c.model.task == EventKind::Node)) {
    throw ConfigError(std::string("model.task: '") + to_string(c.model.task) + "' does not match dataset format '" +
                      format_name(c.dataset.format) + "'");
  }
  if (c.model.task == EventKind::Node && c.train.alpha == 0.0) {
    throw ConfigError("train.alpha: node tasks need the node-level loss term (alpha = 1)");
  }
  if (c.model.task == EventKind::Edge && c.train.beta == 0.0) {
    throw ConfigError("train.beta: edge tasks need the edge-level loss term (beta = 1)");
  }
  if (c.split.cross_community_only && c.dataset.format != DatasetFormat::SyntheticCommunity) {
    throw ConfigError("split.cross_community_only: requires format synthetic_community");
  }
  c.dataset.series_schema.train_frac = c.split.train_frac;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json dataset = {{"format", format_name(c.dataset.format)},
                  {"path", c.dataset.path},
                  {"schema", schema_json(c.dataset)}};
  const json syn = synthetic_json(c.dataset);
  if (!syn.empty()) dataset["synthetic"] = syn;
  return {{"dataset", dataset},
          {"model", to_json(c.model)},
          {"split",
           {{"train_frac", c.split.train_frac},
            {"injection_ratio", c.split.injection_ratio},
            {"injection_seed", c.split.injection_seed},
            {"cross_community_only", c.split.cross_community_only}}},
          {"train", to_json(c.train)},
          {"seed", c.seed},
          {"output_dir", c.output_dir}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  return experiment_config_from_json(j);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  json j = to_json(cfg);
  j.erase("output_dir");
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

TemporalGraph load_dataset(const DatasetConfig& cfg, LoadStats* stats) {
  switch (cfg.format) {
    case DatasetFormat::EdgeStream:
      return load_edge_stream(cfg.path, cfg.edge_schema, stats);
    case DatasetFormat::Multivariate:
      return load_multivariate_series(cfg.path, cfg.series_schema, stats);
    case DatasetFormat::SyntheticCommunity:
      return make_community_stream(cfg.community).graph;
    case DatasetFormat::SyntheticSensors: {
      const auto series = make_sensor_series(cfg.sensors);
      return build_series_graph(series.values, series.labels, cfg.series_schema, stats);
    }
  }
  throw ConfigError("dataset.format: unsupported");
}

DatasetSplit prepare_split(const ExperimentConfig& cfg, LoadStats* stats) {
  if (cfg.dataset.format == DatasetFormat::SyntheticCommunity) {
    const auto stream = make_community_stream(cfg.dataset.community);
    DatasetSplit split = chronological_split(stream.graph, cfg.split.train_frac);
    if (cfg.split.injection_ratio <= 0.0) return split;
    PairFilter filter;
    if (cfg.split.cross_community_only) {
      filter = [community = stream.community](NodeId u, NodeId v) {
        return community[static_cast<size_t>(u)] != community[static_cast<size_t>(v)];
      };
    }
    return inject_edge_anomalies(split, cfg.split.injection_ratio, cfg.split.injection_seed, filter);
  }
  const TemporalGraph g = load_dataset(cfg.dataset, stats);
  DatasetSplit split = chronological_split(g, cfg.split.train_frac);
  if (cfg.model.task == EventKind::Edge && cfg.split.injection_ratio > 0.0) {
    return inject_edge_anomalies(split, cfg.split.injection_ratio, cfg.split.injection_seed);
  }
  return split;
}

}  // namespace dgad
