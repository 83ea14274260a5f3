#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dgad/ctdg.hpp"
#include "dgad/model.hpp"
#include "dgad/synthetic.hpp"
#include "dgad/train.hpp"

namespace dgad {

enum class DatasetFormat { EdgeStream, Multivariate, SyntheticCommunity, SyntheticSensors };

struct DatasetConfig {
  DatasetFormat format = DatasetFormat::EdgeStream;
  std::string path;
  EdgeStreamSchema edge_schema;
  SeriesSchema series_schema;
  CommunityStreamConfig community;
  SensorSeriesConfig sensors;
};

struct SplitConfig {
  double train_frac = 0.5;
  double injection_ratio = 0.1;
  std::uint64_t injection_seed = 1;
  // Synthetic community streams only: restrict injected pairs to pairs from
  // different communities.
  bool cross_community_only = false;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  ModelConfig model;
  SplitConfig split;
  TrainConfig train;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

// Unknown keys are rejected; every message names the offending field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// 16 hex digits of FNV-1a over the canonical JSON dump (output_dir excluded).
std::string config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a(std::string_view bytes);

TemporalGraph load_dataset(const DatasetConfig& cfg, LoadStats* stats = nullptr);

// Loads, splits and (for edge tasks) injects anomalies.
DatasetSplit prepare_split(const ExperimentConfig& cfg, LoadStats* stats = nullptr);

}  // namespace dgad
