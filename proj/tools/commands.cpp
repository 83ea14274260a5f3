#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dgad/config.hpp"
#include "dgad/error.hpp"
#include "dgad/evaluate.hpp"
#include "dgad/model.hpp"
#include "dgad/sampler.hpp"
#include "dgad/train.hpp"

namespace dgad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files are written under a temporary name and renamed into place. Unless
// commit() is called, everything written so far is deleted again.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}
  Artifacts(const Artifacts&) = delete;
  Artifacts& operator=(const Artifacts&) = delete;

  ~Artifacts() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path final_path = path(name);
    const fs::path tmp = final_path.string() + ".partial";
    written_.push_back(tmp);
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw DataError("cannot write " + tmp.string());
      out << content;
      if (!out) throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, final_path);
    written_.back() = final_path;
  }

  void commit() {
    committed_ = true;
    for (const auto& p : written_) std::cout << p.string() << '\n';
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

ExperimentConfig load_config(const Options& opts) {
  ExperimentConfig cfg = load_experiment_config(opts.config);
  if (opts.out) cfg.output_dir = opts.out->string();
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.train.seed = *opts.seed;
  }
  return cfg;
}

void report_load(const LoadStats& stats) {
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
  if (stats.self_loops_dropped > 0) std::cerr << "dropped " << stats.self_loops_dropped << " self-loops\n";
}

json split_json(const DatasetSplit& s, const std::string& hash) {
  return {{"version", 1},
          {"config_hash", hash},
          {"injection_ratio", s.injection_ratio},
          {"seed", s.seed},
          {"train", to_json(s.train)},
          {"test", to_json(s.test)}};
}

std::vector<EgoGraphSequence> sample_sequences(const Model& model, const DatasetSplit& split, int limit,
                                               std::uint64_t seed) {
  const TemporalGraph history = history_graph(split);
  std::vector<EgoGraphSequence> out;
  if (model.config().task == EventKind::Edge) {
    const EdgeId offset = split.train.num_edges();
    for (const auto& e : split.test.edges()) {
      if (static_cast<int>(out.size()) >= limit) break;
      out.push_back(model.make_sequence(history, center_of(history, history.edge_event(offset + e.id)), seed));
    }
  } else {
    for (const auto& o : split.test.observations()) {
      if (static_cast<int>(out.size()) >= limit) break;
      out.push_back(model.make_sequence(history, EgoCenter{EventKind::Node, o.node, -1, -1, o.t, o.feat}, seed));
    }
  }
  return out;
}

struct Trained {
  Model model;
  TrainResult result;
};

Trained fit(const ExperimentConfig& cfg, const DatasetSplit& split, const EpochCallback& on_epoch) {
  Model model(cfg.model, split.train.node_dim(), split.train.edge_dim(), cfg.seed);
  TrainResult result = train(model, split, cfg.train, on_epoch);
  return {std::move(model), std::move(result)};
}

int cmd_ingest(const ExperimentConfig& cfg, const std::string& hash) {
  LoadStats stats;
  const TemporalGraph g = load_dataset(cfg.dataset, &stats);
  report_load(stats);
  Artifacts out(cfg.output_dir);
  out.write("graph-" + hash + ".json", canonical_serialization(g));
  out.commit();
  return kOk;
}

int cmd_inject(const ExperimentConfig& cfg, const std::string& hash) {
  LoadStats stats;
  const DatasetSplit split = prepare_split(cfg, &stats);
  report_load(stats);
  Artifacts out(cfg.output_dir);
  out.write("split-" + hash + ".json", split_json(split, hash).dump());
  out.commit();
  return kOk;
}

int cmd_sample(const ExperimentConfig& cfg, const std::string& hash, int limit) {
  const DatasetSplit split = prepare_split(cfg);
  const Model model(cfg.model, split.train.node_dim(), split.train.edge_dim(), cfg.seed);
  std::ostringstream lines;
  for (const auto& seq : sample_sequences(model, split, limit, cfg.seed)) {
    json j = to_json(seq);
    j["config_hash"] = hash;
    lines << j.dump() << '\n';
  }
  Artifacts out(cfg.output_dir);
  out.write("sequences-" + hash + ".jsonl", lines.str());
  out.commit();
  return kOk;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& hash) {
  const DatasetSplit split = prepare_split(cfg);
  std::ostringstream log;
  auto trained = fit(cfg, split, [&](const EpochLog& e) {
    json j = to_json(e);
    j["config_hash"] = hash;
    log << j.dump() << '\n';
    std::cerr << "epoch " << e.epoch << " loss " << e.mean_loss << " (" << e.wall_ms << " ms)\n";
  });
  const json checkpoint = {{"version", 1},
                           {"config_hash", hash},
                           {"config", to_json(cfg)},
                           {"model", model_to_json(trained.model)},
                           {"optimizer", trained.result.optimizer.state_json()}};
  Artifacts out(cfg.output_dir);
  out.write("train-" + hash + ".jsonl", log.str());
  out.write("checkpoint-" + hash + ".json", checkpoint.dump());
  out.commit();
  return kOk;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& hash, const std::optional<fs::path>& explicit_ckpt) {
  const fs::path ckpt_path = explicit_ckpt.value_or(fs::path(cfg.output_dir) / ("checkpoint-" + hash + ".json"));
  std::ifstream in(ckpt_path);
  if (!in) throw DataError("checkpoint not found: " + ckpt_path.string());
  json ckpt;
  try {
    ckpt = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + ex.what());
  }
  if (ckpt.value("version", 0) != 1) throw DataError("unsupported checkpoint version");
  if (ckpt.value("config_hash", std::string()) != hash) {
    std::cerr << "warning: checkpoint was trained with config " << ckpt.value("config_hash", std::string("?"))
              << ", evaluating under " << hash << '\n';
  }
  Model model = model_from_json(ckpt.at("model"));
  if (model.config() != cfg.model) throw ConfigError("model: checkpoint architecture differs from the config");

  const DatasetSplit split = prepare_split(cfg);
  EvalReport report = evaluate(model, split, cfg.seed);
  report.config_hash = hash;
  Artifacts out(cfg.output_dir);
  out.write("report-" + hash + ".json", to_json(report).dump(2));
  out.write("scores-" + hash + ".csv", scores_csv(report));
  out.commit();
  std::cerr << "auc " << report.auc << " ap " << report.ap << " f1 " << report.f1 << '\n';
  return kOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& hash, int threads) {
  const DatasetSplit split = prepare_split(cfg);
  struct Cell {
    int k, depth;
    EvalReport report;
    std::exception_ptr error;
  };
  std::vector<Cell> cells;
  for (int depth = 1; depth <= 3; ++depth) {
    for (int k = 1; k <= 3; ++k) cells.push_back({k, depth, {}, nullptr});
  }

  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      try {
        ExperimentConfig c = cfg;
        c.model.k = cell.k;
        c.model.gnn_layers = cell.depth;
        auto trained = fit(c, split, {});
        cell.report = evaluate(trained.model, split, c.seed);
        cell.report.config_hash = hash;
        std::lock_guard lock(log_mutex);
        std::cerr << "k=" << cell.k << " depth=" << cell.depth << " auc " << cell.report.auc << '\n';
      } catch (...) {
        cell.error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& cell : cells) {
    if (cell.error) std::rethrow_exception(cell.error);
  }

  Artifacts out(cfg.output_dir);
  json grid = json::array();
  for (const auto& cell : cells) {
    const std::string name =
        "report-" + hash + "-k" + std::to_string(cell.k) + "-depth" + std::to_string(cell.depth) + ".json";
    out.write(name, to_json(cell.report).dump(2));
    grid.push_back({{"k", cell.k}, {"gnn_layers", cell.depth}, {"auc", cell.report.auc},
                    {"ap", cell.report.ap}, {"f1", cell.report.f1}, {"report", name}});
  }
  out.write("sweep-" + hash + ".json", json{{"config_hash", hash}, {"cells", grid}}.dump(2));
  out.commit();
  return kOk;
}

}  // namespace

int run(const Options& opts) {
  try {
    const ExperimentConfig cfg = load_config(opts);
    const std::string hash = config_hash(cfg);
    if (opts.command == "ingest") return cmd_ingest(cfg, hash);
    if (opts.command == "inject") return cmd_inject(cfg, hash);
    if (opts.command == "sample") return cmd_sample(cfg, hash, opts.limit);
    if (opts.command == "train") return cmd_train(cfg, hash);
    if (opts.command == "eval") return cmd_eval(cfg, hash, opts.checkpoint);
    if (opts.command == "sweep") return cmd_sweep(cfg, hash, opts.threads);
    std::cerr << "error: unknown command " << opts.command << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace dgad::cli
