#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dgad/ctdg.hpp"
#include "dgad/model.hpp"

namespace dgad {

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 50;
  int batch_size = 64;
  std::uint64_t seed = 1;
  double alpha = 0.0;  // node-level terms on/off
  double beta = 1.0;   // edge-level terms on/off
  int negative_ratio = 1;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

// One corrupted copy per (edge, ratio): an endpoint is swapped for a uniform
// node so that the pair does not occur anywhere in g. Labels are 1.
std::vector<TemporalEdge> negative_sample(std::span<const TemporalEdge> batch, const TemporalGraph& g,
                                          int ratio, std::uint64_t seed);

// Pseudo-anomalous node readings: the reading of another node at the same
// time is substituted for the center's own.
std::vector<NodeObservation> negative_observations(std::span<const NodeObservation> batch,
                                                   const TemporalGraph& g, int ratio,
                                                   std::uint64_t seed);

inline constexpr double kBceClamp = 1e-7;

// -sum[y log f + (1-y) log(1-f)] with f clamped to [eps, 1-eps].
double bce_sum(std::span<const double> scores, std::span<const double> labels, double eps = kBceClamp);

// alpha * BCE(node terms) + beta * BCE(edge terms).
double objective(std::span<const double> node_scores, std::span<const double> node_labels,
                 std::span<const double> edge_scores, std::span<const double> edge_labels,
                 double alpha, double beta);

class Adam {
 public:
  Adam() = default;
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<ad::Parameter*>& params);
  long steps() const { return t_; }

  nlohmann::json state_json() const;
  void load_state(const nlohmann::json& j);

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<std::string> names_;
  std::vector<ad::Matrix> m_, v_;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double wall_ms = 0.0;
};

nlohmann::json to_json(const EpochLog& log);

struct TrainResult {
  std::vector<EpochLog> epochs;
  Adam optimizer;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Unsupervised training on the (all-normal) train graph against sampled
// pseudo-anomalies.
TrainResult train(Model& model, const DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int entries_checked = 0;
};

// Central differences (f(x+eps) - f(x-eps)) / 2eps on up to `per_tensor`
// entries of each parameter, compared with the tape gradient. Relative error
// is |a-n| / max(|a|, |n|, floor).
GradCheckReport grad_check(const std::vector<ad::Parameter*>& params,
                           const std::function<ad::Var(ad::Tape&)>& loss, double eps,
                           int per_tensor = 16, std::uint64_t seed = 0, double floor = 1e-6);

GradCheckReport grad_check(Model& model, const std::vector<std::pair<EgoGraphSequence, double>>& sample,
                           double eps, int per_tensor = 16, std::uint64_t seed = 0);

}  // namespace dgad
