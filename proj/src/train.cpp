#include "dgad/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dgad/error.hpp"

namespace dgad {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be a finite value >= 0");
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (negative_ratio < 1) throw ConfigError("train.negative_ratio must be >= 1");
  if ((alpha != 0.0 && alpha != 1.0) || (beta != 0.0 && beta != 1.0)) {
    throw ConfigError("train.alpha and train.beta are 0/1 indicators");
  }
  if (alpha + beta < 1.0) throw ConfigError("train.alpha + train.beta must be >= 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},       {"epochs", c.epochs}, {"batch_size", c.batch_size}, {"seed", c.seed},
          {"alpha", c.alpha}, {"beta", c.beta},     {"negative_ratio", c.negative_ratio}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.negative_ratio = j.value("negative_ratio", c.negative_ratio);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("train: ") + ex.what());
  }
  c.validate();
  return c;
}

std::vector<TemporalEdge> negative_sample(std::span<const TemporalEdge> batch, const TemporalGraph& g,
                                          int ratio, std::uint64_t seed) {
  if (ratio < 1) throw ConfigError("negative ratio must be >= 1");
  if (g.num_nodes() < 2 || g.is_complete()) {
    throw DataError("cannot corrupt edges of a complete graph");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, g.num_nodes() - 1);
  std::bernoulli_distribution coin(0.5);
  const int max_attempts = std::max(64, 8 * g.num_nodes());

  std::vector<TemporalEdge> out;
  out.reserve(batch.size() * static_cast<size_t>(ratio));
  for (const auto& e : batch) {
    for (int r = 0; r < ratio; ++r) {
      bool done = false;
      // try both orientations before giving up on this edge
      const bool first_src = coin(rng);
      for (int side = 0; side < 2 && !done; ++side) {
        const bool replace_src = (side == 0) == first_src;
        const NodeId keep = replace_src ? e.dst : e.src;
        auto accept = [&](NodeId w) {
          TemporalEdge neg = e;
          (replace_src ? neg.src : neg.dst) = w;
          neg.label = 1;
          out.push_back(std::move(neg));
          done = true;
        };
        for (int a = 0; a < max_attempts && !done; ++a) {
          const NodeId w = pick(rng);
          if (w != keep && !g.has_pair(keep, w)) accept(w);
        }
        if (done) break;
        // dense neighbourhood: enumerate what is left
        std::vector<NodeId> free;
        for (NodeId w = 0; w < g.num_nodes(); ++w) {
          if (w != keep && !g.has_pair(keep, w)) free.push_back(w);
        }
        if (!free.empty()) {
          accept(free[std::uniform_int_distribution<size_t>(0, free.size() - 1)(rng)]);
        }
      }
      if (!done) {
        throw DataError("rejection sampling exhausted while corrupting edge " + std::to_string(e.id));
      }
    }
  }
  return out;
}

std::vector<NodeObservation> negative_observations(std::span<const NodeObservation> batch,
                                                   const TemporalGraph& g, int ratio, std::uint64_t seed) {
  if (ratio < 1) throw ConfigError("negative ratio must be >= 1");
  if (g.num_nodes() < 2) throw DataError("need at least two nodes to corrupt readings");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, g.num_nodes() - 2);
  std::vector<NodeObservation> out;
  for (const auto& o : batch) {
    for (int r = 0; r < ratio; ++r) {
      NodeId other = pick(rng);
      if (other >= o.node) ++other;
      NodeObservation neg = o;
      auto f = g.node_feature_at(other, o.t);
      neg.feat.assign(f.begin(), f.end());
      neg.label = 1;
      out.push_back(std::move(neg));
    }
  }
  return out;
}

double bce_sum(std::span<const double> scores, std::span<const double> labels, double eps) {
  if (scores.size() != labels.size()) throw std::invalid_argument("bce: scores and labels differ in length");
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double f = std::clamp(scores[i], eps, 1.0 - eps);
    total -= labels[i] * std::log(f) + (1.0 - labels[i]) * std::log(1.0 - f);
  }
  return total;
}

double objective(std::span<const double> node_scores, std::span<const double> node_labels,
                 std::span<const double> edge_scores, std::span<const double> edge_labels, double alpha,
                 double beta) {
  double total = 0.0;
  if (alpha != 0.0) total += alpha * bce_sum(node_scores, node_labels);
  if (beta != 0.0) total += beta * bce_sum(edge_scores, edge_labels);
  return total;
}

void Adam::step(const std::vector<ad::Parameter*>& params) {
  if (m_.empty()) {
    for (const auto* p : params) {
      names_.push_back(p->name);
      m_.push_back(ad::Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(ad::Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw std::logic_error("optimizer state does not match parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

nlohmann::json Adam::state_json() const {
  nlohmann::json j;
  j["lr"] = lr_;
  j["beta1"] = beta1_;
  j["beta2"] = beta2_;
  j["eps"] = eps_;
  j["step"] = t_;
  auto moments = nlohmann::json::object();
  for (size_t i = 0; i < names_.size(); ++i) {
    auto flat = [](const ad::Matrix& m) {
      std::vector<double> v;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
      }
      return v;
    };
    moments[names_[i]] = {{"shape", {m_[i].rows(), m_[i].cols()}}, {"m", flat(m_[i])}, {"v", flat(v_[i])}};
  }
  j["moments"] = std::move(moments);
  return j;
}

void Adam::load_state(const nlohmann::json& j) {
  lr_ = j.at("lr").get<double>();
  beta1_ = j.at("beta1").get<double>();
  beta2_ = j.at("beta2").get<double>();
  eps_ = j.at("eps").get<double>();
  t_ = j.at("step").get<long>();
  names_.clear();
  m_.clear();
  v_.clear();
  for (const auto& [name, entry] : j.at("moments").items()) {
    const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
    const auto m = entry.at("m").get<std::vector<double>>();
    const auto v = entry.at("v").get<std::vector<double>>();
    ad::Matrix mm(shape[0], shape[1]), vv(shape[0], shape[1]);
    size_t k = 0;
    for (Eigen::Index r = 0; r < shape[0]; ++r) {
      for (Eigen::Index c = 0; c < shape[1]; ++c, ++k) {
        mm(r, c) = m[k];
        vv(r, c) = v[k];
      }
    }
    names_.push_back(name);
    m_.push_back(std::move(mm));
    v_.push_back(std::move(vv));
  }
}

nlohmann::json to_json(const EpochLog& log) {
  return {{"epoch", log.epoch}, {"mean_loss", log.mean_loss}, {"wall_ms", log.wall_ms}};
}

namespace {

struct TrainingEvent {
  EgoCenter center;
  double label = 0.0;
};

std::string norms_report(const std::vector<ad::Parameter*>& params) {
  std::ostringstream out;
  for (const auto* p : params) out << "\n  " << p->name << ": |w|=" << p->value.norm() << " |g|=" << p->grad.norm();
  return out.str();
}

}  // namespace

TrainResult train(Model& model, const DatasetSplit& split, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const TemporalGraph& g = split.train;
  const bool edge_task = model.config().task == EventKind::Edge;
  const size_t positives = edge_task ? static_cast<size_t>(g.num_edges()) : g.observations().size();
  if (positives == 0) throw DataError("training graph has no events of the task kind");
  const double weight = edge_task ? cfg.beta : cfg.alpha;

  TrainResult result;
  result.optimizer = Adam(cfg.lr);
  auto params = model.parameters();
  std::vector<size_t> order(positives);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    const std::uint64_t epoch_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
    double epoch_loss = 0.0;
    size_t epoch_events = 0;

    for (size_t b0 = 0, batch = 0; b0 < positives; b0 += static_cast<size_t>(cfg.batch_size), ++batch) {
      const size_t b1 = std::min(positives, b0 + static_cast<size_t>(cfg.batch_size));
      const std::uint64_t batch_seed = mix_seed(epoch_seed, batch);
      std::vector<TrainingEvent> events;
      if (edge_task) {
        std::vector<TemporalEdge> pos;
        for (size_t i = b0; i < b1; ++i) pos.push_back(g.edge(static_cast<EdgeId>(order[i])));
        auto neg = negative_sample(pos, g, cfg.negative_ratio, batch_seed);
        for (const auto& e : pos) events.push_back({center_of(g, g.edge_event(e.id)), 0.0});
        for (const auto& e : neg) {
          if (g.has_pair(e.src, e.dst)) throw std::logic_error("negative sample collides with an existing edge");
          auto probe = probe_edge(e.src, e.dst, e.t, e.feat);
          probe.hidden = e.id;  // the positive this negative was corrupted from
          events.push_back({std::move(probe), 1.0});
        }
      } else {
        std::vector<NodeObservation> pos;
        for (size_t i = b0; i < b1; ++i) pos.push_back(g.observations()[order[i]]);
        auto neg = negative_observations(pos, g, cfg.negative_ratio, batch_seed);
        for (const auto& o : pos) events.push_back({EgoCenter{EventKind::Node, o.node, -1, -1, o.t, o.feat}, 0.0});
        for (const auto& o : neg) events.push_back({EgoCenter{EventKind::Node, o.node, -1, -1, o.t, o.feat}, 1.0});
      }

      model.zero_grad();
      double batch_loss = 0.0;
      for (const auto& ev : events) {
        auto seq = model.make_sequence(g, ev.center, epoch_seed);
        ad::Tape tape;
        ad::Var loss = scale(bce(model.forward(tape, seq), ev.label, kBceClamp), weight);
        if (weight != 0.0) tape.backward(loss);
        batch_loss += loss.scalar();
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch) + norms_report(params));
      }
      epoch_loss += batch_loss;
      epoch_events += events.size();
      result.optimizer.step(params);
    }

    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = epoch_loss / static_cast<double>(epoch_events);
    log.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

GradCheckReport grad_check(const std::vector<ad::Parameter*>& params,
                           const std::function<ad::Var(ad::Tape&)>& loss, double eps, int per_tensor,
                           std::uint64_t seed, double floor) {
  if (!(eps > 0.0)) throw ConfigError("grad_check: eps must be > 0");
  for (auto* p : params) p->zero_grad();
  {
    ad::Tape tape;
    tape.backward(loss(tape));
  }
  auto eval = [&] {
    ad::Tape tape;
    return loss(tape).scalar();
  };

  GradCheckReport report;
  std::mt19937_64 rng(seed);
  for (auto* p : params) {
    const auto size = static_cast<size_t>(p->value.size());
    std::vector<size_t> entries(size);
    std::iota(entries.begin(), entries.end(), size_t{0});
    if (size > static_cast<size_t>(per_tensor)) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(static_cast<size_t>(per_tensor));
    }
    for (size_t idx : entries) {
      double& w = p->value.data()[idx];
      const double saved = w;
      w = saved + eps;
      const double up = eval();
      w = saved - eps;
      const double down = eval();
      w = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p->grad.data()[idx];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), floor});
      ++report.entries_checked;
      if (rel > report.max_rel_error || report.worst_param.empty()) {
        report.max_rel_error = rel;
        report.worst_param = p->name + "[" + std::to_string(idx) + "]";
      }
    }
  }
  return report;
}

GradCheckReport grad_check(Model& model, const std::vector<std::pair<EgoGraphSequence, double>>& sample,
                           double eps, int per_tensor, std::uint64_t seed) {
  return grad_check(
      model.parameters(),
      [&](ad::Tape& tape) {
        ad::Var total;
        for (const auto& [seq, label] : sample) {
          ad::Var l = bce(model.forward(tape, seq), label);
          total = total.valid() ? add(total, l) : l;
        }
        return total;
      },
      eps, per_tensor, seed);
}

}  // namespace dgad
