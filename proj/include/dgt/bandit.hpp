#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dgt/backprop.hpp"
#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/losses.hpp"
#include "dgt/metrics.hpp"
#include "dgt/optimizer.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

// Black-box loss for the current round. For classification the prediction is
// the pulled arm. The learner never sees labels or the loss formula.
class LossOracle {
 public:
  virtual ~LossOracle() = default;
  virtual double evaluate(double prediction) = 0;
};

// Adapts a callable to LossOracle.
class FunctionOracle : public LossOracle {
 public:
  explicit FunctionOracle(std::function<double(double)> fn) : fn_(std::move(fn)) {}
  double evaluate(double prediction) override { return fn_(prediction); }

 private:
  std::function<double(double)> fn_;
};

// Enforces a per-round query budget and counts every query.
class QueryAudit {
 public:
  explicit QueryAudit(LossOracle& oracle) : oracle_(oracle) {}

  void begin_round(int budget) {
    budget_ = budget;
    used_ = 0;
  }

  double query(double prediction) {
    if (used_ >= budget_) {
      throw OracleError("oracle queried " + std::to_string(used_ + 1) + " times in a round with budget " +
                        std::to_string(budget_));
    }
    ++used_;
    ++total_;
    const double loss = oracle_.evaluate(prediction);
    if (!std::isfinite(loss)) throw OracleError("oracle returned a non-finite loss");
    return loss;
  }

  std::size_t total() const { return total_; }

 private:
  LossOracle& oracle_;
  int budget_ = 0;
  int used_ = 0;
  std::size_t total_ = 0;
};

struct PointEstimate {
  double grad = 0.0;
  double loss = 0.0;  // loss observed at the deployed prediction(s)
};

// One query at y_hat + delta u: grad = loss(y_hat + delta u) u / delta.
inline PointEstimate estimate_grad_one_point(QueryAudit& oracle, double y_hat, double delta, int u) {
  if (!(delta > 0.0)) throw ConfigError("perturbation delta must be > 0");
  if (u != 1 && u != -1) throw PreconditionError("perturbation direction must be +1 or -1");
  const double loss = oracle.query(y_hat + delta * u);
  return {loss * u / delta, loss};
}

template <class Rng>
PointEstimate estimate_grad_one_point(QueryAudit& oracle, double y_hat, double delta, Rng& rng) {
  const int u = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return estimate_grad_one_point(oracle, y_hat, delta, u);
}

// Central difference from two queries; the recorded loss is their mean.
inline PointEstimate estimate_grad_two_point(QueryAudit& oracle, double y_hat, double delta) {
  if (!(delta > 0.0)) throw ConfigError("perturbation delta must be > 0");
  const double up = oracle.query(y_hat + delta);
  const double down = oracle.query(y_hat - delta);
  return {(up - down) / (2.0 * delta), 0.5 * (up + down)};
}

// p(k) = (1 - delta) 1[k = argmax] + delta / K, argmax ties to lowest index.
inline Vector exploration_probs(const VectorRef& leaf_scores, double delta_explore) {
  const auto k = leaf_scores.size();
  if (k < 2) throw PreconditionError("arm sampling needs K >= 2");
  if (!(delta_explore > 0.0 && delta_explore <= 1.0)) throw ConfigError("exploration probability must be in (0, 1]");
  Vector p = Vector::Constant(k, delta_explore / static_cast<double>(k));
  p(argmax(leaf_scores)) += 1.0 - delta_explore;
  return p;
}

struct ArmDraw {
  int arm = 0;
  Vector probs;
};

template <class Rng>
ArmDraw sample_arm(const VectorRef& leaf_scores, double delta_explore, Rng& rng) {
  ArmDraw draw;
  draw.probs = exploration_probs(leaf_scores, delta_explore);
  std::discrete_distribution<int> dist(draw.probs.data(), draw.probs.data() + draw.probs.size());
  draw.arm = dist(rng);
  return draw;
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Importance-weighted loss derivative at the leaf scores:
// 2 p(arm)^-1 (loss - (1 - s)) s (1 - s) e_arm, s = sigmoid(score[arm]).
// The formula is implemented as given; losses are expected in [0, 1].
inline Vector estimate_grad_classification(double loss_value, int arm, const VectorRef& probs,
                                           const VectorRef& leaf_scores) {
  if (arm < 0 || arm >= probs.size() || probs.size() != leaf_scores.size()) {
    throw PreconditionError("arm index out of range");
  }
  const double p = probs(arm);
  if (!(p > 0.0)) throw PreconditionError("pulled arm has zero probability; cannot importance-weight");
  const double s = sigmoid(leaf_scores(arm));
  Vector g = Vector::Zero(leaf_scores.size());
  g(arm) = 2.0 / p * (loss_value - (1.0 - s)) * s * (1.0 - s);
  return g;
}

enum class Estimator { kOnePoint, kTwoPoint, kClassification };

inline const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kOnePoint: return "one_point";
    case Estimator::kTwoPoint: return "two_point";
    case Estimator::kClassification: return "classification";
  }
  return "?";
}

struct BanditConfig {
  Estimator estimator = Estimator::kOnePoint;
  double delta_explore = 0.3;
  double delta_perturb = 0.5;
  // Optional decay hook: perturbation used at a round given the base value.
  std::function<double(std::size_t round, double base)> perturb_schedule;
  double lr = 1e-3;
  double l1 = 0.0;
  double l2 = 0.0;
  bool regularize_leaves = false;
  int accumulate = 4;
  OptimizerConfig optimizer{0.0, 0.99, 1e-8, ClipMode::kNone, 0.0};
  std::size_t snapshot_every = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(delta_explore > 0.0 && delta_explore <= 1.0)) throw ConfigError("delta_explore must be in (0, 1]");
    if (!(delta_perturb > 0.0)) throw ConfigError("delta_perturb must be > 0");
    if (accumulate < 1) throw ConfigError("accumulation window must be >= 1");
    if (!(lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (l1 < 0.0 || l2 < 0.0) throw ConfigError("regularization weights must be >= 0");
    if (!(optimizer.rho >= 0.0 && optimizer.rho < 1.0)) throw ConfigError("rho must be in [0, 1)");
    if (snapshot_every < 1) throw ConfigError("snapshot interval must be >= 1");
  }

  int queries_per_round() const { return estimator == Estimator::kTwoPoint ? 2 : 1; }
};

struct Snapshot {
  std::size_t round = 0;
  std::size_t queries = 0;
  double metric = 0.0;
};

struct RegretTrace {
  std::vector<double> cumulative_loss;  // after each round
  std::vector<Snapshot> snapshots;
  std::size_t queries = 0;

  std::size_t rounds() const { return cumulative_loss.size(); }
};

struct BanditResult {
  TreeParams params;
  RegretTrace trace;
};

// Source of unlabeled examples, one per round.
class FeatureStream {
 public:
  virtual ~FeatureStream() = default;
  virtual std::optional<Vector> next() = 0;
};

// Online training from loss feedback only. Each round: hard forward, deploy a
// prediction, estimate the loss derivative at the leaf output from the
// oracle, and push it through the dense backward pass. Updates are applied
// every `accumulate` rounds with the averaged gradient.
inline BanditResult train_bandit(FeatureStream& stream, LossOracle& oracle, const BanditConfig& cfg, TreeParams init,
                                 const PathTables& tables,
                                 const std::function<double(const TreeParams&)>& evaluate = {}) {
  cfg.validate();
  init.validate();
  check_tables(init, tables);
  const bool classification = cfg.estimator == Estimator::kClassification;
  if (classification && init.num_outputs < 2) throw ConfigError("classification estimator needs K >= 2 outputs");
  if (!classification && init.num_outputs != 1) throw ConfigError("regression estimators need a scalar-output tree");

  BanditResult result{std::move(init), {}};
  TreeParams& params = result.params;
  RegretTrace& trace = result.trace;
  std::mt19937_64 rng(cfg.seed);
  QueryAudit audit(oracle);
  OptimizerState state = OptimizerState::for_params(params);
  GradientSet acc = GradientSet::zeros_like(params);
  int pending = 0;
  double cumulative = 0.0;

  auto apply_update = [&]() {
    acc *= 1.0 / pending;
    if (cfg.l1 > 0.0 || cfg.l2 > 0.0) acc += regularizer_grad(params, cfg.l1, cfg.l2, cfg.regularize_leaves);
    optimizer_step(state, params, acc, cfg.lr, cfg.optimizer);
    acc.set_zero();
    pending = 0;
  };
  auto snapshot = [&](std::size_t round) {
    if (evaluate) trace.snapshots.push_back({round, audit.total(), evaluate(params)});
  };

  snapshot(0);
  std::size_t round = 0;
  while (auto x = stream.next()) {
    ++round;
    audit.begin_round(cfg.queries_per_round());
    const HardPrediction pred = forward_hard(*x, params, tables);
    Vector out_grad;
    double loss = 0.0;
    if (classification) {
      const ArmDraw draw = sample_arm(pred.value, cfg.delta_explore, rng);
      loss = audit.query(draw.arm);
      out_grad = estimate_grad_classification(loss, draw.arm, draw.probs, pred.value);
    } else {
      const double delta = cfg.perturb_schedule ? cfg.perturb_schedule(round, cfg.delta_perturb) : cfg.delta_perturb;
      const PointEstimate est = cfg.estimator == Estimator::kOnePoint
                                    ? estimate_grad_one_point(audit, pred.value(0), delta, rng)
                                    : estimate_grad_two_point(audit, pred.value(0), delta);
      loss = est.loss;
      out_grad = Vector::Constant(1, est.grad);
    }
    cumulative += loss;
    trace.cumulative_loss.push_back(cumulative);
    acc += backprop(*x, params, tables, out_grad);
    if (++pending == cfg.accumulate) apply_update();
    if (round % cfg.snapshot_every == 0) snapshot(round);
  }
  if (pending > 0) apply_update();
  if (round % cfg.snapshot_every != 0) snapshot(round);
  trace.queries = audit.total();
  return result;
}

// Simulation loss shapes available to the harness.
struct OracleLoss {
  enum class Kind { kSquared, kHuber, kZeroOne } kind = Kind::kSquared;
  double xi = 1.0;

  double operator()(double prediction, double label) const {
    switch (kind) {
      case Kind::kSquared: return squared_loss(prediction, label);
      case Kind::kHuber: return huber_loss(prediction, label, xi);
      case Kind::kZeroOne: return zero_one_loss(static_cast<int>(prediction), static_cast<int>(label));
    }
    return 0.0;
  }
};

// Replays a labelled dataset as a bandit stream: examples in shuffled order,
// reshuffled on every pass, for a fixed number of rounds. The oracle side is
// bound to the label of the example most recently handed out.
class DatasetSimulation : public FeatureStream, public LossOracle {
 public:
  DatasetSimulation(const Dataset& data, OracleLoss loss, std::size_t rounds, std::uint64_t seed)
      : data_(data), loss_(loss), rounds_(rounds), rng_(seed), order_(data.size()) {
    if (data.size() == 0 || !data.has_labels()) throw PreconditionError("simulation needs labelled data");
    const bool zero_one = loss.kind == OracleLoss::Kind::kZeroOne;
    if (zero_one != (data.task == Task::kClassification)) {
      throw ConfigError("oracle loss does not match the dataset task");
    }
    std::iota(order_.begin(), order_.end(), 0);
    cursor_ = order_.size();
  }

  std::optional<Vector> next() override {
    if (served_ == rounds_) return std::nullopt;
    if (cursor_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
    }
    current_ = order_[cursor_++];
    ++served_;
    return data_.x(current_);
  }

  double evaluate(double prediction) override {
    if (served_ == 0) throw OracleError("oracle queried before any example was served");
    return loss_(prediction, data_.labels[current_]);
  }

 private:
  const Dataset& data_;
  OracleLoss loss_;
  std::size_t rounds_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t current_ = 0;
  std::size_t served_ = 0;
};

}  // namespace dgt
