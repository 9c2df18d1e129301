#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dgt/batch_train.hpp"
#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/metrics.hpp"
#include "dgt/tree.hpp"

namespace dgt {

// Bagged ensemble of collapsed trees. Regression averages member outputs;
// classification takes a plurality vote over member argmax classes.
struct ForestModel {
  Task task = Task::kRegression;
  int num_classes = 0;
  std::vector<ObliqueTree> members;
  std::vector<std::uint64_t> member_seeds;
  double sample_fraction = 1.0;

  int input_dim() const { return members.empty() ? 0 : members.front().input_dim; }

  void validate() const {
    if (members.empty()) throw PreconditionError("forest has no members");
    for (const ObliqueTree& m : members) {
      if (m.input_dim != members.front().input_dim || m.num_outputs != members.front().num_outputs) {
        throw ShapeError("forest members disagree on input or output dimension");
      }
    }
  }
};

// Regression: 1-vector with the mean member output. Classification: vote
// counts per class, so argmax breaks ties toward the lowest class index.
inline Vector predict_forest(const ForestModel& model, const VectorRef& x) {
  if (model.members.empty()) throw PreconditionError("forest has no members");
  if (model.task == Task::kRegression) {
    double sum = 0.0;
    for (const ObliqueTree& m : model.members) sum += m.predict(x)(0);
    return Vector::Constant(1, sum / static_cast<double>(model.members.size()));
  }
  Vector votes = Vector::Zero(model.num_classes);
  for (const ObliqueTree& m : model.members) votes(argmax(m.predict(x))) += 1.0;
  return votes;
}

// ceil(fraction * n) rows drawn uniformly with replacement.
template <class Rng>
Dataset bootstrap_sample(const Dataset& data, double fraction, Rng& rng) {
  if (data.size() == 0) throw PreconditionError("cannot bootstrap an empty dataset");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must be in (0, 1]");
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(data.size()) - 1e-9));
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  std::vector<std::size_t> rows(count);
  for (std::size_t& r : rows) r = pick(rng);
  return data.subset(rows);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t member_seed(std::uint64_t seed, std::size_t member) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(member) + 1));
}

struct ForestTrainResult {
  ForestModel model;
  std::vector<std::vector<EpochRecord>> member_logs;
};

// Trains n_trees members on independent bootstrap samples. Each member's
// sample and initialization depend only on (seed, member index), so the
// result does not depend on the number of worker threads.
inline ForestTrainResult train_forest(const Dataset& data, int n_trees, const TrainConfig& cfg, const OverparamSpec& spec,
                                      double fraction, std::uint64_t seed, int threads = 1) {
  if (n_trees < 1) throw ConfigError("forest needs at least one tree");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must be in (0, 1]");
  cfg.validate();
  const auto count = static_cast<std::size_t>(n_trees);
  ForestTrainResult result;
  result.model.task = data.task;
  result.model.num_classes = data.num_classes;
  result.model.sample_fraction = fraction;
  result.model.members.resize(count);
  result.model.member_seeds.resize(count);
  result.member_logs.resize(count);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t failed_member = 0;
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const std::uint64_t s = member_seed(seed, i);
        std::mt19937_64 rng(s);
        const Dataset sample = bootstrap_sample(data, fraction, rng);
        TrainResult trained = train_batch(sample, cfg, spec, splitmix64(s));
        result.model.members[i] = collapse(trained.params);
        result.model.member_seeds[i] = s;
        result.member_logs[i] = std::move(trained.log);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error || i < failed_member) {
          error = std::current_exception();
          failed_member = i;
        }
      }
    }
  };
  const int workers = std::max(1, std::min(threads, n_trees));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) {
    const std::string prefix = "forest member " + std::to_string(failed_member) + ": ";
    try {
      std::rethrow_exception(error);
    } catch (const NumericError& e) {
      throw NumericError(prefix + e.what());
    } catch (const DataError& e) {
      throw DataError(prefix + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(prefix + e.what());
    } catch (const Error& e) {
      throw Error(prefix + e.what());
    }
  }
  return result;
}

}  // namespace dgt
