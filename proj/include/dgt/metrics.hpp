#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"

namespace dgt {

// Index of the largest score; ties go to the lowest index.
inline int argmax(const VectorRef& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k)
    if (scores(k) > scores(best)) best = k;
  return static_cast<int>(best);
}

enum class Units { kModel, kOriginal };

// RMSE of a scalar predictor `predict(x) -> Vector`. With Units::kOriginal the
// target normalization stored on the dataset is undone first.
template <class Predict>
double rmse(const Predict& predict, const Dataset& data, Units units = Units::kOriginal) {
  if (data.size() == 0 || !data.has_labels()) throw PreconditionError("rmse needs a labelled, non-empty dataset");
  const bool invert = units == Units::kOriginal && data.normalization.has_value();
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double yhat = predict(data.x(i))(0);
    double y = data.labels[i];
    if (invert) {
      yhat = data.normalization->inverse_target(yhat);
      y = data.normalization->inverse_target(y);
    }
    sum += (yhat - y) * (yhat - y);
  }
  return std::sqrt(sum / static_cast<double>(data.size()));
}

// Fraction of rows whose argmax score equals the label.
template <class Predict>
double accuracy(const Predict& predict, const Dataset& data) {
  if (data.size() == 0 || !data.has_labels()) throw PreconditionError("accuracy needs a labelled, non-empty dataset");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += argmax(predict(data.x(i))) == data.class_of(i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

// RMSE for regression, accuracy for classification.
template <class Predict>
double task_metric(const Predict& predict, const Dataset& data, Units units = Units::kOriginal) {
  return data.task == Task::kRegression ? rmse(predict, data, units) : accuracy(predict, data);
}

}  // namespace dgt
