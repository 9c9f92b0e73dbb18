#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "specshare/neural_detector.hpp"

namespace specshare::testing {

struct GradientCheck {
  std::size_t checked = 0;
  std::size_t kinks_skipped = 0;
  std::size_t failures = 0;
  double worst_relative_error = 0.0;
};

// Central finite differences of the mean cross-entropy (dropout disabled) against the
// analytic backpropagated gradient, parameter by parameter. A parameter whose difference
// quotient changes between step h and h/10 sits on a ReLU kink and is skipped.
inline GradientCheck finite_difference_check(NetworkModel model, const nn::Matrix& x,
                                             std::span<const int> labels, double tolerance = 1e-4,
                                             double h = 1e-5) {
  model.loss_and_gradient(x, labels);
  const std::vector<double> analytic = model.flat_gradients();
  std::vector<double> params = model.flat_parameters();

  auto loss_at = [&](std::size_t i, double value) {
    const double saved = params[i];
    params[i] = value;
    model.set_flat_parameters(params);
    const double loss = NetworkModel::cross_entropy(model.predict(x), labels);
    params[i] = saved;
    return loss;
  };

  GradientCheck result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double p = params[i];
    const double numeric = (loss_at(i, p + h) - loss_at(i, p - h)) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    double rel = std::abs(numeric - analytic[i]) / scale;
    if (rel > tolerance) {
      const double finer = (loss_at(i, p + h / 10) - loss_at(i, p - h / 10)) / (h / 5);
      const double drift = std::abs(finer - numeric) / std::max({std::abs(finer), std::abs(numeric), 1e-6});
      if (drift > 1e-3) {
        ++result.kinks_skipped;
        continue;
      }
    }
    ++result.checked;
    result.worst_relative_error = std::max(result.worst_relative_error, rel);
    if (rel > tolerance) ++result.failures;
  }
  model.set_flat_parameters(params);
  return result;
}

}  // namespace specshare::testing
