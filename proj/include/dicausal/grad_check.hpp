#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dicausal/adam.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

// Evaluates the loss at `params`. When `grads` is non-null it must also fill
// one analytic gradient per parameter.
using LossFunction = std::function<double(const std::vector<Parameter>& params, std::vector<Tensor>* grads)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences on every coordinate; per-coordinate error is
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
GradCheckResult grad_check(const LossFunction& loss, std::vector<Parameter> params, double eps = 1e-3);

}  // namespace dicausal
