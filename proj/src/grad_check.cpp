#include "dicausal/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "dicausal/errors.hpp"

namespace dicausal {

GradCheckResult grad_check(const LossFunction& loss, std::vector<Parameter> params, double eps) {
  std::vector<Tensor> analytic;
  loss(params, &analytic);
  if (analytic.size() != params.size()) throw DimensionError("grad_check: gradient count mismatch");

  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params[p].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double up = loss(params, nullptr);
      value[i] = saved - eps;
      const double down = loss(params, nullptr);
      value[i] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[p][i];
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      if (result.worst_parameter.empty() || err > result.max_relative_error) {
        result = {err, params[p].name, i, a, numeric};
      }
    }
  }
  return result;
}

}  // namespace dicausal
