#include "dicausal/adam.hpp"

#include <cmath>

#include "dicausal/errors.hpp"

namespace dicausal {

void adam_step(std::span<Parameter> params, std::span<const Tensor> grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: " + std::to_string(params.size()) + " parameters but " +
                         std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (grads[p].shape() != params[p].value.shape()) {
      throw DimensionError("adam: gradient for '" + params[p].name + "' has shape " +
                           shape_to_string(grads[p].shape()) + ", parameter has " +
                           shape_to_string(params[p].value.shape()));
    }
    if (!grads[p].all_finite()) {
      throw OptimizerError(params[p].name, "adam: non-finite gradient for parameter '" + params[p].name + "'");
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value.shape());
      state.second_moment.emplace_back(p.value.shape());
    }
  } else if (state.first_moment.size() != params.size()) {
    throw DimensionError("adam: state tracks " + std::to_string(state.first_moment.size()) +
                         " parameters, update has " + std::to_string(params.size()));
  }

  const AdamConfig& c = state.config;
  const std::uint64_t t = state.step + 1;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params[p].value;
    Tensor& m = state.first_moment[p];
    Tensor& v = state.second_moment[p];
    const Tensor& g = grads[p];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
  state.step = t;
}

}  // namespace dicausal
