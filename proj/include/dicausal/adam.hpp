#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dicausal/tensor.hpp"

namespace dicausal {

struct Parameter {
  std::string name;
  Tensor value;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators are created lazily on the first step so a fresh state
// can be paired with any parameter list.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

// One bias-corrected Adam update. All gradients are validated before any
// parameter is touched; a non-finite gradient throws OptimizerError naming
// the parameter and leaves params and state unchanged.
void adam_step(std::span<Parameter> params, std::span<const Tensor> grads, AdamState& state);

}  // namespace dicausal
