#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "dicausal/model.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

using Rng = std::mt19937_64;

struct Batch {
  Tensor x;  // B x L x M
  std::vector<int> labels;
  std::vector<std::int64_t> sample_ids;

  std::size_t size() const { return labels.size(); }
};

// Donor indices into the batch for each sample.
//   intra_partner[i]: same class as i, != i unless i is alone in its class
//   inter_partner[i]: different class from i, absent if the batch is single-class
struct PerturbationPlan {
  std::vector<std::size_t> intra_partner;
  std::vector<std::optional<std::size_t>> inter_partner;
};

PerturbationPlan plan_perturbations(std::span<const int> labels, Rng& rng);

// Z_R(i) + Z_I(donor): the sample's causal part with a same-class spurious part.
Tensor perturbed_intra(const Tensor& causal, const Tensor& spurious_donor);
// Z_R(i) + Z_R(donor): another class's causal part placed in the spurious slot.
Tensor perturbed_inter(const Tensor& causal, const Tensor& causal_donor);

struct DualLossOptions {
  double lambda = 0.5;
  // Weight of an extra plain cross-entropy on classify(Z); 0 disables it.
  double aux_ce_weight = 0.0;
};

struct LossReport {
  double total = 0.0;
  double intra = 0.0;
  double inter = 0.0;
  double aux = 0.0;
  double lambda = 0.5;
  double aux_weight = 0.0;
  std::size_t intra_count = 0;
  std::size_t inter_count = 0;
};

struct LossResult {
  LossReport report;
  std::vector<Tensor> grads;  // aligned with ModelParams::entries
  PerturbationPlan plan;
};

// total = lambda * intra + (1 - lambda) * inter [+ aux_weight * CE(classify(Z))]
//
// intra is the mean cross-entropy of classify(Z_R(i) + Z_I(intra_partner[i]))
// against labels[i]; inter is the mean over samples that have an inter
// partner of classify(Z_R(i) + Z_R(inter_partner[i])) against labels[i].
LossResult dual_loss(const ModelParams& params, const Batch& batch, const DualLossOptions& options, Rng& rng);
LossResult dual_loss(const ModelParams& params, const Batch& batch, const DualLossOptions& options,
                     const PerturbationPlan& plan);

// Plain cross-entropy on classify(encode(X)); the objective without either
// intervention term.
LossResult baseline_loss(const ModelParams& params, const Batch& batch);

enum class InferOn { full, causal };

std::string_view to_string(InferOn mode);
InferOn parse_infer_on(std::string_view text);

// encode -> disentangle -> classify(Z_R + Z_I) for `full`, classify(Z_R) for
// `causal`.
Tensor inference_logits(const ModelParams& params, const Tensor& x, InferOn mode = InferOn::full);

}  // namespace dicausal
