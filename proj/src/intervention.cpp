#include "dicausal/intervention.hpp"

#include <map>
#include <string>

#include "dicausal/disentangle.hpp"
#include "dicausal/errors.hpp"
#include "dicausal/ops.hpp"
#include "dicausal/tape.hpp"

namespace dicausal {
namespace {

void validate_batch(const ModelParams& params, const Batch& batch) {
  if (batch.labels.empty()) throw DataError("batch is empty");
  if (batch.x.rank() != 3 || batch.x.dim(0) != batch.labels.size()) {
    throw DimensionError("batch: X has shape " + shape_to_string(batch.x.shape()) + " but " +
                         std::to_string(batch.labels.size()) + " labels");
  }
  const int classes = static_cast<int>(params.config.num_classes);
  for (int label : batch.labels) {
    if (label < 0 || label >= classes) {
      throw LabelError("batch: label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    }
  }
}

std::size_t pick(const std::vector<std::size_t>& candidates, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, candidates.size() - 1);
  return candidates[dist(rng)];
}

}  // namespace

PerturbationPlan plan_perturbations(std::span<const int> labels, Rng& rng) {
  if (labels.empty()) throw DataError("cannot plan perturbations for an empty batch");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  PerturbationPlan plan;
  plan.intra_partner.resize(labels.size());
  plan.inter_partner.resize(labels.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    candidates.clear();
    for (std::size_t j : by_class[labels[i]]) {
      if (j != i) candidates.push_back(j);
    }
    plan.intra_partner[i] = candidates.empty() ? i : pick(candidates, rng);

    candidates.clear();
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != labels[i]) candidates.push_back(j);
    }
    if (!candidates.empty()) plan.inter_partner[i] = pick(candidates, rng);
  }
  return plan;
}

Tensor perturbed_intra(const Tensor& causal, const Tensor& spurious_donor) {
  return elementwise(ElementwiseOp::add, causal, spurious_donor);
}

Tensor perturbed_inter(const Tensor& causal, const Tensor& causal_donor) {
  return elementwise(ElementwiseOp::add, causal, causal_donor);
}

LossResult dual_loss(const ModelParams& params, const Batch& batch, const DualLossOptions& options, Rng& rng) {
  validate_batch(params, batch);
  return dual_loss(params, batch, options, plan_perturbations(batch.labels, rng));
}

LossResult dual_loss(const ModelParams& params, const Batch& batch, const DualLossOptions& options,
                     const PerturbationPlan& plan) {
  if (!(options.lambda >= 0.0 && options.lambda <= 1.0)) {
    throw ConfigError("lambda must lie in [0, 1], got " + std::to_string(options.lambda));
  }
  if (!(options.aux_ce_weight >= 0.0)) throw ConfigError("aux_ce_weight must be non-negative");
  validate_batch(params, batch);
  const std::size_t n = batch.size();
  if (plan.intra_partner.size() != n || plan.inter_partner.size() != n) {
    throw DimensionError("perturbation plan does not match batch size");
  }

  Tape tape;
  const BoundParams bound = bind(tape, params);
  const VarId x = tape.constant(batch.x);
  const VarId z = encode(tape, bound, x);
  const DisentangledVars parts = disentangle(tape, bound, z);

  const VarId intra_z = tape.add(parts.causal, tape.gather_rows(parts.spurious, plan.intra_partner));
  const VarId intra = tape.cross_entropy(classify(tape, bound, intra_z), batch.labels);

  std::vector<std::size_t> anchors, donors;
  std::vector<int> anchor_labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (!plan.inter_partner[i]) continue;
    anchors.push_back(i);
    donors.push_back(*plan.inter_partner[i]);
    anchor_labels.push_back(batch.labels[i]);
  }
  VarId inter;
  if (anchors.empty()) {
    inter = tape.constant(Tensor({1}, 0.0));
  } else {
    const VarId inter_z = tape.add(tape.gather_rows(parts.causal, std::move(anchors)),
                                   tape.gather_rows(parts.causal, std::move(donors)));
    inter = tape.cross_entropy(classify(tape, bound, inter_z), anchor_labels);
  }

  VarId total = tape.add(tape.scale(intra, options.lambda), tape.scale(inter, 1.0 - options.lambda));
  LossReport report;
  if (options.aux_ce_weight > 0.0) {
    const VarId aux = tape.cross_entropy(classify(tape, bound, z), batch.labels);
    report.aux = tape.scalar(aux);
    total = tape.add(total, tape.scale(aux, options.aux_ce_weight));
  }
  tape.backward(total);

  report.total = tape.scalar(total);
  report.intra = tape.scalar(intra);
  report.inter = tape.scalar(inter);
  report.lambda = options.lambda;
  report.aux_weight = options.aux_ce_weight;
  report.intra_count = n;
  report.inter_count = anchor_labels.size();
  return {report, tape.parameter_grads(params.entries.size()), plan};
}

LossResult baseline_loss(const ModelParams& params, const Batch& batch) {
  validate_batch(params, batch);
  Tape tape;
  const BoundParams bound = bind(tape, params);
  const VarId z = encode(tape, bound, tape.constant(batch.x));
  const VarId loss = tape.cross_entropy(classify(tape, bound, z), batch.labels);
  tape.backward(loss);

  LossReport report;
  report.total = tape.scalar(loss);
  report.aux = report.total;
  report.aux_weight = 1.0;
  report.lambda = 0.0;
  return {report, tape.parameter_grads(params.entries.size()), {}};
}

std::string_view to_string(InferOn mode) { return mode == InferOn::full ? "full" : "causal"; }

InferOn parse_infer_on(std::string_view text) {
  if (text == "full") return InferOn::full;
  if (text == "causal") return InferOn::causal;
  throw ConfigError("infer_on must be 'full' or 'causal', got '" + std::string(text) + "'");
}

Tensor inference_logits(const ModelParams& params, const Tensor& x, InferOn mode) {
  const DisentangledPair pair = disentangle(params, encode(params, x));
  if (mode == InferOn::causal) return classify(params, pair.causal);
  return classify(params, elementwise(ElementwiseOp::add, pair.causal, pair.spurious));
}

}  // namespace dicausal
