#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "dicausal/data.hpp"
#include "dicausal/intervention.hpp"
#include "dicausal/metrics.hpp"
#include "dicausal/model.hpp"

namespace dicausal {

enum class Method { dualcd, baseline_ce };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lambda = 0.5;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  InferOn infer_on = InferOn::full;
  double aux_ce_weight = 0.0;
  Method method = Method::dualcd;

  void validate() const;
};

struct DomainRunLog {
  std::string domain;
  std::vector<double> epoch_train_loss;
  std::vector<double> epoch_val_accuracy;
  std::optional<std::size_t> best_epoch;  // 0-based; empty when epochs == 0
  double duration_seconds = 0.0;
  std::vector<LossReport> steps;

  double best_val_accuracy() const;
};

struct DomainRunResult {
  ModelParams best;
  DomainRunLog log;
};

// Trains on one domain with a fresh Adam state and returns the parameters
// from the epoch with the highest validation accuracy (earliest on ties).
// Throws EmptySplitError for an empty train/val split and NumericalError on
// a non-finite loss.
DomainRunResult run_domain(const ModelParams& start, const Domain& domain, const TrainConfig& config, Rng& rng);

// Fraction of samples whose argmax logit (lowest index on ties) equals the label.
double evaluate(const ModelParams& params, const Split& split, InferOn infer_on = InferOn::full);

struct SequenceResult {
  AccuracyMatrix matrix;
  ModelParams final_params;
  std::vector<DomainRunLog> logs;
};

// Sequential training over all domains. Domain t > 0 starts from domain
// t-1's best parameters; when `checkpoint_dir` is set they are written there
// as domain<k>.ckpt and read back before training the next domain.
SequenceResult run_sequence(const DomainSequence& domains, const ModelConfig& model_config, const TrainConfig& config,
                            const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t domain_number);

}  // namespace dicausal
