#include "dicausal/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "dicausal/adam.hpp"
#include "dicausal/checkpoint.hpp"
#include "dicausal/errors.hpp"
#include "dicausal/ops.hpp"

namespace dicausal {

std::string_view to_string(Method method) { return method == Method::dualcd ? "dualcd" : "baseline_ce"; }

Method parse_method(std::string_view text) {
  if (text == "dualcd") return Method::dualcd;
  if (text == "baseline_ce") return Method::baseline_ce;
  throw ConfigError("method must be 'dualcd' or 'baseline_ce', got '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite non-negative number");
  if (!(aux_ce_weight >= 0.0) || !std::isfinite(aux_ce_weight)) throw ConfigError("aux_ce_weight must be >= 0");
}

double DomainRunLog::best_val_accuracy() const {
  return best_epoch ? epoch_val_accuracy.at(*best_epoch) : 0.0;
}

double evaluate(const ModelParams& params, const Split& split, InferOn infer_on) {
  if (split.empty()) throw EmptySplitError("cannot evaluate on an empty split");
  const Batch batch = make_batch(split);
  const auto predicted = argmax_rows(inference_logits(params, batch.x, infer_on));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == batch.labels[i];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

DomainRunResult run_domain(const ModelParams& start, const Domain& domain, const TrainConfig& config, Rng& rng) {
  config.validate();
  if (domain.train.empty()) throw EmptySplitError("train split is empty", domain.name);
  if (domain.val.empty()) throw EmptySplitError("validation split is empty", domain.name);

  const auto t0 = std::chrono::steady_clock::now();
  DomainRunResult result{start, {}};
  result.log.domain = domain.name;
  ModelParams params = start;
  AdamState adam;
  adam.config.lr = config.lr;
  const DualLossOptions loss_options{config.lambda, config.aux_ce_weight};

  std::vector<std::size_t> order(domain.train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t last = std::min(order.size(), first + config.batch_size);
      const Batch batch = make_batch(domain.train, std::span(order).subspan(first, last - first));
      LossResult step = config.method == Method::dualcd ? dual_loss(params, batch, loss_options, rng)
                                                        : baseline_loss(params, batch);
      if (!std::isfinite(step.report.total)) {
        throw NumericalError("non-finite loss in domain '" + domain.name + "' at epoch " + std::to_string(epoch + 1) +
                             ", batch " + std::to_string(batches + 1));
      }
      adam_step(params.entries, step.grads, adam);
      loss_sum += step.report.total;
      ++batches;
      result.log.steps.push_back(step.report);
    }
    const double val = evaluate(params, domain.val, config.infer_on);
    result.log.epoch_train_loss.push_back(loss_sum / static_cast<double>(batches));
    result.log.epoch_val_accuracy.push_back(val);
    if (!result.log.best_epoch || val > result.log.best_val_accuracy()) {
      result.log.best_epoch = epoch;
      result.best = params;
    }
  }
  result.log.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t domain_number) {
  return dir / ("domain" + std::to_string(domain_number) + ".ckpt");
}

SequenceResult run_sequence(const DomainSequence& domains, const ModelConfig& model_config, const TrainConfig& config,
                            const std::optional<std::filesystem::path>& checkpoint_dir) {
  config.validate();
  model_config.validate();
  domains.validate();
  const Manifest& m = domains.manifest;
  if (model_config.series_length != m.series_length || model_config.channels != m.channels ||
      model_config.num_classes != m.num_classes) {
    throw ConfigError("model config (L=" + std::to_string(model_config.series_length) + ", M=" +
                      std::to_string(model_config.channels) + ", C=" + std::to_string(model_config.num_classes) +
                      ") does not match the dataset (L=" + std::to_string(m.series_length) + ", M=" +
                      std::to_string(m.channels) + ", C=" + std::to_string(m.num_classes) + ")");
  }
  if (checkpoint_dir) std::filesystem::create_directories(*checkpoint_dir);

  Rng rng(config.seed);
  SequenceResult out;
  ModelParams current = init_params(model_config);
  for (std::size_t t = 0; t < domains.domains.size(); ++t) {
    if (t > 0 && checkpoint_dir) {
      current = load_checkpoint(checkpoint_path(*checkpoint_dir, t), model_config).params;
    }
    DomainRunResult run = run_domain(current, domains.domains[t], config, rng);
    if (checkpoint_dir) {
      save_checkpoint({run.best, static_cast<std::int64_t>(t + 1), run.log.best_val_accuracy()},
                      checkpoint_path(*checkpoint_dir, t + 1));
    }
    std::vector<double> row;
    for (std::size_t j = 0; j <= t; ++j) row.push_back(evaluate(run.best, domains.domains[j].test, config.infer_on));
    out.matrix.append_row(std::move(row));
    out.logs.push_back(std::move(run.log));
    current = std::move(run.best);
  }
  out.final_params = std::move(current);
  return out;
}

}  // namespace dicausal
