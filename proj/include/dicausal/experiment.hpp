#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "dicausal/data.hpp"
#include "dicausal/metrics.hpp"
#include "dicausal/model.hpp"
#include "dicausal/trainer.hpp"

namespace dicausal {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

struct ExperimentConfig {
  EncoderKind encoder = EncoderKind::linear;
  std::size_t feature_dim = 64;
  std::size_t hidden_dim = 64;
  TrainConfig train;
  std::optional<std::filesystem::path> data_path;
  std::optional<SynthConfig> synthetic;

  ModelConfig model_config(const Manifest& manifest) const;
};

// Flat JSON objects; unknown keys and wrong types throw ConfigError.
SynthConfig parse_synth_config(const nlohmann::json& j);
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json load_json_file(const std::filesystem::path& path);

nlohmann::json to_json(const MetricReport& report);

struct GenOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
};

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> data;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  bool export_repr = false;
};

struct MetricsOptions {
  std::filesystem::path matrix;
  std::optional<std::filesystem::path> out;
};

// Each returns a process exit code and reports failures on `err`.
int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err);

}  // namespace dicausal
