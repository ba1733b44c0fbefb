#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicausal/adam.hpp"
#include "dicausal/tape.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

enum class EncoderKind { linear, mlp };

std::string to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view text);

struct ModelConfig {
  EncoderKind encoder = EncoderKind::linear;
  std::size_t series_length = 1;  // L
  std::size_t channels = 1;       // M
  std::size_t feature_dim = 1;    // D
  std::size_t hidden_dim = 1;     // mlp encoder only
  std::size_t num_classes = 2;    // C
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return series_length * channels; }
  // Throws ConfigError on any zero dimension.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Canonical text form (compact JSON, sorted keys) and its FNV-1a hash.
std::string canonical_text(const ModelConfig& config);
ModelConfig model_config_from_text(std::string_view text);
std::uint64_t config_hash(const ModelConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);

enum class ParamGroup { encoder, disentangler, classifier };

// Trainable parameters in a fixed order: encoder tensors (theta1), the mask
// layer (theta_dis), then the classifier (theta2).
struct ModelParams {
  ModelConfig config;
  std::uint64_t hash = 0;
  std::vector<Parameter> entries;

  std::size_t index_of(std::string_view name) const;
  const Tensor& get(std::string_view name) const { return entries[index_of(name)].value; }
  Tensor& get(std::string_view name) { return entries[index_of(name)].value; }

  std::span<const Parameter> group(ParamGroup g) const;
  std::span<Parameter> group(ParamGroup g);
  std::size_t scalar_count() const;
  bool all_finite() const;
};

namespace param_names {
inline constexpr std::string_view encoder_weight = "encoder.weight";
inline constexpr std::string_view encoder_bias = "encoder.bias";
inline constexpr std::string_view encoder_hidden_weight = "encoder.hidden.weight";
inline constexpr std::string_view encoder_hidden_bias = "encoder.hidden.bias";
inline constexpr std::string_view encoder_out_weight = "encoder.out.weight";
inline constexpr std::string_view encoder_out_bias = "encoder.out.bias";
inline constexpr std::string_view mask_weight = "disentangler.weight";
inline constexpr std::string_view mask_bias = "disentangler.bias";
inline constexpr std::string_view classifier_weight = "classifier.weight";
inline constexpr std::string_view classifier_bias = "classifier.bias";
}  // namespace param_names

// Parameter shapes for a config, in storage order.
std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& config);
std::size_t parameter_count(const ModelConfig& config);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from a generator seeded with
// config.seed; biases zero.
ModelParams init_params(const ModelConfig& config);

// X: B x L x M  ->  Z: B x D
Tensor encode(const ModelParams& params, const Tensor& x);
// Z: B x D  ->  logits: B x C
Tensor classify(const ModelParams& params, const Tensor& z);

// Parameters recorded on a tape; vars[i] corresponds to params.entries[i].
struct BoundParams {
  const ModelParams* params = nullptr;
  std::vector<VarId> vars;

  VarId operator[](std::string_view name) const { return vars[params->index_of(name)]; }
};

BoundParams bind(Tape& tape, const ModelParams& params);
VarId encode(Tape& tape, const BoundParams& bound, VarId x);
VarId classify(Tape& tape, const BoundParams& bound, VarId z);

}  // namespace dicausal
