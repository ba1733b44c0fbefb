#include "dicausal/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"

#include "dicausal/errors.hpp"
#include "dicausal/ops.hpp"

namespace dicausal {
namespace {

void require_input_shape(const ModelConfig& config, const Tensor& x) {
  if (x.rank() != 3) {
    throw DimensionError("encode: input must be B x L x M, got " + shape_to_string(x.shape()));
  }
  if (x.dim(1) != config.series_length) {
    throw DimensionError("encode: axis 1 (length) is " + std::to_string(x.dim(1)) + ", expected " +
                         std::to_string(config.series_length));
  }
  if (x.dim(2) != config.channels) {
    throw DimensionError("encode: axis 2 (channels) is " + std::to_string(x.dim(2)) + ", expected " +
                         std::to_string(config.channels));
  }
}

void require_feature_shape(const ModelConfig& config, const Tensor& z) {
  if (z.rank() != 2 || z.dim(1) != config.feature_dim) {
    throw DimensionError("classify: axis 1 must be " + std::to_string(config.feature_dim) + ", got " +
                         shape_to_string(z.shape()));
  }
}

}  // namespace

std::string to_string(EncoderKind kind) { return kind == EncoderKind::linear ? "linear" : "mlp"; }

EncoderKind parse_encoder_kind(std::string_view text) {
  if (text == "linear") return EncoderKind::linear;
  if (text == "mlp") return EncoderKind::mlp;
  throw ConfigError("unknown encoder kind '" + std::string(text) + "' (expected linear or mlp)");
}

void ModelConfig::validate() const {
  if (series_length == 0) throw ConfigError("model: series_length must be >= 1");
  if (channels == 0) throw ConfigError("model: channels must be >= 1");
  if (feature_dim == 0) throw ConfigError("model: feature_dim must be >= 1");
  if (num_classes == 0) throw ConfigError("model: num_classes must be >= 1");
  if (encoder == EncoderKind::mlp && hidden_dim == 0) throw ConfigError("model: hidden_dim must be >= 1");
}

std::string canonical_text(const ModelConfig& c) {
  nlohmann::json j;
  j["encoder"] = to_string(c.encoder);
  j["series_length"] = c.series_length;
  j["channels"] = c.channels;
  j["feature_dim"] = c.feature_dim;
  // hidden_dim only shapes the mlp encoder; leaving it out for linear keeps
  // the hash a function of the parameter layout.
  j["hidden_dim"] = c.encoder == EncoderKind::mlp ? c.hidden_dim : 0;
  j["num_classes"] = c.num_classes;
  j["seed"] = c.seed;
  return j.dump();
}

ModelConfig model_config_from_text(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ModelConfig c;
  c.encoder = parse_encoder_kind(j.at("encoder").get<std::string>());
  c.series_length = j.at("series_length").get<std::size_t>();
  c.channels = j.at("channels").get<std::size_t>();
  c.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ModelConfig& config) { return fnv1a64(canonical_text(config)); }

std::size_t ModelParams::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name == name) return i;
  }
  throw Error("model: no parameter named '" + std::string(name) + "'");
}

namespace {

std::pair<std::size_t, std::size_t> group_range(const ModelConfig& config, ParamGroup g) {
  const std::size_t enc = config.encoder == EncoderKind::linear ? 2 : 4;
  switch (g) {
    case ParamGroup::encoder:
      return {0, enc};
    case ParamGroup::disentangler:
      return {enc, 2};
    case ParamGroup::classifier:
      return {enc + 2, 2};
  }
  return {0, 0};
}

}  // namespace

std::span<const Parameter> ModelParams::group(ParamGroup g) const {
  const auto [first, count] = group_range(config, g);
  return std::span<const Parameter>(entries).subspan(first, count);
}

std::span<Parameter> ModelParams::group(ParamGroup g) {
  const auto [first, count] = group_range(config, g);
  return std::span<Parameter>(entries).subspan(first, count);
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : entries) n += p.value.size();
  return n;
}

bool ModelParams::all_finite() const {
  return std::all_of(entries.begin(), entries.end(), [](const Parameter& p) { return p.value.all_finite(); });
}

std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& c) {
  namespace pn = param_names;
  std::vector<std::pair<std::string, Shape>> layout;
  if (c.encoder == EncoderKind::linear) {
    layout.emplace_back(pn::encoder_weight, Shape{c.input_dim(), c.feature_dim});
    layout.emplace_back(pn::encoder_bias, Shape{c.feature_dim});
  } else {
    layout.emplace_back(pn::encoder_hidden_weight, Shape{c.input_dim(), c.hidden_dim});
    layout.emplace_back(pn::encoder_hidden_bias, Shape{c.hidden_dim});
    layout.emplace_back(pn::encoder_out_weight, Shape{c.hidden_dim, c.feature_dim});
    layout.emplace_back(pn::encoder_out_bias, Shape{c.feature_dim});
  }
  layout.emplace_back(pn::mask_weight, Shape{c.feature_dim, c.feature_dim});
  layout.emplace_back(pn::mask_bias, Shape{c.feature_dim});
  layout.emplace_back(pn::classifier_weight, Shape{c.feature_dim, c.num_classes});
  layout.emplace_back(pn::classifier_bias, Shape{c.num_classes});
  return layout;
}

std::size_t parameter_count(const ModelConfig& config) {
  std::size_t n = 0;
  for (const auto& [name, shape] : parameter_layout(config)) n += shape_size(shape);
  return n;
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  ModelParams params;
  params.config = config;
  params.hash = config_hash(config);
  std::mt19937_64 rng(config.seed);
  for (auto& [name, shape] : parameter_layout(config)) {
    Tensor value(shape);
    if (shape.size() == 2) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(shape[0]));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : value.data()) v = dist(rng);
    }
    params.entries.push_back({name, std::move(value)});
  }
  return params;
}

Tensor encode(const ModelParams& params, const Tensor& x) {
  namespace pn = param_names;
  const ModelConfig& c = params.config;
  require_input_shape(c, x);
  const Tensor flat = x.reshaped({x.dim(0), c.input_dim()});
  if (c.encoder == EncoderKind::linear) {
    return linear(flat, params.get(pn::encoder_weight), params.get(pn::encoder_bias));
  }
  const Tensor hidden =
      tanh(linear(flat, params.get(pn::encoder_hidden_weight), params.get(pn::encoder_hidden_bias)));
  return linear(hidden, params.get(pn::encoder_out_weight), params.get(pn::encoder_out_bias));
}

Tensor classify(const ModelParams& params, const Tensor& z) {
  require_feature_shape(params.config, z);
  return linear(z, params.get(param_names::classifier_weight), params.get(param_names::classifier_bias));
}

BoundParams bind(Tape& tape, const ModelParams& params) {
  BoundParams bound{&params, {}};
  bound.vars.reserve(params.entries.size());
  for (std::size_t i = 0; i < params.entries.size(); ++i) {
    bound.vars.push_back(tape.parameter(params.entries[i].value, i));
  }
  return bound;
}

VarId encode(Tape& tape, const BoundParams& bound, VarId x) {
  namespace pn = param_names;
  const ModelConfig& c = bound.params->config;
  const Tensor& xv = tape.value(x);
  require_input_shape(c, xv);
  const VarId flat = tape.reshape(x, {xv.dim(0), c.input_dim()});
  if (c.encoder == EncoderKind::linear) {
    return tape.linear(flat, bound[pn::encoder_weight], bound[pn::encoder_bias]);
  }
  const VarId hidden =
      tape.tanh(tape.linear(flat, bound[pn::encoder_hidden_weight], bound[pn::encoder_hidden_bias]));
  return tape.linear(hidden, bound[pn::encoder_out_weight], bound[pn::encoder_out_bias]);
}

VarId classify(Tape& tape, const BoundParams& bound, VarId z) {
  require_feature_shape(bound.params->config, tape.value(z));
  return tape.linear(z, bound[param_names::classifier_weight], bound[param_names::classifier_bias]);
}

}  // namespace dicausal
