#include "dicausal/experiment.hpp"

#include <cstdio>
#include <iostream>
#include <set>

#include "dicausal/disentangle.hpp"
#include "dicausal/errors.hpp"
#include "dicausal/textio.hpp"

namespace dicausal {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback) {
  return static_cast<std::uint64_t>(get_count(j, key, fallback));
}

double get_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string get_text(const json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

bool get_flag(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false");
  return v.get<bool>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Maps library exceptions onto the CLI's exit codes.
template <typename F>
int guarded(std::ostream& err, const char* command, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "dicausal " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "dicausal " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "dicausal " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const OptimizerError& e) {
    err << "dicausal " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "dicausal " << command << ": data error: " << e.what() << "\n";
    return kExitData;
  } catch (const CheckpointError& e) {
    err << "dicausal " << command << ": checkpoint error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "dicausal " << command << ": I/O error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "dicausal " << command << ": " << e.what() << "\n";
    return kExitData;
  }
}

json load_config_json(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return load_json_file(path);
}

}  // namespace

ModelConfig ExperimentConfig::model_config(const Manifest& manifest) const {
  ModelConfig c;
  c.encoder = encoder;
  c.series_length = manifest.series_length;
  c.channels = manifest.channels;
  c.feature_dim = feature_dim;
  c.hidden_dim = hidden_dim;
  c.num_classes = manifest.num_classes;
  c.seed = train.seed;
  return c;
}

SynthConfig parse_synth_config(const json& j) {
  reject_unknown_keys(j,
                      {"T", "C", "L", "M", "samples_per_domain", "noise_std", "spurious_strength", "seed",
                       "shift_domains"},
                      "synthetic config");
  SynthConfig c;
  c.num_domains = get_count(j, "T", c.num_domains);
  c.num_classes = get_count(j, "C", c.num_classes);
  c.series_length = get_count(j, "L", c.series_length);
  c.channels = get_count(j, "M", c.channels);
  c.samples_per_domain = get_count(j, "samples_per_domain", c.samples_per_domain);
  c.noise_std = get_real(j, "noise_std", c.noise_std);
  c.spurious_strength = get_real(j, "spurious_strength", c.spurious_strength);
  c.seed = get_seed(j, "seed", c.seed);
  c.shift_domains = get_flag(j, "shift_domains", c.shift_domains);
  c.validate();
  return c;
}

json to_json(const SynthConfig& c) {
  return {{"T", c.num_domains},
          {"C", c.num_classes},
          {"L", c.series_length},
          {"M", c.channels},
          {"samples_per_domain", c.samples_per_domain},
          {"noise_std", c.noise_std},
          {"spurious_strength", c.spurious_strength},
          {"seed", c.seed},
          {"shift_domains", c.shift_domains}};
}

ExperimentConfig parse_experiment_config(const json& j) {
  reject_unknown_keys(j,
                      {"encoder", "feature_dim", "hidden_dim", "epochs", "batch_size", "lambda", "lr", "seed",
                       "infer_on", "aux_ce_weight", "method", "data", "synthetic"},
                      "experiment config");
  ExperimentConfig c;
  c.encoder = parse_encoder_kind(get_text(j, "encoder", to_string(c.encoder)));
  c.feature_dim = get_count(j, "feature_dim", c.feature_dim);
  c.hidden_dim = get_count(j, "hidden_dim", c.hidden_dim);
  TrainConfig& t = c.train;
  t.epochs = get_count(j, "epochs", t.epochs);
  t.batch_size = get_count(j, "batch_size", t.batch_size);
  t.lambda = get_real(j, "lambda", t.lambda);
  t.lr = get_real(j, "lr", t.lr);
  t.seed = get_seed(j, "seed", t.seed);
  t.infer_on = parse_infer_on(get_text(j, "infer_on", std::string(to_string(t.infer_on))));
  t.aux_ce_weight = get_real(j, "aux_ce_weight", t.aux_ce_weight);
  t.method = parse_method(get_text(j, "method", std::string(to_string(t.method))));
  if (j.contains("data")) c.data_path = get_text(j, "data", "");
  if (j.contains("synthetic")) c.synthetic = parse_synth_config(j.at("synthetic"));
  if (c.data_path && c.synthetic) throw ConfigError("specify exactly one data source: 'data' or 'synthetic'");
  if (c.feature_dim == 0) throw ConfigError("feature_dim must be >= 1");
  if (c.encoder == EncoderKind::mlp && c.hidden_dim == 0) throw ConfigError("hidden_dim must be >= 1");
  t.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = {{"encoder", to_string(c.encoder)},
            {"feature_dim", c.feature_dim},
            {"hidden_dim", c.hidden_dim},
            {"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"lambda", c.train.lambda},
            {"lr", c.train.lr},
            {"seed", c.train.seed},
            {"infer_on", std::string(to_string(c.train.infer_on))},
            {"aux_ce_weight", c.train.aux_ce_weight},
            {"method", std::string(to_string(c.train.method))}};
  if (c.data_path) j["data"] = c.data_path->string();
  if (c.synthetic) j["synthetic"] = to_json(*c.synthetic);
  return j;
}

json load_json_file(const fs::path& path) {
  try {
    return json::parse(textio::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const MetricReport& r) {
  return {{"T", r.num_domains},
          {"acc", r.acc},
          {"af", optional_number(r.af)},
          {"rf", optional_number(r.rf)},
          {"prf", optional_number(r.prf)},
          {"final_accuracy", r.final_accuracy},
          {"af_terms", r.af_terms},
          {"rf_terms", r.rf_terms},
          {"prf_terms", r.prf_terms},
          {"warnings", r.warnings}};
}

int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "gen", [&] {
    SynthConfig cfg = parse_synth_config(load_config_json(options.config));
    if (options.seed) cfg.seed = *options.seed;
    const DomainSequence seq = generate_synthetic(cfg);
    try {
      save_sequence(seq, options.out);
    } catch (const Error& e) {
      throw DataError(e.what());
    }
    const Manifest& m = seq.manifest;
    out << "generated " << m.num_domains << " domains (C=" << m.num_classes << ", L=" << m.series_length
        << ", M=" << m.channels << ") in " << options.out.string() << "\n";
    for (const auto& d : seq.domains) {
      out << "  " << d.name << ": train=" << d.train.size() << " val=" << d.val.size() << " test=" << d.test.size()
          << "\n";
    }
    return int{kExitOk};
  });
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "run", [&] {
    ExperimentConfig cfg = parse_experiment_config(load_config_json(options.config));
    if (options.seed) cfg.train.seed = *options.seed;
    if (options.data) {
      if (cfg.synthetic) throw ConfigError("--data given but the config also specifies 'synthetic'");
      cfg.data_path = *options.data;
    }
    if (!cfg.data_path && !cfg.synthetic) throw ConfigError("no data source: pass --data or set 'data'/'synthetic'");

    const DomainSequence seq = cfg.synthetic ? generate_synthetic(*cfg.synthetic) : load_sequence(*cfg.data_path);
    const ModelConfig model_config = cfg.model_config(seq.manifest);
    fs::create_directories(options.out);

    const SequenceResult result = run_sequence(seq, model_config, cfg.train, options.out / "checkpoints");
    const MetricReport report = metric_report(result.matrix);

    textio::write_file(options.out / "matrix.csv", to_csv(result.matrix));

    json logs = json::array();
    for (const auto& log : result.logs) {
      json steps = json::array();
      for (const auto& s : log.steps) steps.push_back({s.total, s.intra, s.inter});
      logs.push_back({{"domain", log.domain},
                      {"epoch_train_loss", log.epoch_train_loss},
                      {"epoch_val_accuracy", log.epoch_val_accuracy},
                      {"best_epoch", log.best_epoch ? json(*log.best_epoch) : json(nullptr)},
                      {"best_val_accuracy", log.best_val_accuracy()},
                      {"steps", steps}});
      err << "  " << log.domain << ": " << log.epoch_train_loss.size() << " epochs in "
          << fixed6(log.duration_seconds) << " s, best val " << fixed6(log.best_val_accuracy()) << "\n";
    }
    const json result_json = {{"version", kVersion},
                              {"config", to_json(cfg)},
                              {"seed", cfg.train.seed},
                              {"model", json::parse(canonical_text(model_config))},
                              {"matrix", result.matrix.rows()},
                              {"metrics", to_json(report)},
                              {"logs", logs}};
    textio::write_file(options.out / "result.json", result_json.dump(2) + "\n");

    if (options.export_repr) {
      for (std::size_t t = 0; t < seq.domains.size(); ++t) {
        const Batch test = make_batch(seq.domains[t].test);
        const DisentangledPair pair = disentangle(result.final_params, encode(result.final_params, test.x));
        export_representations(pair, test.labels, static_cast<int>(t + 1),
                               options.out / ("repr_domain" + std::to_string(t + 1) + ".csv"));
      }
    }

    out << "ACC " << fixed6(report.acc) << "  PRF " << (report.prf ? fixed6(*report.prf) : "undefined") << "\n";
    out << "wrote " << (options.out / "result.json").string() << "\n";
    return int{kExitOk};
  });
}

int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "metrics", [&] {
    if (!fs::exists(options.matrix)) throw DataError("matrix file not found", options.matrix.string());
    AccuracyMatrix m;
    try {
      m = parse_matrix_csv(textio::read_file(options.matrix), options.matrix.string());
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    const MetricReport report = metric_report(m);
    auto show = [](const std::optional<double>& v) { return v ? fixed6(*v) : std::string("undefined"); };
    out << "T    " << report.num_domains << "\n";
    out << "ACC  " << fixed6(report.acc) << "\n";
    out << "AF   " << show(report.af) << "\n";
    out << "RF   " << show(report.rf) << "\n";
    out << "PRF  " << show(report.prf) << "\n";
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";

    const fs::path dir = options.out ? *options.out : options.matrix.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    textio::write_file(dir / "metrics.json", to_json(report).dump(2) + "\n");
    return int{kExitOk};
  });
}

}  // namespace dicausal
