#include "dicausal/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dicausal/errors.hpp"
#include "dicausal/textio.hpp"

namespace dicausal {
namespace fs = std::filesystem;
namespace {

constexpr const char* kSplitNames[] = {"train", "val", "test"};

std::size_t minor_split_size(std::size_t n, double ratio) {
  const auto floor_size = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  return std::max<std::size_t>(1, floor_size);
}

Split parse_split_file(const fs::path& path, const Manifest& manifest) {
  if (!fs::exists(path)) throw DataError("missing split file", path.string());
  const std::string text = textio::read_file(path);
  const std::size_t width = manifest.series_length * manifest.channels;
  Split split;
  std::istringstream lines(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = textio::split_csv(line);
    if (fields.size() != width + 1) {
      throw DataError("expected " + std::to_string(width + 1) + " fields (label + L*M values), found " +
                          std::to_string(fields.size()),
                      path.string(), row);
    }
    const auto label = textio::parse_int(fields[0]);
    if (!label) throw DataError("non-numeric label field '" + std::string(fields[0]) + "'", path.string(), row);
    if (*label < 0 || *label >= static_cast<long long>(manifest.num_classes)) {
      throw LabelRangeError("label " + std::to_string(*label) + " outside [0, " +
                                std::to_string(manifest.num_classes) + ")",
                            path.string(), row);
    }
    std::vector<double> values(width);
    for (std::size_t k = 0; k < width; ++k) {
      const auto v = textio::parse_double(fields[k + 1]);
      if (!v) {
        throw DataError("non-numeric field " + std::to_string(k + 2) + " '" + std::string(fields[k + 1]) + "'",
                        path.string(), row);
      }
      if (!std::isfinite(*v)) throw DataError("non-finite value in field " + std::to_string(k + 2), path.string(), row);
      values[k] = *v;
    }
    split.push_back({Tensor({manifest.series_length, manifest.channels}, std::move(values)),
                     static_cast<int>(*label), 0});
  }
  if (split.empty()) throw EmptySplitError("split has no samples", path.string());
  return split;
}

std::string format_split(const Split& split) {
  std::string out;
  for (const auto& s : split) {
    out += std::to_string(s.label);
    for (double v : s.values.data()) {
      out += ',';
      out += textio::format_double(v);
    }
    out += '\n';
  }
  return out;
}

void renumber(Domain& domain) {
  std::int64_t next = 0;
  for (Split* split : {&domain.train, &domain.val, &domain.test}) {
    for (auto& s : *split) s.id = next++;
  }
}

}  // namespace

void DomainSequence::validate() const {
  const Manifest& m = manifest;
  if (m.num_domains == 0) throw DataError("sequence has no domains");
  if (domains.size() != m.num_domains || m.domain_names.size() != m.num_domains) {
    throw DataError("manifest declares T=" + std::to_string(m.num_domains) + " but " +
                    std::to_string(domains.size()) + " domains are present");
  }
  for (std::size_t t = 0; t < domains.size(); ++t) {
    const Domain& d = domains[t];
    std::set<std::int64_t> ids;
    for (int s = 0; s < 3; ++s) {
      const Split& split = s == 0 ? d.train : s == 1 ? d.val : d.test;
      if (split.empty()) throw EmptySplitError(std::string(kSplitNames[s]) + " split is empty", d.name);
      for (const auto& sample : split) {
        if (sample.values.shape() != Shape{m.series_length, m.channels}) {
          throw DataError("sample shape " + shape_to_string(sample.values.shape()) + " differs from manifest L x M = " +
                              std::to_string(m.series_length) + "x" + std::to_string(m.channels),
                          d.name);
        }
        if (sample.label < 0 || sample.label >= static_cast<int>(m.num_classes)) {
          throw LabelRangeError("label " + std::to_string(sample.label) + " out of range", d.name);
        }
        if (!sample.values.all_finite()) throw DataError("non-finite sample value", d.name);
        if (!ids.insert(sample.id).second) {
          throw DataError("sample id " + std::to_string(sample.id) + " appears in more than one split", d.name);
        }
      }
    }
  }
}

void SynthConfig::validate() const {
  if (channels < 2) {
    throw ConfigError("synthetic data needs separate causal and spurious channels: M must be >= 2, got " +
                      std::to_string(channels));
  }
  if (num_domains == 0 || num_classes == 0 || series_length == 0) {
    throw ConfigError("synthetic data: T, C and L must be >= 1");
  }
  if (samples_per_domain < 3 * num_classes) {
    throw ConfigError("synthetic data: samples_per_domain must be >= 3*C = " + std::to_string(3 * num_classes));
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("synthetic data: noise_std must be >= 0");
  if (!(spurious_strength >= 0.0) || !std::isfinite(spurious_strength)) {
    throw ConfigError("synthetic data: spurious_strength must be >= 0");
  }
}

SplitResult stratified_split(Split samples, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  SplitResult out;
  for (auto& [label, members] : by_class) {
    if (members.size() < 3) {
      throw StratificationError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                                " samples; stratified splitting needs at least 3");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_val = minor_split_size(members.size(), ratios.val);
    const std::size_t n_test = minor_split_size(members.size(), ratios.test);
    for (std::size_t k = 0; k < members.size(); ++k) {
      LabeledSeries& s = samples[members[k]];
      if (k < n_val) {
        out.val.push_back(std::move(s));
      } else if (k < n_val + n_test) {
        out.test.push_back(std::move(s));
      } else {
        out.train.push_back(std::move(s));
      }
    }
  }
  return out;
}

DomainSequence generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t L = cfg.series_length, M = cfg.channels, C = cfg.num_classes;
  std::mt19937_64 rng(cfg.seed);

  DomainSequence seq;
  seq.manifest = {cfg.num_domains, L, M, C, {}};
  std::vector<int> perm(C);
  for (std::size_t t = 0; t < cfg.num_domains; ++t) {
    if (t == 0 || cfg.shift_domains) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
    }
    Split samples;
    samples.reserve(cfg.samples_per_domain);
    for (std::size_t k = 0; k < cfg.samples_per_domain; ++k) {
      const int c = static_cast<int>(k % C);
      const double offset = cfg.spurious_strength * static_cast<double>(perm[c] + 1);
      const double freq = static_cast<double>(c + 1);
      Tensor x({L, M});
      for (std::size_t s = 0; s < L; ++s) {
        x.at(s, 0) = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(s) / static_cast<double>(L));
        x.at(s, M - 1) = offset;
      }
      if (cfg.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_std);
        for (double& v : x.data()) v += noise(rng);
      }
      samples.push_back({std::move(x), c, static_cast<std::int64_t>(k)});
    }
    const std::uint64_t split_seed = rng();
    auto parts = stratified_split(std::move(samples), SplitRatios{}, split_seed);
    Domain domain{"domain" + std::to_string(t + 1), std::move(parts.train), std::move(parts.val),
                  std::move(parts.test)};
    renumber(domain);
    seq.manifest.domain_names.push_back(domain.name);
    seq.domains.push_back(std::move(domain));
  }
  return seq;
}

DomainSequence load_sequence(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  if (!fs::exists(manifest_path)) throw MissingManifestError("manifest not found", manifest_path.string());

  DomainSequence seq;
  try {
    const auto j = nlohmann::json::parse(textio::read_file(manifest_path));
    seq.manifest.num_domains = j.at("T").get<std::size_t>();
    seq.manifest.series_length = j.at("L").get<std::size_t>();
    seq.manifest.channels = j.at("M").get<std::size_t>();
    seq.manifest.num_classes = j.at("C").get<std::size_t>();
    seq.manifest.domain_names = j.at("domains").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what(), manifest_path.string());
  }
  const Manifest& m = seq.manifest;
  if (m.series_length == 0 || m.channels == 0 || m.num_classes == 0) {
    throw DataError("manifest L, M and C must be >= 1", manifest_path.string());
  }
  if (m.domain_names.size() != m.num_domains) {
    throw DataError("manifest lists " + std::to_string(m.domain_names.size()) + " domains but T=" +
                        std::to_string(m.num_domains),
                    manifest_path.string());
  }
  for (const auto& name : m.domain_names) {
    Domain d{name, {}, {}, {}};
    d.train = parse_split_file(root / name / "train.csv", m);
    d.val = parse_split_file(root / name / "val.csv", m);
    d.test = parse_split_file(root / name / "test.csv", m);
    renumber(d);
    seq.domains.push_back(std::move(d));
  }
  seq.validate();
  return seq;
}

void save_sequence(const DomainSequence& seq, const fs::path& root) {
  fs::create_directories(root);
  nlohmann::json j;
  j["T"] = seq.manifest.num_domains;
  j["L"] = seq.manifest.series_length;
  j["M"] = seq.manifest.channels;
  j["C"] = seq.manifest.num_classes;
  j["domains"] = seq.manifest.domain_names;
  textio::write_file(root / "manifest.json", j.dump(2) + "\n");
  for (const auto& d : seq.domains) {
    fs::create_directories(root / d.name);
    textio::write_file(root / d.name / "train.csv", format_split(d.train));
    textio::write_file(root / d.name / "val.csv", format_split(d.val));
    textio::write_file(root / d.name / "test.csv", format_split(d.test));
  }
}

Batch make_batch(const Split& split, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DataError("cannot build an empty batch");
  const Shape& sample_shape = split.at(indices[0]).values.shape();
  const std::size_t width = split[indices[0]].values.size();
  Batch batch;
  batch.x = Tensor({indices.size(), sample_shape.at(0), sample_shape.at(1)});
  batch.labels.reserve(indices.size());
  batch.sample_ids.reserve(indices.size());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const LabeledSeries& s = split.at(indices[b]);
    if (s.values.shape() != sample_shape) throw DimensionError("make_batch: ragged sample shapes");
    std::copy(s.values.data().begin(), s.values.data().end(), batch.x.data().begin() + b * width);
    batch.labels.push_back(s.label);
    batch.sample_ids.push_back(s.id);
  }
  return batch;
}

Batch make_batch(const Split& split) {
  std::vector<std::size_t> all(split.size());
  std::iota(all.begin(), all.end(), 0);
  return make_batch(split, all);
}

}  // namespace dicausal
