#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dicausal/intervention.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

struct LabeledSeries {
  Tensor values;  // L x M
  int label = 0;
  std::int64_t id = 0;
};

using Split = std::vector<LabeledSeries>;

struct Domain {
  std::string name;
  Split train;
  Split val;
  Split test;
};

struct Manifest {
  std::size_t num_domains = 0;  // T
  std::size_t series_length = 0;  // L
  std::size_t channels = 0;  // M
  std::size_t num_classes = 0;  // C
  std::vector<std::string> domain_names;
};

struct DomainSequence {
  Manifest manifest;
  std::vector<Domain> domains;

  // Shared L/M/C, labels in range, finite values, non-empty splits, ids
  // disjoint within each domain. Throws DataError naming the domain.
  void validate() const;
};

struct SynthConfig {
  std::size_t num_domains = 5;
  std::size_t num_classes = 3;
  std::size_t series_length = 64;
  std::size_t channels = 2;
  std::size_t samples_per_domain = 300;
  double noise_std = 0.05;
  double spurious_strength = 2.0;
  std::uint64_t seed = 0;
  // When false every domain reuses the first domain's class-to-offset
  // permutation, i.e. all domains are drawn from one distribution.
  bool shift_domains = true;

  void validate() const;
};

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct SplitResult {
  Split train;
  Split val;
  Split test;
};

// Per class: shuffle, then val and test take floor(n * ratio) samples each
// (at least one), train keeps the remainder. Throws StratificationError for a
// class with fewer than 3 samples.
SplitResult stratified_split(Split samples, const SplitRatios& ratios, std::uint64_t seed);

// Each sample: channel 0 carries sin(2 pi (c+1) t / L); channel M-1 carries
// the constant spurious_strength * (perm_d(c) + 1) with perm_d a seeded
// per-domain permutation of the classes; remaining channels are zero. All
// entries get N(0, noise_std) noise.
DomainSequence generate_synthetic(const SynthConfig& config);

// Directory layout:
//   <root>/manifest.json                 {"T","L","M","C","domains":[...]}
//   <root>/<domain>/{train,val,test}.csv label, then L*M values time-major
DomainSequence load_sequence(const std::filesystem::path& root);
void save_sequence(const DomainSequence& sequence, const std::filesystem::path& root);

Batch make_batch(const Split& split, std::span<const std::size_t> indices);
Batch make_batch(const Split& split);

}  // namespace dicausal
