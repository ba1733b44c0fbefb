#pragma once

#include <cstdint>
#include <filesystem>

#include "dicausal/model.hpp"

namespace dicausal {

// Binary layout, all integers u64/i64 and floats f64, little-endian:
//
//   "DCD1"
//   config_len, config_text[config_len]     canonical ModelConfig text
//   config_hash                             FNV-1a of config_text
//   domain_index (i64), val_accuracy (f64)
//   tensor_count
//   per tensor: name_len, name, rank, dims[rank], values[prod(dims)]
struct Checkpoint {
  ModelParams params;
  std::int64_t domain_index = 0;
  double val_accuracy = 0.0;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

// Throws CheckpointMissingError, CheckpointCorruptError (bad magic, short
// read, inconsistent layout) or ConfigHashMismatchError.
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Additionally requires the stored config to hash equal to `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

}  // namespace dicausal
