#pragma once

#include <stdexcept>
#include <string>

namespace dicausal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between operands; message names the offending axis.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OptimizerError : public Error {
 public:
  OptimizerError(const std::string& parameter, const std::string& what)
      : Error(what), parameter_(parameter) {}
  const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

// Malformed or inconsistent dataset content. `file` and `row` locate it when
// known (row is 1-based, 0 when not applicable).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::string file = {}, std::size_t row = 0)
      : Error(file.empty() ? what
                           : file + (row ? ":" + std::to_string(row) : "") + ": " + what),
        file_(std::move(file)),
        row_(row) {}
  const std::string& file() const { return file_; }
  std::size_t row() const { return row_; }

 private:
  std::string file_;
  std::size_t row_;
};

class MissingManifestError : public DataError {
 public:
  using DataError::DataError;
};
class LabelRangeError : public DataError {
 public:
  using DataError::DataError;
};
class EmptySplitError : public DataError {
 public:
  using DataError::DataError;
};
class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};
class CheckpointMissingError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointCorruptError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class ConfigHashMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Metric requested on a matrix too small for it (AF/RF/PRF need T >= 2).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dicausal
