#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsagc {

enum class ValidationErrc { non_finite, too_few_series, too_few_samples, shape };

// Raised by ensemble validation. For non-finite entries row()/col() locate
// the first offending value.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(ValidationErrc kind, const std::string& what, std::size_t row = 0,
                  std::size_t col = 0)
      : std::invalid_argument(what), kind_(kind), row_(row), col_(col) {}

  ValidationErrc kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  ValidationErrc kind_;
  std::size_t row_;
  std::size_t col_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Normal equations could not be solved at the requested regularization.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key), reason_(what) {}
  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// File could not be opened, read, written or renamed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subject contributed samples to both the training and test partition.
class LeakageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lsagc
