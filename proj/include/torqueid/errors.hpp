#pragma once

#include <stdexcept>
#include <string>

namespace torqueid {

/// Invalid configuration or input that fails a documented contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared during a numerical procedure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training loss became non-finite. `epoch()` is 1-based.
class TrainingDiverged : public NumericalError {
 public:
  explicit TrainingDiverged(int epoch)
      : NumericalError("training diverged: non-finite loss at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace torqueid
