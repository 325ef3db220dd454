/*! @file errors.hpp
 *  Exception types shared by all modules.
 *
 *  The CLI maps ConfigError to exit code 2 and every NumericError to exit
 *  code 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace dlrfem {

//! Caller broke a documented precondition (shape mismatch, bad argument).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

//! Invalid user configuration: unsupported degree, unknown key, bad value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Invalid sampled input: non-finite initial values, points outside domain.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Operation not defined for the requested variant or geometry.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Convergence fit requested on unusable data.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Base for failures of the numerics themselves.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Propagator exponent beyond the representable range.
class OverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

//! Nonlocal multiplier with a vanishing denominator.
class DegenerateStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

//! A time step failed; carries the step index and time in the message.
class StepFailure : public NumericError {
 public:
  StepFailure(int step, double time, const std::string& cause)
      : NumericError("step " + std::to_string(step) + " (t=" + std::to_string(time) + ") failed: " + cause),
        step_(step),
        time_(time) {}
  int step() const { return step_; }
  double time() const { return time_; }

 private:
  int step_;
  double time_;
};

}  // namespace dlrfem
