#pragma once

#include <stdexcept>
#include <string>

namespace malthus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure stopped before meeting its tolerance. The best
/// estimate reached so far is kept so callers can decide what to do with it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// Failure while simulating a branching tree (capacity, rejection budget).
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace malthus
