#pragma once

#include <stdexcept>
#include <string>

namespace lzchain {

/// Rejected input. `field()` names the offending parameter so front ends can
/// report it verbatim.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A mode with vanishing quasiparticle energy was hit while strict gapless
/// handling was requested.
class GaplessModeError : public std::runtime_error {
 public:
  GaplessModeError(int k, double lambda)
      : std::runtime_error("gapless mode at k=" + std::to_string(k) +
                           ", lambda=" + std::to_string(lambda)),
        k_(k),
        lambda_(lambda) {}

  int k() const noexcept { return k_; }
  double lambda() const noexcept { return lambda_; }

 private:
  int k_;
  double lambda_;
};

class DimensionCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class NormBudgetExceeded : public std::runtime_error {
 public:
  NormBudgetExceeded(double drift, double budget)
      : std::runtime_error("norm drift " + std::to_string(drift) +
                           " exceeds budget " + std::to_string(budget)),
        drift_(drift) {}

  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

class NonConvergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lzchain
