#pragma once

#include <stdexcept>
#include <string>

namespace isl {

/// Construction of a dynamics/noise model failed (e.g. a factorization that
/// must exist for valid parameters did not).
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical operation lost validity (non-PD covariance, non-positive
/// innovation variance). Carries the epoch at which it happened, or -1 when
/// no epoch applies.
struct NumericalError : std::runtime_error {
  int epoch;
  NumericalError(const std::string& what, int epoch_index = -1)
      : std::runtime_error(what), epoch(epoch_index) {}
};

/// More than the tolerated fraction of Monte Carlo trials aborted.
struct TrialAbortError : std::runtime_error {
  explicit TrialAbortError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isl
