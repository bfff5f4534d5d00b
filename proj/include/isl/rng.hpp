#pragma once

#include <cstdint>
#include <random>

namespace isl {

/// (master seed, trial index) uniquely determines every random draw of a
/// trial. Sub-streams for different purposes are split off with a label so
/// e.g. the measurement noise can change without touching the trajectory.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

enum class StreamLabel : std::uint64_t {
  kProcess = 1,      // initial state + process noise
  kMeasurement = 2,  // ToA/Doppler noise and outlier draws
};

/// Deterministic generator for (seed, trial, label). Distinct labels give
/// statistically independent streams under the same SeedSpec.
std::mt19937_64 make_stream(const SeedSpec& seed, StreamLabel label);

}  // namespace isl
