#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isl/dynamics.hpp"
#include "isl/measurement.hpp"
#include "isl/rng.hpp"
#include "isl/scenario.hpp"

namespace isl {

/// Ground-truth state sequence for one trial, epochs 0..n-1.
struct Trajectory {
  std::vector<Vec5> states;
  ScenarioParams params;

  int n_epochs() const { return static_cast<int>(states.size()); }
};

/// Simulates x_{k+1} = F x_k + w_k with w_k ~ N(0, Q) drawn through the
/// symmetric square root of Q. x0 is N(0, diag(p0)) unless given explicitly.
/// Deterministic for a given seed; uses the process sub-stream only.
Trajectory simulate_truth(const ScenarioParams& params, const DynamicsModel& model,
                          int n_epochs, const SeedSpec& seed,
                          const std::optional<Vec5>& x0 = std::nullopt);

/// Measurements for epochs 1..n-1 (the Doppler observable needs the
/// previous phase, so epoch 0 carries none). Noise comes from the
/// measurement sub-stream, disjoint from the trajectory draws.
std::vector<MeasurementEpoch> generate_measurements(const Trajectory& traj,
                                                    const OutlierModel& outliers,
                                                    const SeedSpec& seed);

/// CSV with header k,r,r_dot,b,u,theta.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& meta = {});

}  // namespace isl
