#pragma once

#include <vector>

#include "isl/dynamics.hpp"
#include "isl/measurement.hpp"
#include "isl/scenario.hpp"

namespace isl {

/// Cross-epoch Fisher information blocks of the joint (x_{k-1}, x_k) state.
/// The Doppler observable ties the two epochs together through the phase
/// difference; ToA contributes to the current epoch only.
struct FimBlocks {
  Mat5 j_mm = Mat5::Zero();  // previous/previous
  Mat5 j_mp = Mat5::Zero();  // previous/current
  Mat5 j_pp = Mat5::Zero();  // current/current
};

FimBlocks fim_blocks(const ScenarioParams& params);

/// Same blocks with an explicit coupling coefficient (kappa = 0 removes the
/// phase rows entirely and reproduces the decoupled system).
FimBlocks fim_blocks(const ScenarioParams& params, double kappa);

/// Time-invariant blocks of the information recursion.
struct DBlocks {
  Mat5 d11;
  Mat5 d12;  // d21 = d12^T
  Mat5 d22;
};

/// D11 = F^T Q^-1 F + J--, D12 = -F^T Q^-1 + J-+, D22 = Q^-1 + J++.
/// Throws ModelError when Q is singular.
DBlocks d_blocks(const DynamicsModel& model, const FimBlocks& blocks);

/// Posterior information and marginal variances per epoch.
struct PcrbEpoch {
  Mat5 info;      // J_k, symmetric positive definite
  Vec5 variance;  // diagonal of J_k^-1 (the bound on per-state MSE)
};

struct PcrbTrajectory {
  std::vector<PcrbEpoch> epochs;

  int n_epochs() const { return static_cast<int>(epochs.size()); }
};

/// Information recursion J_{k+1} = D22 - D21 (J_k + D11)^-1 D12 from the
/// given prior information J0, each step symmetrized and checked positive
/// definite. Throws NumericalError with the epoch index on failure.
PcrbTrajectory pcrb_recursion(const DynamicsModel& model, const FimBlocks& blocks,
                              const Mat5& j0, int n_epochs);

/// Prior information diag(p0)^-1 matching the filter initialization.
Mat5 default_prior_information(const ScenarioParams& params);

/// Scalar phase-information recursion j_{k+1} = j_k q^-1 / (j_k + q^-1) that
/// the decoupled (kappa = 0) system follows exactly. Index 0 is j0.
std::vector<double> phase_scalar_recursion(double j0, double q_theta, int n);

/// lambda_min(J_k) per epoch via symmetric eigensolve.
std::vector<double> min_eigenvalue_series(const PcrbTrajectory& traj);

}  // namespace isl
