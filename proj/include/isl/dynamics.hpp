#pragma once

#include <optional>

#include "isl/scenario.hpp"
#include "isl/types.hpp"

namespace isl {

/// Discrete-time state-space model: two position/rate integrator blocks
/// (range, clock) plus a random-walk phase. Immutable after construction.
struct DynamicsModel {
  Mat5 f = Mat5::Identity();  // state transition
  Mat5 q = Mat5::Zero();      // process noise covariance
  double t = 0.0;             // step [s]

  // Cached factors. q_inv is absent when Q is singular (e.g. sigma_a = 0);
  // q_sqrt is the symmetric PSD square root used to draw process noise.
  std::optional<Mat5> q_inv;
  Mat5 q_sqrt = Mat5::Zero();

  /// Q^-1, or ModelError when Q is singular.
  const Mat5& q_inverse() const;
};

/// Transition matrix for step T: integrator blocks on (R,Rdot) and (b,u),
/// identity on theta.
Mat5 make_transition(double t);

/// Process noise for step T: blkdiag(Q_R, Q_b, q_theta) with the random
/// acceleration block, the two-state Allan clock block scaled by c^2, and
/// the Wiener phase increment 2*pi*beta*T.
Mat5 make_process_noise(const ScenarioParams& params, double t);

/// Full model at the scenario's coherent interval.
DynamicsModel build_dynamics(const ScenarioParams& params);

}  // namespace isl
