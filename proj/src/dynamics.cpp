#include "isl/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "isl/errors.hpp"

namespace isl {

const Mat5& DynamicsModel::q_inverse() const {
  if (!q_inv) {
    throw ModelError("process noise covariance is singular; Q^-1 unavailable");
  }
  return *q_inv;
}

Mat5 make_transition(double t) {
  Mat5 f = Mat5::Identity();
  f(kRange, kRangeRate) = t;
  f(kClockBias, kClockDrift) = t;
  return f;
}

Mat5 make_process_noise(const ScenarioParams& params, double t) {
  constexpr double pi = std::numbers::pi;
  const double t2 = t * t;
  const double t3 = t2 * t;

  Mat5 q = Mat5::Zero();

  // Random-acceleration range block.
  const double sa2 = params.sigma_a * params.sigma_a;
  q(kRange, kRange) = sa2 * t3 / 3.0;
  q(kRange, kRangeRate) = sa2 * t2 / 2.0;
  q(kRangeRate, kRange) = q(kRange, kRangeRate);
  q(kRangeRate, kRangeRate) = sa2 * t;

  // Two-state clock block from the Allan coefficients, scaled to range units.
  const AllanSpectral s = allan_spectral(params);
  const double c2 = params.c * params.c;
  q(kClockBias, kClockBias) = c2 * (s.s_f * t + s.s_g * t3 / 3.0);
  q(kClockBias, kClockDrift) = c2 * s.s_g * t2 / 2.0;
  q(kClockDrift, kClockBias) = q(kClockBias, kClockDrift);
  q(kClockDrift, kClockDrift) = c2 * s.s_g * t;

  // Wiener phase increment.
  q(kPhase, kPhase) = 2.0 * pi * params.beta * t;

  return q;
}

DynamicsModel build_dynamics(const ScenarioParams& params) {
  params.validate();

  DynamicsModel model;
  model.t = params.t_coh;
  model.f = make_transition(model.t);
  model.q = make_process_noise(params, model.t);

  // Symmetric PSD square root for process-noise sampling. Q is exactly
  // symmetric by construction, so the self-adjoint solver applies.
  Eigen::SelfAdjointEigenSolver<Mat5> eig(model.q);
  if (eig.info() != Eigen::Success) {
    throw ModelError("eigendecomposition of Q failed");
  }
  Vec5 ev = eig.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  for (int i = 0; i < kStateDim; ++i) {
    if (ev[i] < -1e-12 * scale) {
      throw ModelError("process noise covariance is not positive semidefinite");
    }
    ev[i] = std::max(ev[i], 0.0);
  }
  model.q_sqrt = eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                 eig.eigenvectors().transpose();

  // Cache Q^-1 when Q is nonsingular. Its entries span ~10 orders of
  // magnitude (clock block vs phase).
  if (ev.minCoeff() > 0.0) {
    Eigen::LLT<Mat5> llt(model.q);
    if (llt.info() == Eigen::Success) {
      model.q_inv = llt.solve(Mat5::Identity());
    }
  }
  return model;
}

}  // namespace isl
