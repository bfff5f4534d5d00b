#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace isl {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Row5 = Eigen::Matrix<double, 1, 5>;

constexpr int kStateDim = 5;

// Fixed state layout: [R, Rdot, b, u, theta].
enum StateIndex : int {
  kRange = 0,
  kRangeRate = 1,
  kClockBias = 2,
  kClockDrift = 3,
  kPhase = 4,
};

/// Scaled link state. Clock terms are carried in range units (b = c*delta,
/// u = c*delta_dot) so all position-like entries are meters and all
/// rate-like entries are m/s. theta is accumulated carrier phase in rad,
/// never wrapped.
struct ScaledState {
  double r = 0.0;      // inter-satellite range [m]
  double r_dot = 0.0;  // range rate [m/s]
  double b = 0.0;      // clock bias, range-equivalent [m]
  double u = 0.0;      // clock drift, range-rate-equivalent [m/s]
  double theta = 0.0;  // carrier phase [rad]

  Vec5 vec() const {
    Vec5 x;
    x << r, r_dot, b, u, theta;
    return x;
  }

  static ScaledState from_vec(const Vec5& x) {
    return ScaledState{x[kRange], x[kRangeRate], x[kClockBias], x[kClockDrift], x[kPhase]};
  }

  bool all_finite() const {
    return std::isfinite(r) && std::isfinite(r_dot) && std::isfinite(b) &&
           std::isfinite(u) && std::isfinite(theta);
  }
};

}  // namespace isl
