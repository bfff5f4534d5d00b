#include "isl/pcrb.hpp"

#include <stdexcept>

#include "isl/errors.hpp"

namespace isl {

FimBlocks fim_blocks(const ScenarioParams& params) {
  return fim_blocks(params, kappa_theta(params));
}

FimBlocks fim_blocks(const ScenarioParams& params, double kappa) {
  if (!(params.sigma_d > 0.0) || !(params.sigma_r > 0.0)) {
    throw std::invalid_argument("fim_blocks needs positive noise stds");
  }
  const JacobianSet jac = jacobians(kappa);
  const double inv_sd2 = 1.0 / (params.sigma_d * params.sigma_d);
  const double inv_sr2 = 1.0 / (params.sigma_r * params.sigma_r);

  FimBlocks blocks;
  blocks.j_mm = inv_sd2 * jac.h_d_prev.transpose() * jac.h_d_prev;
  blocks.j_mp = inv_sd2 * jac.h_d_prev.transpose() * jac.h_d;
  blocks.j_pp = inv_sd2 * jac.h_d.transpose() * jac.h_d +
                inv_sr2 * jac.h_r.transpose() * jac.h_r;
  return blocks;
}

DBlocks d_blocks(const DynamicsModel& model, const FimBlocks& blocks) {
  const Mat5& q_inv = model.q_inverse();
  DBlocks d;
  d.d11 = model.f.transpose() * q_inv * model.f + blocks.j_mm;
  d.d12 = -model.f.transpose() * q_inv + blocks.j_mp;
  d.d22 = q_inv + blocks.j_pp;
  d.d11 = 0.5 * (d.d11 + d.d11.transpose()).eval();
  d.d22 = 0.5 * (d.d22 + d.d22.transpose()).eval();
  return d;
}

Mat5 default_prior_information(const ScenarioParams& params) {
  Mat5 j0 = Mat5::Zero();
  for (int i = 0; i < kStateDim; ++i) {
    const double p = params.p0_diag[static_cast<std::size_t>(i)];
    if (!(p > 0.0)) {
      throw std::invalid_argument("p0_diag entries must be positive");
    }
    j0(i, i) = 1.0 / p;
  }
  return j0;
}

namespace {

// SPD inverse with a one-shot diagonal jitter before giving up.
Mat5 spd_inverse(const Mat5& a, int epoch, const char* what) {
  Eigen::LLT<Mat5> llt(a);
  if (llt.info() == Eigen::Success) {
    return llt.solve(Mat5::Identity());
  }
  const double jitter = 1e-12 * a.trace() / 5.0;
  Mat5 aj = a + jitter * Mat5::Identity();
  Eigen::LLT<Mat5> llt2(aj);
  if (llt2.info() == Eigen::Success) {
    return llt2.solve(Mat5::Identity());
  }
  throw NumericalError(std::string(what) + " lost positive definiteness", epoch);
}

}  // namespace

PcrbTrajectory pcrb_recursion(const DynamicsModel& model, const FimBlocks& blocks,
                              const Mat5& j0, int n_epochs) {
  if (n_epochs < 1) {
    throw std::invalid_argument("pcrb_recursion needs n_epochs >= 1");
  }
  const DBlocks d = d_blocks(model, blocks);

  PcrbTrajectory traj;
  traj.epochs.reserve(static_cast<std::size_t>(n_epochs));

  Mat5 j = 0.5 * (j0 + j0.transpose());
  for (int k = 0; k < n_epochs; ++k) {
    PcrbEpoch epoch;
    epoch.info = j;
    Mat5 p = spd_inverse(j, k, "posterior information");
    epoch.variance = p.diagonal();
    traj.epochs.push_back(epoch);

    if (k + 1 < n_epochs) {
      Mat5 inner = spd_inverse(j + d.d11, k, "information recursion inner term");
      Mat5 next = d.d22 - d.d12.transpose() * inner * d.d12;
      j = 0.5 * (next + next.transpose());
    }
  }
  return traj;
}

std::vector<double> phase_scalar_recursion(double j0, double q_theta, int n) {
  if (!(j0 >= 0.0) || !(q_theta > 0.0)) {
    throw std::invalid_argument("phase_scalar_recursion needs j0 >= 0 and q_theta > 0");
  }
  std::vector<double> seq;
  seq.reserve(static_cast<std::size_t>(n));
  const double q_inv = 1.0 / q_theta;
  double j = j0;
  for (int k = 0; k < n; ++k) {
    seq.push_back(j);
    j = j * q_inv / (j + q_inv);
  }
  return seq;
}

std::vector<double> min_eigenvalue_series(const PcrbTrajectory& traj) {
  std::vector<double> series;
  series.reserve(traj.epochs.size());
  for (const auto& epoch : traj.epochs) {
    Eigen::SelfAdjointEigenSolver<Mat5> eig(epoch.info);
    series.push_back(eig.eigenvalues().minCoeff());
  }
  return series;
}

}  // namespace isl
