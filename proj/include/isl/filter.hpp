#pragma once

#include <string>
#include <vector>

#include "isl/dynamics.hpp"
#include "isl/measurement.hpp"
#include "isl/truth.hpp"

namespace isl {

/// Estimator variants compared in the study. tau is the hard-gate threshold
/// and delta the Huber threshold, both in normalized-residual units.
struct FilterVariant {
  enum class Kind { kStandard, kGate, kHuber, kHybrid };

  Kind kind = Kind::kStandard;
  double tau = 0.0;
  double delta = 0.0;

  static FilterVariant standard() { return {Kind::kStandard, 0.0, 0.0}; }
  static FilterVariant gate(double tau = 3.0) { return {Kind::kGate, tau, 0.0}; }
  static FilterVariant huber(double delta = 1.5) { return {Kind::kHuber, 0.0, delta}; }
  static FilterVariant hybrid(double tau = 4.0, double delta = 1.5) {
    return {Kind::kHybrid, tau, delta};
  }

  bool gates() const { return kind == Kind::kGate || kind == Kind::kHybrid; }
  bool weights() const { return kind == Kind::kHuber || kind == Kind::kHybrid; }
  std::string name() const;
};

struct FilterOptions {
  // Ablation: drop the previous-epoch phase term from the Doppler innovation
  // variance, as a single-epoch implementation would.
  bool single_epoch_s = false;
};

/// Posterior at epoch k plus the previous-epoch quantities the cross-epoch
/// Doppler innovation needs.
struct FilterState {
  Vec5 x_hat = Vec5::Zero();
  Mat5 p = Mat5::Zero();
  double prev_theta_hat = 0.0;  // phase of the epoch k-1 posterior
  Mat5 prev_p = Mat5::Zero();   // epoch k-1 posterior covariance
  int k = 0;

  /// Zero estimate with covariance diag(p0): the truth prior.
  static FilterState initial(const ScenarioParams& params);
};

/// Predicted mean/covariance before the epoch's measurement updates.
struct Prior {
  Vec5 x = Vec5::Zero();
  Mat5 p = Mat5::Zero();
};

/// Result of one Doppler update decision.
struct UpdateOutcome {
  bool rejected = false;
  double weight = 1.0;         // Huber weight actually applied, in (0,1]
  double innovation = 0.0;     // r [m/s]
  double norm_residual = 0.0;  // |r|/sqrt(S), dimensionless
};

/// Time update x^- = F x, P^- = F P F^T + Q (symmetrized).
Prior predict(const FilterState& state, const DynamicsModel& model);

/// Scalar ToA update with Joseph-form covariance. Throws NumericalError on
/// non-positive innovation variance.
void toa_update(Prior& prior, double y_r, double sigma_r);

/// Doppler innovation r = y_d - (r_dot^- + u^- + kappa (theta^- - theta_{k-1})).
double tasd_innovation(const Vec5& x_prior, double prev_theta_hat, double y_d,
                       double kappa);

/// Innovation variance including the previous-epoch phase term:
/// S = sigma_eff^2 + H_D P^- H_D^T + H_D^- P_prev (H_D^-)^T.
double tasd_innovation_variance(const Mat5& p_prior, const Mat5& p_prev,
                                double sigma_eff_sq, const JacobianSet& jac);

/// Exact innovation-covariance cross terms (diagnostic only, never applied):
/// dS = -2 kappa^2 [P_prev]_tt - 2 kappa ([P_prev]_{rdot,t} + [P_prev]_{u,t}).
double exact_cross_terms(const Mat5& p_prev, double kappa);

/// w = 1 for |r~| <= delta, else delta/|r~|.
double huber_weight(double norm_residual, double delta);

/// Robust Doppler update per variant: normalize with sigma_eff = sigma_d,
/// gate, then (for weighting variants) inflate the effective noise by the
/// Huber weight and update with the recomputed variance. On rejection the
/// prior passes through unchanged.
UpdateOutcome doppler_update(const FilterVariant& variant, Prior& prior,
                             const FilterState& context, double y_d,
                             double sigma_d, const JacobianSet& jac,
                             const FilterOptions& options = {});

/// Everything recorded about one processed epoch.
struct EpochRecord {
  int k = 0;
  Vec5 x_hat = Vec5::Zero();
  Vec5 error = Vec5::Zero();  // x_hat - truth
  Vec5 p_diag = Vec5::Zero();
  Mat5 p = Mat5::Zero();
  UpdateOutcome doppler;
  double s = 0.0;        // innovation variance used for normalization
  double delta_s = 0.0;  // exact cross terms (diagnostic)
  bool has_doppler = false;
};

/// Runs predict -> ToA update -> Doppler update over the measurement stream
/// and records errors against the truth. Record 0 is the initial posterior.
std::vector<EpochRecord> run_filter(const Trajectory& truth,
                                    const std::vector<MeasurementEpoch>& measurements,
                                    const FilterVariant& variant,
                                    const DynamicsModel& model,
                                    const ScenarioParams& params,
                                    const FilterOptions& options = {});

/// Per-trial diagnostic CSV:
/// k,variant,err_R,err_Rdot,err_b,err_u,err_theta,r_tilde,outcome,weight.
void write_trial_diagnostics_csv(const std::string& path,
                                 const std::vector<std::pair<std::string, std::vector<EpochRecord>>>& runs,
                                 const std::string& meta = {});

}  // namespace isl
