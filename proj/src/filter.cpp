#include "isl/filter.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isl/errors.hpp"
#include "isl/io.hpp"

namespace isl {

std::string FilterVariant::name() const {
  switch (kind) {
    case Kind::kStandard: return "standard";
    case Kind::kGate: return "gate";
    case Kind::kHuber: return "huber";
    case Kind::kHybrid: return "hybrid";
  }
  return "unknown";
}

FilterState FilterState::initial(const ScenarioParams& params) {
  FilterState state;
  state.x_hat.setZero();
  state.p.setZero();
  for (int i = 0; i < kStateDim; ++i) {
    state.p(i, i) = params.p0_diag[static_cast<std::size_t>(i)];
  }
  state.prev_theta_hat = 0.0;
  state.prev_p = state.p;
  state.k = 0;
  return state;
}

Prior predict(const FilterState& state, const DynamicsModel& model) {
  Prior prior;
  prior.x = model.f * state.x_hat;
  Mat5 p = model.f * state.p * model.f.transpose() + model.q;
  prior.p = 0.5 * (p + p.transpose());
  return prior;
}

namespace {

// Scalar-measurement Joseph update. r_eff is the effective measurement
// variance seen by this epoch's state (for the Doppler row it also carries
// the previous-epoch phase term, which acts as extra measurement noise).
void joseph_update(Prior& prior, const Row5& h, double innovation, double s,
                   double r_eff, int epoch, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw NumericalError(std::string(what) + " innovation variance not positive", epoch);
  }
  Vec5 gain = prior.p * h.transpose() / s;
  prior.x += gain * innovation;
  Mat5 ikh = Mat5::Identity() - gain * h;
  Mat5 p = ikh * prior.p * ikh.transpose() + gain * r_eff * gain.transpose();
  prior.p = 0.5 * (p + p.transpose());
}

}  // namespace

void toa_update(Prior& prior, double y_r, double sigma_r) {
  if (!(sigma_r > 0.0)) {
    throw std::invalid_argument("sigma_R must be positive");
  }
  if (!std::isfinite(y_r)) {
    throw std::invalid_argument("non-finite ToA measurement");
  }
  Row5 h_r;
  h_r << 1.0, 0.0, 1.0, 0.0, 0.0;
  const double r2 = sigma_r * sigma_r;
  // The quadratic form is >= 0 in exact arithmetic; clamp out roundoff from
  // ill-conditioned P so S stays a valid variance.
  const double hph = std::max((h_r * prior.p * h_r.transpose())(0, 0), 0.0);
  joseph_update(prior, h_r, y_r - h_toa(prior.x), hph + r2, r2, -1, "ToA");
}

double tasd_innovation(const Vec5& x_prior, double prev_theta_hat, double y_d,
                       double kappa) {
  return y_d - (x_prior[kRangeRate] + x_prior[kClockDrift] +
                kappa * (x_prior[kPhase] - prev_theta_hat));
}

double tasd_innovation_variance(const Mat5& p_prior, const Mat5& p_prev,
                                double sigma_eff_sq, const JacobianSet& jac) {
  if (!(sigma_eff_sq > 0.0)) {
    throw std::invalid_argument("sigma_eff^2 must be positive");
  }
  const double current = std::max((jac.h_d * p_prior * jac.h_d.transpose())(0, 0), 0.0);
  const double previous =
      std::max((jac.h_d_prev * p_prev * jac.h_d_prev.transpose())(0, 0), 0.0);
  return sigma_eff_sq + current + previous;
}

double exact_cross_terms(const Mat5& p_prev, double kappa) {
  return -2.0 * kappa * kappa * p_prev(kPhase, kPhase) -
         2.0 * kappa * (p_prev(kRangeRate, kPhase) + p_prev(kClockDrift, kPhase));
}

double huber_weight(double norm_residual, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("Huber delta must be positive");
  }
  if (norm_residual < 0.0) {
    throw std::invalid_argument("normalized residual must be non-negative");
  }
  return norm_residual <= delta ? 1.0 : delta / norm_residual;
}

UpdateOutcome doppler_update(const FilterVariant& variant, Prior& prior,
                             const FilterState& context, double y_d,
                             double sigma_d, const JacobianSet& jac,
                             const FilterOptions& options) {
  if (!std::isfinite(y_d)) {
    throw std::invalid_argument("non-finite Doppler measurement");
  }
  const double kappa = jac.h_d(0, kPhase);
  const double sd2 = sigma_d * sigma_d;

  const Mat5 p_prev = options.single_epoch_s ? Mat5(Mat5::Zero()) : context.prev_p;

  UpdateOutcome outcome;
  outcome.innovation = tasd_innovation(prior.x, context.prev_theta_hat, y_d, kappa);
  const double s_norm = tasd_innovation_variance(prior.p, p_prev, sd2, jac);
  outcome.norm_residual = std::abs(outcome.innovation) / std::sqrt(s_norm);

  if (variant.gates() && outcome.norm_residual > variant.tau) {
    outcome.rejected = true;
    return outcome;
  }

  double sigma_eff_sq = sd2;
  if (variant.weights()) {
    outcome.weight = huber_weight(outcome.norm_residual, variant.delta);
    sigma_eff_sq = sd2 / outcome.weight;
  }
  const double s = tasd_innovation_variance(prior.p, p_prev, sigma_eff_sq, jac);
  const double prev_term =
      std::max((jac.h_d_prev * p_prev * jac.h_d_prev.transpose())(0, 0), 0.0);
  joseph_update(prior, jac.h_d, outcome.innovation, s, sigma_eff_sq + prev_term,
                context.k + 1, "Doppler");
  return outcome;
}

std::vector<EpochRecord> run_filter(const Trajectory& truth,
                                    const std::vector<MeasurementEpoch>& measurements,
                                    const FilterVariant& variant,
                                    const DynamicsModel& model,
                                    const ScenarioParams& params,
                                    const FilterOptions& options) {
  if (truth.n_epochs() < 2) {
    throw std::invalid_argument("run_filter needs at least 2 epochs of truth");
  }
  if (static_cast<int>(measurements.size()) != truth.n_epochs() - 1) {
    throw std::invalid_argument("measurement stream must cover epochs 1..n-1");
  }

  const double kappa = kappa_theta(params);
  const JacobianSet jac = jacobians(kappa);

  FilterState state = FilterState::initial(params);

  std::vector<EpochRecord> records;
  records.reserve(truth.states.size());

  EpochRecord first;
  first.k = 0;
  first.x_hat = state.x_hat;
  first.error = state.x_hat - truth.states[0];
  first.p = state.p;
  first.p_diag = state.p.diagonal();
  records.push_back(first);

  for (const MeasurementEpoch& meas : measurements) {
    Prior prior = predict(state, model);

    EpochRecord rec;
    rec.k = meas.k;
    rec.has_doppler = true;
    try {
      toa_update(prior, meas.y_r, params.sigma_r);
      rec.delta_s = exact_cross_terms(state.prev_p, kappa);
      rec.s = tasd_innovation_variance(
          prior.p, options.single_epoch_s ? Mat5(Mat5::Zero()) : state.prev_p,
          params.sigma_d * params.sigma_d, jac);
      rec.doppler = doppler_update(variant, prior, state, meas.y_d, params.sigma_d,
                                   jac, options);
    } catch (const NumericalError& err) {
      throw err.epoch >= 0 ? err : NumericalError(err.what(), meas.k);
    }

    // Posterior bookkeeping: the previous-epoch phase/covariance roll
    // forward to this epoch's posterior whether or not the Doppler row was
    // accepted; the previous phase estimate itself is never re-updated.
    state.x_hat = prior.x;
    state.p = prior.p;
    state.prev_theta_hat = state.x_hat[kPhase];
    state.prev_p = state.p;
    state.k = meas.k;

    rec.x_hat = state.x_hat;
    rec.error = state.x_hat - truth.states[static_cast<std::size_t>(meas.k)];
    rec.p = state.p;
    rec.p_diag = state.p.diagonal();
    records.push_back(rec);
  }
  return records;
}

void write_trial_diagnostics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<EpochRecord>>>& runs,
    const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) {
    out << meta << "\n";
  }
  out << "k,variant,err_R,err_Rdot,err_b,err_u,err_theta,r_tilde,outcome,weight\n";
  for (const auto& [name, records] : runs) {
    for (const auto& rec : records) {
      if (!rec.has_doppler) {
        continue;
      }
      out << rec.k << "," << name;
      for (int i = 0; i < kStateDim; ++i) {
        out << "," << fmt_double(rec.error[i]);
      }
      out << "," << fmt_double(rec.doppler.norm_residual) << ","
          << (rec.doppler.rejected ? "rejected" : "accepted") << ","
          << fmt_double(rec.doppler.rejected ? 0.0 : rec.doppler.weight) << "\n";
    }
  }
  write_text_file(path, out.str());
}

}  // namespace isl
