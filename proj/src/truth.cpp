#include "isl/truth.hpp"

#include <sstream>
#include <stdexcept>

#include "isl/io.hpp"

namespace isl {

Trajectory simulate_truth(const ScenarioParams& params, const DynamicsModel& model,
                          int n_epochs, const SeedSpec& seed,
                          const std::optional<Vec5>& x0) {
  if (n_epochs < 2) {
    throw std::invalid_argument("a trajectory needs at least 2 epochs");
  }

  std::mt19937_64 rng = make_stream(seed, StreamLabel::kProcess);
  std::normal_distribution<double> unit(0.0, 1.0);

  Trajectory traj;
  traj.params = params;
  traj.states.resize(n_epochs);

  if (x0) {
    traj.states[0] = *x0;
  } else {
    Vec5 z;
    for (int i = 0; i < kStateDim; ++i) {
      z[i] = unit(rng);
    }
    Vec5 sd;
    for (int i = 0; i < kStateDim; ++i) {
      sd[i] = std::sqrt(params.p0_diag[static_cast<std::size_t>(i)]);
    }
    traj.states[0] = sd.cwiseProduct(z);
  }

  for (int k = 1; k < n_epochs; ++k) {
    Vec5 z;
    for (int i = 0; i < kStateDim; ++i) {
      z[i] = unit(rng);
    }
    traj.states[k] = model.f * traj.states[k - 1] + model.q_sqrt * z;
  }
  return traj;
}

std::vector<MeasurementEpoch> generate_measurements(const Trajectory& traj,
                                                    const OutlierModel& outliers,
                                                    const SeedSpec& seed) {
  if (traj.n_epochs() < 2) {
    throw std::invalid_argument("trajectory too short for measurements");
  }
  const double kappa = kappa_theta(traj.params);
  const double sigma_r = traj.params.sigma_r;
  const double sigma_d = traj.params.sigma_d;

  std::mt19937_64 rng = make_stream(seed, StreamLabel::kMeasurement);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<MeasurementEpoch> epochs;
  epochs.reserve(static_cast<std::size_t>(traj.n_epochs()) - 1);
  for (int k = 1; k < traj.n_epochs(); ++k) {
    MeasurementEpoch m;
    m.k = k;
    m.y_r = h_toa(traj.states[k]) + sigma_r * unit(rng);
    DopplerNoise noise = sample_doppler_noise(outliers, sigma_d, rng);
    m.y_d = h_doppler(traj.states[k - 1], traj.states[k], kappa) + noise.value;
    m.doppler_outlier = noise.is_outlier;
    epochs.push_back(m);
  }
  return epochs;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) {
    out << meta << "\n";
  }
  out << "k,r,r_dot,b,u,theta\n";
  for (int k = 0; k < traj.n_epochs(); ++k) {
    const Vec5& x = traj.states[k];
    out << k;
    for (int i = 0; i < kStateDim; ++i) {
      out << "," << fmt_double(x[i]);
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace isl
