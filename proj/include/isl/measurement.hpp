#pragma once

#include <random>
#include <string>
#include <vector>

#include "isl/types.hpp"

namespace isl {

/// Constant measurement Jacobian rows in scaled-state coordinates.
/// h_d acts on the current epoch, h_d_prev on the previous one (only the
/// phase enters there, with opposite sign), h_r is the ToA row.
struct JacobianSet {
  Row5 h_d;       // [0, 1, 0, 1, kappa]
  Row5 h_d_prev;  // [0, 0, 0, 0, -kappa]
  Row5 h_r;       // [1, 0, 1, 0, 0]
};

JacobianSet jacobians(double kappa);

/// Doppler corruption mechanisms. Impulsive adds a sparse Gaussian jump on
/// top of the nominal noise (cycle-slip proxy); heavy-tail replaces the draw
/// with a wide Gaussian at the mixture probability. ToA is never corrupted.
struct OutlierModel {
  enum class Kind { kNominal, kImpulsive, kHeavyTail };

  Kind kind = Kind::kNominal;
  double probability = 0.0;  // jump / mixture probability
  double scale = 1.0;        // noise-std multiplier of the outlier component

  static OutlierModel nominal() { return {}; }
  static OutlierModel impulsive(double p = 0.05, double a = 300.0) {
    return {Kind::kImpulsive, p, a};
  }
  static OutlierModel heavy_tail(double p = 0.15, double a = 20.0) {
    return {Kind::kHeavyTail, p, a};
  }

  void validate() const;
  std::string name() const;
};

/// One epoch of observables. The outlier flag is simulation ground truth
/// kept for diagnostics only; filters never see it.
struct MeasurementEpoch {
  int k = 0;          // epoch index, >= 1
  double y_r = 0.0;   // ToA pseudorange [m]
  double y_d = 0.0;   // Doppler, range-rate units [m/s]
  bool doppler_outlier = false;
};

/// Noiseless Doppler observable r_dot + u + kappa*(theta_k - theta_{k-1}).
double h_doppler(const ScaledState& prev, const ScaledState& curr, double kappa);
double h_doppler(const Vec5& prev, const Vec5& curr, double kappa);

/// Noiseless ToA pseudorange r + b.
double h_toa(const ScaledState& curr);
double h_toa(const Vec5& curr);

struct DopplerNoise {
  double value = 0.0;
  bool is_outlier = false;
};

/// One Doppler noise draw under the given corruption model.
DopplerNoise sample_doppler_noise(const OutlierModel& model, double sigma_d,
                                  std::mt19937_64& rng);

/// CSV with header k,y_r,y_d,doppler_outlier. meta becomes a leading
/// comment line when non-empty.
void write_measurements_csv(const std::string& path,
                            const std::vector<MeasurementEpoch>& epochs,
                            const std::string& meta = {});
std::vector<MeasurementEpoch> read_measurements_csv(const std::string& path);

}  // namespace isl
