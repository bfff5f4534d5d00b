#pragma once

#include <array>
#include <string>

namespace isl {

/// Speed of light [m/s]. Overridable per scenario so the b = c*delta unit
/// scaling stays testable.
constexpr double kSpeedOfLight = 2.99792458e8;

/// Scenario constants for a single Ka-band inter-satellite link.
/// Defaults reproduce the baseline simulation setup.
struct ScenarioParams {
  double f_c = 26e9;       // carrier frequency [Hz]
  double t_coh = 0.1;      // coherent integration interval [s]
  double sigma_d = 0.03;   // Doppler noise std, range-rate units [m/s]
  double sigma_r = 0.03;   // ToA pseudorange noise std [m]
  double beta = 100.0;     // phase-noise 3-dB linewidth [Hz]
  double h0 = 2.2e-25;     // Allan white-frequency coefficient [s]
  double h_m2 = 1.6e-24;   // Allan random-walk coefficient [1/s]
  double sigma_a = 0.1;    // random acceleration std [m/s^2]
  double c = kSpeedOfLight;

  // Initial covariance diagonal [m^2, m^2/s^2, m^2, m^2/s^2, rad^2].
  std::array<double, 5> p0_diag{100.0, 1.0, 100.0, 1.0, 1.0};

  /// Throws std::invalid_argument when any constant is out of range.
  void validate() const;
};

/// White / random-walk frequency-noise spectral densities derived from the
/// Allan power-law coefficients: s_f = h0/2, s_g = 2*pi^2*h_m2.
struct AllanSpectral {
  double s_f = 0.0;
  double s_g = 0.0;
};

AllanSpectral allan_spectral(const ScenarioParams& params);

/// Phase-to-range-rate coupling coefficient c / (2*pi*f_c*T_coh) [m/s/rad].
/// This is the gain with which a carrier-phase increment shows up in the
/// range-rate-equivalent Doppler observable.
double kappa_theta(const ScenarioParams& params);

/// Flat key-value JSON (field names as above); missing keys keep defaults,
/// unknown keys are rejected.
ScenarioParams load_params(const std::string& path);
std::string params_to_json(const ScenarioParams& params);

}  // namespace isl
