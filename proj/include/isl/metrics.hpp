#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "isl/filter.hpp"
#include "isl/pcrb.hpp"

namespace isl {

struct MonteCarloConfig {
  int n_trials = 500;
  int n_epochs = 100;
  int steady_start = 20;  // metrics pool epochs k >= steady_start
  std::uint64_t master_seed = 12;
  OutlierModel scenario = OutlierModel::nominal();
  std::vector<FilterVariant> variants{
      FilterVariant::standard(), FilterVariant::gate(), FilterVariant::huber(),
      FilterVariant::hybrid()};
  ScenarioParams params;
  FilterOptions filter_options;
  int workers = 1;

  void validate() const;
};

struct TrialAbort {
  int trial = 0;
  int epoch = 0;
  std::string cause;
};

/// Aggregated results for one filter variant.
struct VariantMetrics {
  std::string name;
  std::array<double, 5> rmse{};        // pooled over trials x epochs k >= steady
  std::array<double, 5> rmse_final{};  // across trials at the last epoch
  std::array<double, 5> eta{};         // pooled RMSE / pooled sqrt(PCRB)
  double p95_phase = 0.0;              // 95th pct of |phase error|, pooled
  double reduction_pct = 0.0;          // p95 reduction vs the standard EKF
  double pcrb_violation_rate = 0.0;    // phase, steady-state epochs
  double rejection_rate = 0.0;         // rejected / attempted Doppler updates
  double mean_abs_ds_over_s = 0.0;     // steady-state |dS|/S diagnostic
  std::vector<double> cdf_error;       // thinned |phase error| CDF support
  std::vector<double> cdf_prob;
};

struct MetricsReport {
  std::string version;
  std::uint64_t master_seed = 0;
  std::string scenario;
  std::string pooling;  // protocol note, e.g. "trials x epochs, k >= 20"
  int n_trials = 0;
  int n_epochs = 0;
  int steady_start = 0;
  bool single_epoch_s = false;
  std::array<double, 5> sqrt_pcrb_pooled{};
  std::array<double, 5> sqrt_pcrb_final{};
  std::vector<VariantMetrics> variants;
  std::vector<TrialAbort> aborts;

  const VariantMetrics& variant(const std::string& name) const;
};

/// Paired Monte Carlo study: every variant consumes the identical
/// measurement stream of each trial. Deterministic in master_seed and
/// independent of the worker count. Throws NumericalError when more than 1%
/// of trials abort.
MetricsReport run_monte_carlo(const MonteCarloConfig& config);

/// sqrt(mean of squares) of a pooled error sample. Errors on an empty pool.
double compute_rmse(std::span<const double> errors);

/// Efficiency per state: pooled RMSE / sqrt(mean steady-state PCRB).
std::array<double, 5> compute_efficiency(const std::array<double, 5>& rmse,
                                         const PcrbTrajectory& pcrb,
                                         int steady_start);

/// 95th percentile with linear interpolation between order statistics.
/// Requires at least 20 samples.
double compute_p95(std::vector<double> abs_errors);

/// Fraction of steady-state epochs whose across-trial phase MSE falls below
/// the phase PCRB.
double pcrb_violation_rate(std::span<const double> per_epoch_phase_mse,
                           const PcrbTrajectory& pcrb, int steady_start);

/// 100 * (1 - p95_variant / p95_standard) per variant.
std::vector<std::pair<std::string, double>> reduction_vs_baseline(const MetricsReport& report);

// --- serialization ---

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);
void write_report(const std::string& path, const MetricsReport& report);
MetricsReport load_report(const std::string& path);

void write_table2_csv(const std::string& path, const MetricsReport& report,
                      const std::string& meta);
void write_p95_summary_csv(const std::string& path, const MetricsReport& report,
                           const std::string& meta);
/// cdf_<scenario>_<variant>.csv files with header error_rad,cum_prob.
void write_cdf_csvs(const std::string& out_dir, const MetricsReport& report,
                    const std::string& meta);

}  // namespace isl
