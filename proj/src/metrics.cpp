#include "isl/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "isl/errors.hpp"
#include "isl/io.hpp"

namespace isl {

namespace {

using nlohmann::ordered_json;

// Everything a single trial contributes to the aggregate, independent of
// execution order.
struct TrialSummary {
  bool aborted = false;
  int abort_epoch = 0;
  std::string abort_cause;

  // Per variant, in config order.
  struct PerVariant {
    std::array<double, 5> sq_err_sum{};  // pooled over steady epochs
    long long pooled_count = 0;          // epochs contributing above
    std::array<double, 5> final_sq_err{};
    std::vector<double> abs_phase_err;      // steady epochs, for p95/CDF
    std::vector<double> phase_sq_by_epoch;  // all epochs, for violation rate
    long long doppler_total = 0;
    long long doppler_rejected = 0;
    double ds_over_s_sum = 0.0;
    long long ds_over_s_count = 0;
  };
  std::vector<PerVariant> variants;
};

TrialSummary run_trial(const MonteCarloConfig& config, const DynamicsModel& model,
                       std::uint64_t trial) {
  TrialSummary summary;
  summary.variants.resize(config.variants.size());

  const SeedSpec seed{config.master_seed, trial};
  const Trajectory truth = simulate_truth(config.params, model, config.n_epochs, seed);
  const std::vector<MeasurementEpoch> stream =
      generate_measurements(truth, config.scenario, seed);

  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    auto& out = summary.variants[v];
    std::vector<EpochRecord> records;
    try {
      records = run_filter(truth, stream, config.variants[v], model, config.params,
                           config.filter_options);
    } catch (const NumericalError& err) {
      summary.aborted = true;
      summary.abort_epoch = err.epoch;
      summary.abort_cause = err.what();
      return summary;
    }

    out.phase_sq_by_epoch.resize(records.size());
    for (const EpochRecord& rec : records) {
      const double phase_err = rec.error[kPhase];
      out.phase_sq_by_epoch[static_cast<std::size_t>(rec.k)] = phase_err * phase_err;
      if (rec.has_doppler) {
        ++out.doppler_total;
        if (rec.doppler.rejected) {
          ++out.doppler_rejected;
        }
      }
      if (rec.k >= config.steady_start) {
        for (int i = 0; i < kStateDim; ++i) {
          out.sq_err_sum[static_cast<std::size_t>(i)] += rec.error[i] * rec.error[i];
        }
        ++out.pooled_count;
        out.abs_phase_err.push_back(std::abs(phase_err));
        if (rec.has_doppler && rec.s > 0.0) {
          out.ds_over_s_sum += std::abs(rec.delta_s) / rec.s;
          ++out.ds_over_s_count;
        }
      }
      if (rec.k == config.n_epochs - 1) {
        for (int i = 0; i < kStateDim; ++i) {
          out.final_sq_err[static_cast<std::size_t>(i)] = rec.error[i] * rec.error[i];
        }
      }
    }
  }
  return summary;
}

std::vector<double> thin_cdf(const std::vector<double>& sorted_abs, int n_points) {
  // Quantile grid over the sorted pool; keeps report.json small while the
  // full-resolution CDF goes to the per-variant CSV.
  std::vector<double> grid;
  if (sorted_abs.empty()) {
    return grid;
  }
  grid.reserve(static_cast<std::size_t>(n_points) + 1);
  const std::size_t n = sorted_abs.size();
  for (int i = 0; i <= n_points; ++i) {
    const double pos = static_cast<double>(i) / n_points * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    grid.push_back(sorted_abs[lo] + frac * (sorted_abs[hi] - sorted_abs[lo]));
  }
  return grid;
}

}  // namespace

void MonteCarloConfig::validate() const {
  params.validate();
  scenario.validate();
  if (n_trials < 1) {
    throw std::invalid_argument("n_trials must be >= 1");
  }
  if (n_epochs < 2) {
    throw std::invalid_argument("n_epochs must be >= 2");
  }
  if (steady_start < 0 || steady_start >= n_epochs) {
    throw std::invalid_argument("steady_start must lie in [0, n_epochs)");
  }
  if (variants.empty()) {
    throw std::invalid_argument("at least one filter variant is required");
  }
  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
}

const VariantMetrics& MetricsReport::variant(const std::string& name) const {
  for (const auto& v : variants) {
    if (v.name == name) {
      return v;
    }
  }
  throw std::out_of_range("no variant named " + name);
}

double compute_rmse(std::span<const double> errors) {
  if (errors.empty()) {
    throw std::invalid_argument("compute_rmse on an empty pool");
  }
  double sum = 0.0;
  for (double e : errors) {
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

std::array<double, 5> compute_efficiency(const std::array<double, 5>& rmse,
                                         const PcrbTrajectory& pcrb,
                                         int steady_start) {
  if (steady_start >= pcrb.n_epochs()) {
    throw std::invalid_argument("steady_start beyond PCRB horizon");
  }
  std::array<double, 5> eta{};
  for (int i = 0; i < kStateDim; ++i) {
    double mean = 0.0;
    int count = 0;
    for (int k = steady_start; k < pcrb.n_epochs(); ++k) {
      mean += pcrb.epochs[static_cast<std::size_t>(k)].variance[i];
      ++count;
    }
    mean /= count;
    if (!(mean > 0.0)) {
      throw std::invalid_argument("PCRB must be positive to form an efficiency ratio");
    }
    eta[static_cast<std::size_t>(i)] = rmse[static_cast<std::size_t>(i)] / std::sqrt(mean);
  }
  return eta;
}

double compute_p95(std::vector<double> abs_errors) {
  if (abs_errors.size() < 20) {
    throw std::invalid_argument("p95 needs at least 20 samples");
  }
  std::sort(abs_errors.begin(), abs_errors.end());
  const double pos = 0.95 * static_cast<double>(abs_errors.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, abs_errors.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return abs_errors[lo] + frac * (abs_errors[hi] - abs_errors[lo]);
}

double pcrb_violation_rate(std::span<const double> per_epoch_phase_mse,
                           const PcrbTrajectory& pcrb, int steady_start) {
  if (static_cast<int>(per_epoch_phase_mse.size()) != pcrb.n_epochs()) {
    throw std::invalid_argument("MSE series and PCRB horizon mismatch");
  }
  int violations = 0;
  int total = 0;
  for (int k = steady_start; k < pcrb.n_epochs(); ++k) {
    ++total;
    if (per_epoch_phase_mse[static_cast<std::size_t>(k)] <
        pcrb.epochs[static_cast<std::size_t>(k)].variance[kPhase]) {
      ++violations;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(violations) / total;
}

std::vector<std::pair<std::string, double>> reduction_vs_baseline(const MetricsReport& report) {
  const double base = report.variant("standard").p95_phase;
  std::vector<std::pair<std::string, double>> out;
  for (const auto& v : report.variants) {
    out.emplace_back(v.name, 100.0 * (1.0 - v.p95_phase / base));
  }
  return out;
}

MetricsReport run_monte_carlo(const MonteCarloConfig& config) {
  config.validate();
  const DynamicsModel model = build_dynamics(config.params);
  const FimBlocks blocks = fim_blocks(config.params);
  const PcrbTrajectory pcrb = pcrb_recursion(
      model, blocks, default_prior_information(config.params), config.n_epochs);

  // Trials are independent; summaries land in their own slot so the
  // reduction below is identical for any worker count.
  std::vector<TrialSummary> summaries(static_cast<std::size_t>(config.n_trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= config.n_trials) {
        return;
      }
      summaries[static_cast<std::size_t>(t)] =
          run_trial(config, model, static_cast<std::uint64_t>(t));
    }
  };
  if (config.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(config.workers));
    for (int i = 0; i < config.workers; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  MetricsReport report;
  report.version = kToolVersion;
  report.master_seed = config.master_seed;
  report.scenario = config.scenario.name();
  report.pooling = "pooled trials x epochs, k >= " + std::to_string(config.steady_start) +
                   "; p95 over pooled |phase error|; sqrt_pcrb_final at k = " +
                   std::to_string(config.n_epochs - 1);
  report.n_trials = config.n_trials;
  report.n_epochs = config.n_epochs;
  report.steady_start = config.steady_start;
  report.single_epoch_s = config.filter_options.single_epoch_s;

  for (int i = 0; i < kStateDim; ++i) {
    double pooled = 0.0;
    int count = 0;
    for (int k = config.steady_start; k < config.n_epochs; ++k) {
      pooled += pcrb.epochs[static_cast<std::size_t>(k)].variance[i];
      ++count;
    }
    report.sqrt_pcrb_pooled[static_cast<std::size_t>(i)] = std::sqrt(pooled / count);
    report.sqrt_pcrb_final[static_cast<std::size_t>(i)] = std::sqrt(
        pcrb.epochs[static_cast<std::size_t>(config.n_epochs - 1)].variance[i]);
  }

  for (int t = 0; t < config.n_trials; ++t) {
    const auto& s = summaries[static_cast<std::size_t>(t)];
    if (s.aborted) {
      report.aborts.push_back(TrialAbort{t, s.abort_epoch, s.abort_cause});
    }
  }
  const double abort_frac =
      static_cast<double>(report.aborts.size()) / config.n_trials;
  if (abort_frac > 0.01) {
    throw TrialAbortError("more than 1% of trials aborted (" +
                          std::to_string(report.aborts.size()) + " of " +
                          std::to_string(config.n_trials) + ")");
  }

  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    VariantMetrics metrics;
    metrics.name = config.variants[v].name();

    std::array<double, 5> sq_sum{};
    std::array<double, 5> final_sq_sum{};
    long long pooled = 0;
    long long finals = 0;
    std::vector<double> abs_phase;
    std::vector<double> phase_mse_by_epoch(static_cast<std::size_t>(config.n_epochs), 0.0);
    long long doppler_total = 0;
    long long doppler_rejected = 0;
    double ds_sum = 0.0;
    long long ds_count = 0;

    for (int t = 0; t < config.n_trials; ++t) {
      const auto& s = summaries[static_cast<std::size_t>(t)];
      if (s.aborted) {
        continue;
      }
      const auto& pv = s.variants[v];
      for (std::size_t i = 0; i < 5; ++i) {
        sq_sum[i] += pv.sq_err_sum[i];
        final_sq_sum[i] += pv.final_sq_err[i];
      }
      pooled += pv.pooled_count;
      ++finals;
      abs_phase.insert(abs_phase.end(), pv.abs_phase_err.begin(), pv.abs_phase_err.end());
      for (std::size_t k = 0; k < phase_mse_by_epoch.size(); ++k) {
        phase_mse_by_epoch[k] += pv.phase_sq_by_epoch[k];
      }
      doppler_total += pv.doppler_total;
      doppler_rejected += pv.doppler_rejected;
      ds_sum += pv.ds_over_s_sum;
      ds_count += pv.ds_over_s_count;
    }
    if (pooled == 0 || finals == 0) {
      throw NumericalError("no completed trials to aggregate");
    }
    for (std::size_t i = 0; i < 5; ++i) {
      metrics.rmse[i] = std::sqrt(sq_sum[i] / static_cast<double>(pooled));
      metrics.rmse_final[i] = std::sqrt(final_sq_sum[i] / static_cast<double>(finals));
    }
    metrics.eta = compute_efficiency(metrics.rmse, pcrb, config.steady_start);
    metrics.p95_phase = compute_p95(abs_phase);
    for (double& mse : phase_mse_by_epoch) {
      mse /= static_cast<double>(finals);
    }
    metrics.pcrb_violation_rate =
        pcrb_violation_rate(phase_mse_by_epoch, pcrb, config.steady_start);
    metrics.rejection_rate =
        doppler_total == 0 ? 0.0
                           : static_cast<double>(doppler_rejected) /
                                 static_cast<double>(doppler_total);
    metrics.mean_abs_ds_over_s =
        ds_count == 0 ? 0.0 : ds_sum / static_cast<double>(ds_count);

    std::sort(abs_phase.begin(), abs_phase.end());
    metrics.cdf_error = thin_cdf(abs_phase, 200);
    metrics.cdf_prob.clear();
    for (std::size_t i = 0; i < metrics.cdf_error.size(); ++i) {
      metrics.cdf_prob.push_back(static_cast<double>(i) /
                                 static_cast<double>(metrics.cdf_error.size() - 1));
    }
    report.variants.push_back(std::move(metrics));
  }

  for (auto& v : report.variants) {
    v.reduction_pct = 0.0;
  }
  if (std::any_of(report.variants.begin(), report.variants.end(),
                  [](const VariantMetrics& v) { return v.name == "standard"; })) {
    for (auto [name, pct] : reduction_vs_baseline(report)) {
      for (auto& v : report.variants) {
        if (v.name == name) {
          v.reduction_pct = pct;
        }
      }
    }
  }
  return report;
}

// --- serialization ---

namespace {

ordered_json variant_to_json(const VariantMetrics& v) {
  ordered_json j;
  j["name"] = v.name;
  j["rmse"] = v.rmse;
  j["rmse_final"] = v.rmse_final;
  j["eta"] = v.eta;
  j["p95_phase"] = v.p95_phase;
  j["reduction_pct"] = v.reduction_pct;
  j["pcrb_violation_rate"] = v.pcrb_violation_rate;
  j["rejection_rate"] = v.rejection_rate;
  j["mean_abs_ds_over_s"] = v.mean_abs_ds_over_s;
  j["cdf_error"] = v.cdf_error;
  j["cdf_prob"] = v.cdf_prob;
  return j;
}

VariantMetrics variant_from_json(const ordered_json& j) {
  VariantMetrics v;
  v.name = j.at("name").get<std::string>();
  v.rmse = j.at("rmse").get<std::array<double, 5>>();
  v.rmse_final = j.at("rmse_final").get<std::array<double, 5>>();
  v.eta = j.at("eta").get<std::array<double, 5>>();
  v.p95_phase = j.at("p95_phase").get<double>();
  v.reduction_pct = j.at("reduction_pct").get<double>();
  v.pcrb_violation_rate = j.at("pcrb_violation_rate").get<double>();
  v.rejection_rate = j.at("rejection_rate").get<double>();
  v.mean_abs_ds_over_s = j.at("mean_abs_ds_over_s").get<double>();
  v.cdf_error = j.at("cdf_error").get<std::vector<double>>();
  v.cdf_prob = j.at("cdf_prob").get<std::vector<double>>();
  return v;
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  ordered_json j;
  j["meta"] = ordered_json{{"tool", "islsync"},
                           {"version", report.version},
                           {"master_seed", report.master_seed},
                           {"scenario", report.scenario},
                           {"pooling", report.pooling},
                           {"n_trials", report.n_trials},
                           {"n_epochs", report.n_epochs},
                           {"steady_start", report.steady_start},
                           {"single_epoch_s", report.single_epoch_s}};
  j["sqrt_pcrb_pooled"] = report.sqrt_pcrb_pooled;
  j["sqrt_pcrb_final"] = report.sqrt_pcrb_final;
  j["variants"] = ordered_json::array();
  for (const auto& v : report.variants) {
    j["variants"].push_back(variant_to_json(v));
  }
  j["aborts"] = ordered_json::array();
  for (const auto& a : report.aborts) {
    j["aborts"].push_back(
        ordered_json{{"trial", a.trial}, {"epoch", a.epoch}, {"cause", a.cause}});
  }
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  MetricsReport report;
  const auto& meta = j.at("meta");
  report.version = meta.at("version").get<std::string>();
  report.master_seed = meta.at("master_seed").get<std::uint64_t>();
  report.scenario = meta.at("scenario").get<std::string>();
  report.pooling = meta.at("pooling").get<std::string>();
  report.n_trials = meta.at("n_trials").get<int>();
  report.n_epochs = meta.at("n_epochs").get<int>();
  report.steady_start = meta.at("steady_start").get<int>();
  report.single_epoch_s = meta.at("single_epoch_s").get<bool>();
  report.sqrt_pcrb_pooled = j.at("sqrt_pcrb_pooled").get<std::array<double, 5>>();
  report.sqrt_pcrb_final = j.at("sqrt_pcrb_final").get<std::array<double, 5>>();
  for (const auto& vj : j.at("variants")) {
    report.variants.push_back(variant_from_json(vj));
  }
  for (const auto& aj : j.at("aborts")) {
    report.aborts.push_back(TrialAbort{aj.at("trial").get<int>(),
                                       aj.at("epoch").get<int>(),
                                       aj.at("cause").get<std::string>()});
  }
  return report;
}

void write_report(const std::string& path, const MetricsReport& report) {
  write_text_file(path, report_to_json(report));
}

MetricsReport load_report(const std::string& path) {
  return report_from_json(read_text_file(path));
}

void write_table2_csv(const std::string& path, const MetricsReport& report,
                      const std::string& meta) {
  static const char* kStateNames[5] = {"R", "Rdot", "b", "u", "theta"};
  const VariantMetrics& ekf = report.variant("standard");
  std::ostringstream out;
  if (!meta.empty()) {
    out << meta << "\n";
  }
  out << "state,sqrt_pcrb,rmse,eta\n";
  for (std::size_t i = 0; i < 5; ++i) {
    out << kStateNames[i] << "," << fmt_double(report.sqrt_pcrb_final[i]) << ","
        << fmt_double(ekf.rmse[i]) << "," << fmt_double(ekf.eta[i]) << "\n";
  }
  write_text_file(path, out.str());
}

void write_p95_summary_csv(const std::string& path, const MetricsReport& report,
                           const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) {
    out << meta << "\n";
  }
  out << "scenario,variant,p95,reduction_pct\n";
  for (const auto& v : report.variants) {
    out << report.scenario << "," << v.name << "," << fmt_double(v.p95_phase) << ","
        << fmt_double(v.reduction_pct) << "\n";
  }
  write_text_file(path, out.str());
}

void write_cdf_csvs(const std::string& out_dir, const MetricsReport& report,
                    const std::string& meta) {
  for (const auto& v : report.variants) {
    std::ostringstream out;
    if (!meta.empty()) {
      out << meta << "\n";
    }
    out << "error_rad,cum_prob\n";
    out << fmt_double(0.0) << "," << fmt_double(0.0) << "\n";
    for (std::size_t i = 0; i < v.cdf_error.size(); ++i) {
      out << fmt_double(v.cdf_error[i]) << "," << fmt_double(v.cdf_prob[i]) << "\n";
    }
    const auto path =
        std::filesystem::path(out_dir) / ("cdf_" + report.scenario + "_" + v.name + ".csv");
    write_text_file(path.string(), out.str());
  }
}

}  // namespace isl
