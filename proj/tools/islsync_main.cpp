// Command-line front end: PCRB curves, phase-observability comparison,
// single-trial simulation, the Monte Carlo study, and report printing.
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure,
// 4 excessive trial aborts.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "isl/errors.hpp"
#include "isl/io.hpp"
#include "isl/metrics.hpp"
#include "isl/pcrb.hpp"
#include "isl/truth.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 12;
  std::string scenario = "nominal";
  int workers = 1;
  int epochs = 0;  // per-command default
  int trials = 500;
};

isl::ScenarioParams load_config(const CommonArgs& args) {
  if (args.config_path.empty()) {
    isl::ScenarioParams params;
    params.validate();
    return params;
  }
  return isl::load_params(args.config_path);
}

isl::OutlierModel scenario_from_name(const std::string& name) {
  if (name == "nominal") return isl::OutlierModel::nominal();
  if (name == "impulsive") return isl::OutlierModel::impulsive();
  if (name == "heavy_tail") return isl::OutlierModel::heavy_tail();
  throw CLI::ValidationError("--scenario must be nominal, impulsive or heavy_tail");
}

void write_pcrb_csv(const fs::path& path, const isl::PcrbTrajectory& traj,
                    const std::string& meta) {
  const std::vector<double> lmin = isl::min_eigenvalue_series(traj);
  std::ostringstream out;
  out << meta << "\n";
  out << "k,pcrb_R,pcrb_Rdot,pcrb_b,pcrb_u,pcrb_theta,lambda_min\n";
  for (int k = 0; k < traj.n_epochs(); ++k) {
    out << k;
    for (int i = 0; i < isl::kStateDim; ++i) {
      out << "," << isl::fmt_double(traj.epochs[static_cast<std::size_t>(k)].variance[i]);
    }
    out << "," << isl::fmt_double(lmin[static_cast<std::size_t>(k)]) << "\n";
  }
  isl::write_text_file(path.string(), out.str());
}

int cmd_pcrb(const CommonArgs& args, bool kappa_zero) {
  const isl::ScenarioParams params = load_config(args);
  const isl::DynamicsModel model = isl::build_dynamics(params);
  const isl::Mat5 j0 = isl::default_prior_information(params);
  const int n = args.epochs > 0 ? args.epochs : 500;

  const std::string meta = isl::metadata_line(
      args.seed, "deterministic", "per-epoch bound, no pooling",
      kappa_zero ? "kappa=0" : "kappa=tasd");

  if (kappa_zero) {
    const auto traj = isl::pcrb_recursion(model, isl::fim_blocks(params, 0.0), j0, n);
    write_pcrb_csv(fs::path(args.out_dir) / "pcrb.csv", traj, meta);
  } else {
    const auto tasd = isl::pcrb_recursion(model, isl::fim_blocks(params), j0, n);
    write_pcrb_csv(fs::path(args.out_dir) / "pcrb.csv", tasd, meta);
    const auto zero = isl::pcrb_recursion(model, isl::fim_blocks(params, 0.0), j0, n);
    write_pcrb_csv(fs::path(args.out_dir) / "pcrb_kappa0.csv", zero,
                   isl::metadata_line(args.seed, "deterministic",
                                      "per-epoch bound, no pooling", "kappa=0"));
  }
  std::cout << "wrote " << (fs::path(args.out_dir) / "pcrb.csv").string() << "\n";
  return 0;
}

int cmd_prop1(const CommonArgs& args) {
  const isl::ScenarioParams params = load_config(args);
  const isl::DynamicsModel model = isl::build_dynamics(params);
  const isl::Mat5 j0 = isl::default_prior_information(params);
  const int n = args.epochs > 0 ? args.epochs : 500;
  const double q_theta = model.q(isl::kPhase, isl::kPhase);
  const double p0_theta = params.p0_diag[isl::kPhase];

  const auto scalar = isl::phase_scalar_recursion(1.0 / p0_theta, q_theta, n);
  const auto full0 = isl::pcrb_recursion(model, isl::fim_blocks(params, 0.0), j0, n);
  const auto tasd = isl::pcrb_recursion(model, isl::fim_blocks(params), j0, n);

  std::ostringstream out;
  out << isl::metadata_line(args.seed, "deterministic", "per-epoch bound, no pooling",
                            "columns=phase-information-and-variance")
      << "\n";
  out << "k,j_theta_scalar,j_theta_full_kappa0,pcrb_theta_kappa0,pcrb_theta_closed,"
         "pcrb_theta_tasd\n";
  for (int k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out << k << "," << isl::fmt_double(scalar[ku]) << ","
        << isl::fmt_double(full0.epochs[ku].info(isl::kPhase, isl::kPhase)) << ","
        << isl::fmt_double(full0.epochs[ku].variance[isl::kPhase]) << ","
        << isl::fmt_double(p0_theta + k * q_theta) << ","
        << isl::fmt_double(tasd.epochs[ku].variance[isl::kPhase]) << "\n";
  }
  const fs::path path = fs::path(args.out_dir) / "prop1.csv";
  isl::write_text_file(path.string(), out.str());
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args, std::uint64_t trial) {
  const isl::ScenarioParams params = load_config(args);
  const isl::DynamicsModel model = isl::build_dynamics(params);
  const isl::OutlierModel outliers = scenario_from_name(args.scenario);
  const int n = args.epochs > 0 ? args.epochs : 100;

  const isl::SeedSpec seed{args.seed, trial};
  const isl::Trajectory truth = isl::simulate_truth(params, model, n, seed);
  const auto stream = isl::generate_measurements(truth, outliers, seed);

  const std::string meta =
      isl::metadata_line(args.seed, args.scenario, "single trial",
                         "trial=" + std::to_string(trial));
  isl::write_trajectory_csv((fs::path(args.out_dir) / "trajectory.csv").string(),
                            truth, meta);
  isl::write_measurements_csv((fs::path(args.out_dir) / "measurements.csv").string(),
                              stream, meta);
  std::cout << "wrote " << (fs::path(args.out_dir) / "trajectory.csv").string()
            << " and measurements.csv\n";
  return 0;
}

int cmd_mc(const CommonArgs& args, bool single_epoch_s, int dump_trial) {
  isl::MonteCarloConfig config;
  config.params = load_config(args);
  config.scenario = scenario_from_name(args.scenario);
  config.master_seed = args.seed;
  config.n_trials = args.trials;
  config.n_epochs = args.epochs > 0 ? args.epochs : 100;
  config.workers = args.workers;
  config.filter_options.single_epoch_s = single_epoch_s;

  const isl::MetricsReport report = isl::run_monte_carlo(config);

  const std::string meta =
      isl::metadata_line(args.seed, report.scenario, report.pooling,
                         single_epoch_s ? "innovation=single-epoch" : "");
  isl::write_report((fs::path(args.out_dir) / "report.json").string(), report);
  isl::write_table2_csv((fs::path(args.out_dir) / "table2.csv").string(), report, meta);
  isl::write_p95_summary_csv((fs::path(args.out_dir) / "p95_summary.csv").string(),
                             report, meta);
  isl::write_cdf_csvs(args.out_dir, report, meta);

  if (dump_trial >= 0) {
    const isl::DynamicsModel model = isl::build_dynamics(config.params);
    const isl::SeedSpec seed{config.master_seed, static_cast<std::uint64_t>(dump_trial)};
    const auto truth = isl::simulate_truth(config.params, model, config.n_epochs, seed);
    const auto stream = isl::generate_measurements(truth, config.scenario, seed);
    std::vector<std::pair<std::string, std::vector<isl::EpochRecord>>> runs;
    for (const auto& variant : config.variants) {
      runs.emplace_back(variant.name(),
                        isl::run_filter(truth, stream, variant, model, config.params,
                                        config.filter_options));
    }
    const auto path = fs::path(args.out_dir) /
                      ("trial_" + std::to_string(dump_trial) + "_diag.csv");
    isl::write_trial_diagnostics_csv(path.string(), runs, meta);
  }

  std::cout << "wrote " << (fs::path(args.out_dir) / "report.json").string() << "\n";
  if (!report.aborts.empty()) {
    std::cout << report.aborts.size() << " trial(s) aborted\n";
  }
  return 0;
}

int cmd_report(const CommonArgs& args) {
  isl::MetricsReport report;
  try {
    report = isl::load_report((fs::path(args.out_dir) / "report.json").string());
  } catch (const std::exception& err) {
    std::cerr << "error: cannot read report.json from '" << args.out_dir
              << "': " << err.what() << "\n";
    return 2;
  }

  static const char* kStateNames[5] = {"R [m]", "Rdot [m/s]", "b [m]", "u [m/s]",
                                       "theta [rad]"};
  std::printf("islsync v%s  seed=%llu  scenario=%s\n", report.version.c_str(),
              static_cast<unsigned long long>(report.master_seed),
              report.scenario.c_str());
  std::printf("pooling: %s\n\n", report.pooling.c_str());

  const auto& ekf = report.variant("standard");
  std::printf("%-12s %12s %12s %8s\n", "state", "sqrt(PCRB)", "RMSE", "eta");
  for (std::size_t i = 0; i < 5; ++i) {
    std::printf("%-12s %12.3f %12.3f %8.3f\n", kStateNames[i],
                report.sqrt_pcrb_pooled[i], ekf.rmse[i], ekf.eta[i]);
  }
  std::printf("\n%-10s %14s %14s %12s %10s\n", "variant", "p95 phase [rad]",
              "reduction [%]", "reject rate", "viol rate");
  for (const auto& v : report.variants) {
    std::printf("%-10s %14.2f %14.1f %12.5f %10.3f\n", v.name.c_str(), v.p95_phase,
                v.reduction_pct, v.rejection_rate, v.pcrb_violation_rate);
  }
  if (!report.aborts.empty()) {
    std::printf("\naborted trials: %zu\n", report.aborts.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO inter-satellite-link synchronization workbench"};
  app.require_subcommand(1);

  CommonArgs args;
  bool kappa_zero = false;
  bool single_epoch_s = false;
  std::uint64_t sim_trial = 0;
  int dump_trial = -1;

  auto add_common = [&](CLI::App* cmd, bool with_scenario = true) {
    cmd->add_option("--config", args.config_path, "scenario config JSON");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed");
    if (with_scenario) {
      cmd->add_option("--scenario", args.scenario,
                      "outlier scenario: nominal|impulsive|heavy_tail");
    }
    cmd->add_option("--epochs", args.epochs, "number of epochs");
  };

  CLI::App* pcrb = app.add_subcommand("pcrb", "posterior bound curves");
  add_common(pcrb, false);
  pcrb->add_flag("--kappa-zero", kappa_zero, "decoupled (kappa = 0) bound");

  CLI::App* prop1 = app.add_subcommand("prop1", "phase observability comparison");
  add_common(prop1, false);

  CLI::App* simulate = app.add_subcommand("simulate", "one truth/measurement trial");
  add_common(simulate);
  simulate->add_option("--trial", sim_trial, "trial index");

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo study");
  add_common(mc);
  mc->add_option("--trials", args.trials, "number of trials");
  mc->add_option("--workers", args.workers, "trial-level parallelism");
  mc->add_flag("--single-epoch-S", single_epoch_s,
               "ablation: drop the previous-epoch term from the innovation variance");
  mc->add_option("--dump-trial", dump_trial, "also write per-epoch diagnostics CSV");

  CLI::App* report = app.add_subcommand("report", "print tables from report.json");
  report->add_option("--out", args.out_dir, "directory containing report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (pcrb->parsed()) return cmd_pcrb(args, kappa_zero);
    if (prop1->parsed()) return cmd_prop1(args);
    if (simulate->parsed()) return cmd_simulate(args, sim_trial);
    if (mc->parsed()) return cmd_mc(args, single_epoch_s, dump_trial);
    if (report->parsed()) return cmd_report(args);
  } catch (const isl::TrialAbortError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 4;
  } catch (const isl::NumericalError& err) {
    std::cerr << "error: " << err.what();
    if (err.epoch >= 0) {
      std::cerr << " (epoch " << err.epoch << ")";
    }
    std::cerr << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
