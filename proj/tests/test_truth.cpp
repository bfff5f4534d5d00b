#include <doctest.h>

#include <cmath>

#include "isl/truth.hpp"

using namespace isl;

namespace {

ScenarioParams defaults() { return ScenarioParams{}; }

ScenarioParams noiseless() {
  ScenarioParams p;
  p.sigma_a = 0.0;
  p.beta = 0.0;
  p.h0 = 0.0;
  p.h_m2 = 0.0;
  return p;
}

}  // namespace

TEST_CASE("noiseless propagation is a pure matrix power") {
  const ScenarioParams p = noiseless();
  const DynamicsModel model = build_dynamics(p);
  Vec5 x0;
  x0 << 5.0, -0.25, 12.0, 0.5, 3.0;

  const Trajectory traj = simulate_truth(p, model, 20, SeedSpec{1, 0}, x0);
  Vec5 expected = x0;
  for (int k = 0; k < traj.n_epochs(); ++k) {
    CHECK((traj.states[static_cast<std::size_t>(k)] - expected).cwiseAbs().maxCoeff() ==
          0.0);
    expected = model.f * expected;
  }
}

TEST_CASE("one-step increments reproduce the process noise covariance") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const int n_trials = 10'000;

  Mat5 sum = Mat5::Zero();
  Vec5 mean = Vec5::Zero();
  std::vector<Vec5> increments;
  increments.reserve(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    const Trajectory traj =
        simulate_truth(p, model, 2, SeedSpec{2024, static_cast<std::uint64_t>(t)});
    const Vec5 w = traj.states[1] - model.f * traj.states[0];
    increments.push_back(w);
    mean += w;
  }
  mean /= static_cast<double>(n_trials);
  for (const Vec5& w : increments) {
    sum += (w - mean) * (w - mean).transpose();
  }
  const Mat5 sample_cov = sum / static_cast<double>(n_trials - 1);
  const double rel = (sample_cov - model.q).norm() / model.q.norm();
  CHECK(rel < 0.05);
}

TEST_CASE("identical seeds give bitwise-identical trajectories") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const SeedSpec seed{99, 7};
  const Trajectory a = simulate_truth(p, model, 50, seed);
  const Trajectory b = simulate_truth(p, model, 50, seed);
  REQUIRE(a.n_epochs() == b.n_epochs());
  for (int k = 0; k < a.n_epochs(); ++k) {
    for (int i = 0; i < kStateDim; ++i) {
      CHECK(a.states[static_cast<std::size_t>(k)][i] ==
            b.states[static_cast<std::size_t>(k)][i]);
    }
  }
}

TEST_CASE("trial index changes the trajectory, measurement stream does not") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const Trajectory a = simulate_truth(p, model, 30, SeedSpec{5, 0});
  const Trajectory b = simulate_truth(p, model, 30, SeedSpec{5, 1});
  CHECK((a.states[10] - b.states[10]).cwiseAbs().maxCoeff() > 0.0);

  // The trajectory draws only from the process sub-stream, so generating
  // measurements (any scenario) cannot perturb a re-simulated trajectory.
  const auto nominal = generate_measurements(a, OutlierModel::nominal(), SeedSpec{5, 0});
  const auto impulsive =
      generate_measurements(a, OutlierModel::impulsive(), SeedSpec{5, 0});
  const Trajectory again = simulate_truth(p, model, 30, SeedSpec{5, 0});
  for (int k = 0; k < a.n_epochs(); ++k) {
    for (int i = 0; i < kStateDim; ++i) {
      CHECK(a.states[static_cast<std::size_t>(k)][i] ==
            again.states[static_cast<std::size_t>(k)][i]);
    }
  }
  // Same measurement sub-stream: the ToA sequence agrees between scenarios
  // because the ToA draw precedes the Doppler draw at every epoch.
  REQUIRE(nominal.size() == impulsive.size());
  CHECK(nominal[0].y_r == impulsive[0].y_r);
}

TEST_CASE("measurements start at epoch 1") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const Trajectory traj = simulate_truth(p, model, 10, SeedSpec{1, 1});
  const auto stream = generate_measurements(traj, OutlierModel::nominal(), SeedSpec{1, 1});
  REQUIRE(static_cast<int>(stream.size()) == traj.n_epochs() - 1);
  CHECK(stream.front().k == 1);
  CHECK(stream.back().k == traj.n_epochs() - 1);
}

TEST_CASE("true phase variance follows the random walk") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const double q_theta = model.q(kPhase, kPhase);
  const int n_trials = 10'000;

  std::vector<double> theta10;
  std::vector<double> theta50;
  theta10.reserve(n_trials);
  theta50.reserve(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    const Trajectory traj =
        simulate_truth(p, model, 51, SeedSpec{777, static_cast<std::uint64_t>(t)});
    theta10.push_back(traj.states[10][kPhase]);
    theta50.push_back(traj.states[50][kPhase]);
  }
  auto variance = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += (x - mean) * (x - mean);
    return sum / static_cast<double>(v.size() - 1);
  };
  const double expected10 = p.p0_diag[kPhase] + 10.0 * q_theta;
  const double expected50 = p.p0_diag[kPhase] + 50.0 * q_theta;
  CHECK(std::abs(variance(theta10) - expected10) / expected10 < 0.05);
  CHECK(std::abs(variance(theta50) - expected50) / expected50 < 0.05);
}

TEST_CASE("zero trajectory with vanishing noise gives vanishing measurements") {
  ScenarioParams p = noiseless();
  p.sigma_d = 1e-30;
  p.sigma_r = 1e-30;
  const DynamicsModel model = build_dynamics(p);
  const Trajectory traj =
      simulate_truth(p, model, 10, SeedSpec{3, 3}, Vec5(Vec5::Zero()));
  const auto stream = generate_measurements(traj, OutlierModel::nominal(), SeedSpec{3, 3});
  for (const auto& m : stream) {
    CHECK(std::abs(m.y_r) < 1e-20);
    CHECK(std::abs(m.y_d) < 1e-20);
    CHECK_FALSE(m.doppler_outlier);
  }
}

TEST_CASE("nominal streams carry no outlier flags") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  for (int t = 0; t < 20; ++t) {
    const Trajectory traj =
        simulate_truth(p, model, 50, SeedSpec{31, static_cast<std::uint64_t>(t)});
    for (const auto& m :
         generate_measurements(traj, OutlierModel::nominal(), SeedSpec{31, static_cast<std::uint64_t>(t)})) {
      CHECK_FALSE(m.doppler_outlier);
    }
  }
}

TEST_CASE("impulsive flag rate matches the jump probability") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  long long flagged = 0;
  long long total = 0;
  for (int t = 0; t < 500; ++t) {
    const SeedSpec seed{4242, static_cast<std::uint64_t>(t)};
    const Trajectory traj = simulate_truth(p, model, 100, seed);
    for (const auto& m : generate_measurements(traj, OutlierModel::impulsive(), seed)) {
      ++total;
      flagged += m.doppler_outlier ? 1 : 0;
    }
  }
  REQUIRE(total == 500 * 99);
  const double rate = static_cast<double>(flagged) / static_cast<double>(total);
  CHECK(rate > 0.04);
  CHECK(rate < 0.06);
}

TEST_CASE("rejects too-short horizons") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  CHECK_THROWS_AS(simulate_truth(p, model, 1, SeedSpec{}), std::invalid_argument);
}
