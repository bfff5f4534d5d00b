#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "isl/dynamics.hpp"
#include "isl/errors.hpp"
#include "isl/io.hpp"
#include "isl/scenario.hpp"

using namespace isl;

namespace {

ScenarioParams defaults() { return ScenarioParams{}; }

}  // namespace

TEST_CASE("coupling coefficient at the baseline parameters") {
  CHECK(std::abs(kappa_theta(defaults()) - 0.0184) < 1e-4);
}

TEST_CASE("coupling coefficient is inverse in carrier frequency") {
  ScenarioParams p = defaults();
  const double base = kappa_theta(p);
  p.f_c *= 10.0;
  CHECK(kappa_theta(p) == doctest::Approx(base / 10.0).epsilon(1e-12));
}

TEST_CASE("coupling coefficient at 13 GHz") {
  ScenarioParams p = defaults();
  p.f_c = 13e9;
  p.t_coh = 0.1;
  CHECK(std::abs(kappa_theta(p) - 0.0367) < 1e-4);
}

TEST_CASE("coupling coefficient rejects bad parameters") {
  ScenarioParams p = defaults();
  p.f_c = 0.0;
  CHECK_THROWS_AS(kappa_theta(p), std::invalid_argument);
  p = defaults();
  p.t_coh = -1.0;
  CHECK_THROWS_AS(kappa_theta(p), std::invalid_argument);
}

TEST_CASE("coupling times its denominator recovers c") {
  for (double fc : {1e9, 13e9, 26e9, 60e9}) {
    ScenarioParams p = defaults();
    p.f_c = fc;
    const double product = kappa_theta(p) * 2.0 * std::numbers::pi * p.f_c * p.t_coh;
    CHECK(std::abs(product - p.c) / p.c < 1e-12);
  }
}

TEST_CASE("Allan spectral densities") {
  const AllanSpectral s = allan_spectral(defaults());
  CHECK(s.s_f == doctest::Approx(1.1e-25).epsilon(1e-12));
  CHECK(std::abs(s.s_g - 3.1583e-23) < 1e-26);

  ScenarioParams p = defaults();
  p.h_m2 = 0.0;
  CHECK(allan_spectral(p).s_g == 0.0);
}

TEST_CASE("process noise blocks at the baseline parameters") {
  const DynamicsModel model = build_dynamics(defaults());
  CHECK(std::abs(model.q(kPhase, kPhase) - 62.832) < 1e-3);
  CHECK(std::abs(model.q(kRange, kRange) - 3.333e-6) < 1e-9);
  CHECK(std::abs(model.q(kRange, kRangeRate) - 5.0e-5) < 1e-9);
  CHECK(std::abs(model.q(kRangeRate, kRange) - 5.0e-5) < 1e-9);
  CHECK(std::abs(model.q(kRangeRate, kRangeRate) - 1.0e-3) < 1e-9);
}

TEST_CASE("zero acceleration noise empties the range block") {
  ScenarioParams p = defaults();
  p.sigma_a = 0.0;
  const Mat5 q = make_process_noise(p, p.t_coh);
  CHECK(q.topLeftCorner<2, 2>().isZero(0.0));
}

TEST_CASE("zero step freezes the transition") {
  CHECK(make_transition(0.0).isIdentity(0.0));
}

TEST_CASE("transition matrix structure") {
  const DynamicsModel model = build_dynamics(defaults());
  CHECK(model.f.determinant() == doctest::Approx(1.0).epsilon(1e-14));
  // Only the two integrator couplings are allowed off the diagonal.
  for (int i = 0; i < kStateDim; ++i) {
    for (int j = 0; j < kStateDim; ++j) {
      const bool diagonal = i == j;
      const bool integrator = (i == kRange && j == kRangeRate) ||
                              (i == kClockBias && j == kClockDrift);
      if (diagonal) {
        CHECK(model.f(i, j) == 1.0);
      } else if (integrator) {
        CHECK(model.f(i, j) == defaults().t_coh);
      } else {
        CHECK(model.f(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("process noise is block diagonal, symmetric, with the closed-form dets") {
  const ScenarioParams p = defaults();
  const DynamicsModel model = build_dynamics(p);
  const Mat5& q = model.q;

  CHECK((q - q.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // Cross-block entries exactly zero.
  CHECK(q.block<2, 2>(0, 2).isZero(0.0));
  CHECK(q.block<2, 1>(0, 4).isZero(0.0));
  CHECK(q.block<2, 1>(2, 4).isZero(0.0));

  const double t = p.t_coh;
  const double det_qr = q.topLeftCorner<2, 2>().determinant();
  const double expected_qr = std::pow(p.sigma_a, 4) * std::pow(t, 4) / 12.0;
  CHECK(std::abs(det_qr - expected_qr) / expected_qr < 1e-10);

  const AllanSpectral s = allan_spectral(p);
  const double det_qb = q.block<2, 2>(2, 2).determinant();
  const double expected_qb = std::pow(p.c, 4) *
                             (s.s_f * s.s_g * t * t +
                              s.s_g * s.s_g * std::pow(t, 4) / 12.0);
  CHECK(std::abs(det_qb - expected_qb) / expected_qb < 1e-10);
  CHECK(det_qr > 0.0);
  CHECK(det_qb > 0.0);
}

TEST_CASE("clock block scales as c^2") {
  ScenarioParams p = defaults();
  const Mat5 q1 = make_process_noise(p, p.t_coh);
  p.c *= 2.0;
  const Mat5 q2 = make_process_noise(p, p.t_coh);
  for (int i = 2; i <= 3; ++i) {
    for (int j = 2; j <= 3; ++j) {
      CHECK(q2(i, j) == doctest::Approx(4.0 * q1(i, j)).epsilon(1e-14));
    }
  }
  // The range and phase blocks do not involve c.
  CHECK(q2(kRange, kRange) == q1(kRange, kRange));
  CHECK(q2(kPhase, kPhase) == q1(kPhase, kPhase));
}

TEST_CASE("cached inverse matches Q and is absent for singular Q") {
  const DynamicsModel model = build_dynamics(defaults());
  REQUIRE(model.q_inv.has_value());
  CHECK(((*model.q_inv) * model.q - Mat5::Identity()).cwiseAbs().maxCoeff() < 1e-6);

  ScenarioParams p = defaults();
  p.sigma_a = 0.0;
  const DynamicsModel singular = build_dynamics(p);
  CHECK(!singular.q_inv.has_value());
  CHECK_THROWS_AS(singular.q_inverse(), ModelError);
}

TEST_CASE("parameter validation") {
  ScenarioParams p = defaults();
  p.sigma_d = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = defaults();
  p.h0 = -1e-26;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = defaults();
  p.p0_diag[2] = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(defaults().validate());
}

TEST_CASE("config round trip and defaults for missing keys") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "islsync_test_cfg";
  fs::create_directories(dir);

  ScenarioParams p;
  p.f_c = 13e9;
  p.sigma_a = 0.25;
  write_text_file((dir / "full.json").string(), params_to_json(p));
  const ScenarioParams loaded = load_params((dir / "full.json").string());
  CHECK(loaded.f_c == p.f_c);
  CHECK(loaded.sigma_a == p.sigma_a);
  CHECK(loaded.p0_diag == p.p0_diag);

  write_text_file((dir / "partial.json").string(), "{\"beta\": 250.0}\n");
  const ScenarioParams partial = load_params((dir / "partial.json").string());
  CHECK(partial.beta == 250.0);
  CHECK(partial.f_c == ScenarioParams{}.f_c);
  CHECK(partial.sigma_d == ScenarioParams{}.sigma_d);

  write_text_file((dir / "bad.json").string(), "{\"sigmaD\": 0.05}\n");
  CHECK_THROWS_AS(load_params((dir / "bad.json").string()), std::invalid_argument);
}
