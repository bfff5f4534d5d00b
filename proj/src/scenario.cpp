#include "isl/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "isl/io.hpp"

namespace isl {

void ScenarioParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be strictly positive");
    }
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be non-negative");
    }
  };
  positive(f_c, "f_c");
  positive(t_coh, "T_coh");
  positive(sigma_d, "sigma_D");
  positive(sigma_r, "sigma_R");
  positive(c, "c");
  non_negative(beta, "beta");
  non_negative(h0, "h0");
  non_negative(h_m2, "h_m2");
  non_negative(sigma_a, "sigma_a");
  for (double p : p0_diag) {
    positive(p, "p0_diag entry");
  }
}

AllanSpectral allan_spectral(const ScenarioParams& params) {
  if (params.h0 < 0.0 || params.h_m2 < 0.0) {
    throw std::invalid_argument("Allan coefficients must be non-negative");
  }
  constexpr double pi = std::numbers::pi;
  return AllanSpectral{params.h0 / 2.0, 2.0 * pi * pi * params.h_m2};
}

double kappa_theta(const ScenarioParams& params) {
  if (!(params.f_c > 0.0) || !(params.t_coh > 0.0)) {
    throw std::invalid_argument("kappa_theta needs f_c > 0 and T_coh > 0");
  }
  return params.c / (2.0 * std::numbers::pi * params.f_c * params.t_coh);
}

namespace {

using nlohmann::json;

const char* const kKnownKeys[] = {"f_c", "T_coh", "sigma_D", "sigma_R", "beta",
                                  "h0",  "h_m2",  "sigma_a", "c",       "p0_diag"};

}  // namespace

ScenarioParams load_params(const std::string& path) {
  json j = json::parse(read_text_file(path));
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object: " + path);
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) {
      known = known || key == k;
    }
    if (!known) {
      throw std::invalid_argument("unknown config key '" + key + "' in " + path);
    }
  }
  ScenarioParams p;
  p.f_c = j.value("f_c", p.f_c);
  p.t_coh = j.value("T_coh", p.t_coh);
  p.sigma_d = j.value("sigma_D", p.sigma_d);
  p.sigma_r = j.value("sigma_R", p.sigma_r);
  p.beta = j.value("beta", p.beta);
  p.h0 = j.value("h0", p.h0);
  p.h_m2 = j.value("h_m2", p.h_m2);
  p.sigma_a = j.value("sigma_a", p.sigma_a);
  p.c = j.value("c", p.c);
  if (j.contains("p0_diag")) {
    auto v = j.at("p0_diag").get<std::vector<double>>();
    if (v.size() != p.p0_diag.size()) {
      throw std::invalid_argument("p0_diag must have 5 entries");
    }
    std::copy(v.begin(), v.end(), p.p0_diag.begin());
  }
  p.validate();
  return p;
}

std::string params_to_json(const ScenarioParams& p) {
  nlohmann::ordered_json j;
  j["f_c"] = p.f_c;
  j["T_coh"] = p.t_coh;
  j["sigma_D"] = p.sigma_d;
  j["sigma_R"] = p.sigma_r;
  j["beta"] = p.beta;
  j["h0"] = p.h0;
  j["h_m2"] = p.h_m2;
  j["sigma_a"] = p.sigma_a;
  j["c"] = p.c;
  j["p0_diag"] = p.p0_diag;
  return j.dump(2) + "\n";
}

}  // namespace isl
