#include "isl/measurement.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "isl/io.hpp"

namespace isl {

JacobianSet jacobians(double kappa) {
  if (!std::isfinite(kappa)) {
    throw std::invalid_argument("kappa must be finite");
  }
  JacobianSet jac;
  jac.h_d << 0.0, 1.0, 0.0, 1.0, kappa;
  jac.h_d_prev << 0.0, 0.0, 0.0, 0.0, -kappa;
  jac.h_r << 1.0, 0.0, 1.0, 0.0, 0.0;
  return jac;
}

void OutlierModel::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("outlier probability must lie in [0,1]");
  }
  if (!(scale >= 1.0)) {
    throw std::invalid_argument("outlier scale multiplier must be >= 1");
  }
}

std::string OutlierModel::name() const {
  switch (kind) {
    case Kind::kNominal: return "nominal";
    case Kind::kImpulsive: return "impulsive";
    case Kind::kHeavyTail: return "heavy_tail";
  }
  return "unknown";
}

double h_doppler(const Vec5& prev, const Vec5& curr, double kappa) {
  return curr[kRangeRate] + curr[kClockDrift] + kappa * (curr[kPhase] - prev[kPhase]);
}

double h_doppler(const ScaledState& prev, const ScaledState& curr, double kappa) {
  return h_doppler(prev.vec(), curr.vec(), kappa);
}

double h_toa(const Vec5& curr) { return curr[kRange] + curr[kClockBias]; }

double h_toa(const ScaledState& curr) { return curr.r + curr.b; }

DopplerNoise sample_doppler_noise(const OutlierModel& model, double sigma_d,
                                  std::mt19937_64& rng) {
  if (!(sigma_d > 0.0)) {
    throw std::invalid_argument("sigma_D must be strictly positive");
  }
  model.validate();
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  switch (model.kind) {
    case OutlierModel::Kind::kNominal:
      return {sigma_d * unit(rng), false};
    case OutlierModel::Kind::kImpulsive: {
      // Additive sparse jump on top of the nominal draw.
      double v = sigma_d * unit(rng);
      bool fired = uniform(rng) < model.probability;
      if (fired) {
        v += model.scale * sigma_d * unit(rng);
      }
      return {v, fired};
    }
    case OutlierModel::Kind::kHeavyTail: {
      // Replacement mixture.
      bool wide = uniform(rng) < model.probability;
      double std_dev = wide ? model.scale * sigma_d : sigma_d;
      return {std_dev * unit(rng), wide};
    }
  }
  throw std::logic_error("unreachable outlier kind");
}

void write_measurements_csv(const std::string& path,
                            const std::vector<MeasurementEpoch>& epochs,
                            const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) {
    out << meta << "\n";
  }
  out << "k,y_r,y_d,doppler_outlier\n";
  for (const auto& m : epochs) {
    out << m.k << "," << fmt_double(m.y_r) << "," << fmt_double(m.y_d) << ","
        << (m.doppler_outlier ? 1 : 0) << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<MeasurementEpoch> read_measurements_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::vector<MeasurementEpoch> epochs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) {
      continue;
    }
    std::istringstream row(line);
    MeasurementEpoch m;
    char comma;
    int flag;
    if (!(row >> m.k >> comma >> m.y_r >> comma >> m.y_d >> comma >> flag)) {
      throw std::runtime_error("malformed measurement row: " + line);
    }
    m.doppler_outlier = flag != 0;
    epochs.push_back(m);
  }
  return epochs;
}

}  // namespace isl
