#include "covproj/scenarios.hpp"

#include <numbers>
#include <stdexcept>

#include "covproj/errors.hpp"

namespace covproj {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc_value(double x, SincConvention conv) {
  if (conv == SincConvention::kNormalized) x *= kPi;
  if (x == 0.0) return 1.0;
  return std::sin(x) / x;
}

void check_dim(int n, const char* who) {
  if (n < 1 || n > 4096) {
    throw std::invalid_argument(std::string(who) + ": dimension must be in [1, 4096], got " +
                                std::to_string(n));
  }
}

}  // namespace

CVector steering_spatial(double theta_deg, int n) {
  check_dim(n, "steering_spatial");
  const double phi = kPi * std::sin(theta_deg * kPi / 180.0);
  CVector s(n);
  for (int k = 0; k < n; ++k) {
    s[k] = std::polar(1.0, phi * k);
  }
  return s;
}

CVector steering_doppler(double nu, int n) {
  check_dim(n, "steering_doppler");
  CVector s(n);
  for (int k = 0; k < n; ++k) {
    s[k] = std::polar(1.0, 2.0 * kPi * nu * k);
  }
  return s;
}

HermitianMatrix jammer_covariance(const SpatialScenario& sc, SincConvention sinc) {
  check_dim(sc.n, "jammer_covariance");
  for (const Jammer& j : sc.jammers) {
    if (!(j.fractional_bandwidth >= 0.0) || !std::isfinite(j.fractional_bandwidth)) {
      throw std::invalid_argument("jammer_covariance: fractional_bandwidth must be >= 0, got " +
                                  std::to_string(j.fractional_bandwidth));
    }
    if (!std::isfinite(j.power_db) || !(j.angle_deg > -90.0 && j.angle_deg < 90.0)) {
      throw std::invalid_argument(
          "jammer_covariance: power must be finite and angle in (-90, 90) degrees");
    }
  }
  CMatrix m = CMatrix::Zero(sc.n, sc.n);
  for (const Jammer& j : sc.jammers) {
    const double power = db_to_linear(j.power_db);
    const double phi = kPi * std::sin(j.angle_deg * kPi / 180.0);
    for (int r = 0; r < sc.n; ++r) {
      for (int c = 0; c < sc.n; ++c) {
        const double x = static_cast<double>(r - c);
        const double env = sinc_value(0.5 * j.fractional_bandwidth * x * phi, sinc);
        m(r, c) += power * env * std::polar(1.0, x * phi);
      }
    }
  }
  return HermitianMatrix::from_full(m);
}

HermitianMatrix clutter_covariance(const DopplerScenario& sc) {
  check_dim(sc.n, "clutter_covariance");
  if (!(sc.rho_s >= 0.0 && sc.rho_s < 1.0) || !(sc.rho_g >= 0.0 && sc.rho_g < 1.0)) {
    throw std::invalid_argument("clutter_covariance: correlation coefficients must be in [0, 1)");
  }
  if (!(sc.f_s >= -0.5 && sc.f_s < 0.5)) {
    throw std::invalid_argument("clutter_covariance: f_s must be in [-1/2, 1/2), got " +
                                std::to_string(sc.f_s));
  }
  if (!std::isfinite(sc.cnr_s_db) || !std::isfinite(sc.cnr_g_db)) {
    throw std::invalid_argument("clutter_covariance: parameters must be finite");
  }
  const double cnr_s = db_to_linear(sc.cnr_s_db);
  const double cnr_g = db_to_linear(sc.cnr_g_db);
  CMatrix m(sc.n, sc.n);
  for (int r = 0; r < sc.n; ++r) {
    for (int c = 0; c < sc.n; ++c) {
      const double x = static_cast<double>(r - c);
      const double sea = cnr_s * std::pow(sc.rho_s, x * x);
      const double ground = cnr_g * std::pow(sc.rho_g, std::abs(x));
      m(r, c) = sea * std::polar(1.0, 2.0 * kPi * x * sc.f_s) + ground;
    }
  }
  return HermitianMatrix::from_full(m);
}

HermitianMatrix total_covariance(const HermitianMatrix& colored, double noise_power_db) {
  if (!std::isfinite(noise_power_db)) {
    throw std::invalid_argument("total_covariance: noise power must be finite");
  }
  return colored.plus_diagonal(db_to_linear(noise_power_db));
}

double true_kappa(const HermitianMatrix& m) {
  const SpectralDecomposition eig = eig_hermitian(m);
  const double dmin = eig.d[eig.d.size() - 1];
  if (!(dmin > 0.0)) {
    throw NumericalError("true_kappa: covariance is singular (min eigenvalue " +
                         std::to_string(dmin) + ")");
  }
  return eig.d[0] / dmin;
}

HermitianMatrix colored_covariance(const Scenario& sc) {
  if (const auto* sp = std::get_if<SpatialScenario>(&sc.model)) {
    return jammer_covariance(*sp, sc.sinc);
  }
  return clutter_covariance(std::get<DopplerScenario>(sc.model));
}

int scenario_dim(const Scenario& sc) {
  if (const auto* sp = std::get_if<SpatialScenario>(&sc.model)) return sp->n;
  return std::get<DopplerScenario>(sc.model).n;
}

double scenario_noise_power_db(const Scenario& sc) {
  if (const auto* sp = std::get_if<SpatialScenario>(&sc.model)) return sp->noise_power_db;
  return std::get<DopplerScenario>(sc.model).noise_power_db;
}

std::string scenario_type_name(const Scenario& sc) {
  return std::holds_alternative<SpatialScenario>(sc.model) ? "spatial" : "doppler";
}

CVector scenario_steering(const Scenario& sc, double grid_value) {
  if (std::holds_alternative<SpatialScenario>(sc.model)) {
    return steering_spatial(grid_value, scenario_dim(sc));
  }
  return steering_doppler(grid_value, scenario_dim(sc));
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw std::invalid_argument("scenario_from_json: expected object with a 'type' field");
  }
  Scenario sc;
  const std::string type = j.at("type").get<std::string>();
  if (type == "spatial") {
    SpatialScenario sp;
    sp.n = j.at("n").get<int>();
    sp.noise_power_db = j.at("noise_power_db").get<double>();
    for (const auto& ja : j.at("jammers")) {
      Jammer jam;
      jam.power_db = ja.at("power_db").get<double>();
      jam.angle_deg = ja.at("angle_deg").get<double>();
      jam.fractional_bandwidth = ja.at("fractional_bandwidth").get<double>();
      sp.jammers.push_back(jam);
    }
    sc.model = sp;
  } else if (type == "doppler") {
    DopplerScenario dp;
    dp.n = j.at("n").get<int>();
    dp.cnr_s_db = j.at("cnr_s_db").get<double>();
    dp.cnr_g_db = j.at("cnr_g_db").get<double>();
    dp.rho_s = j.at("rho_s").get<double>();
    dp.rho_g = j.at("rho_g").get<double>();
    dp.f_s = j.at("f_s").get<double>();
    dp.noise_power_db = j.at("noise_power_db").get<double>();
    sc.model = dp;
  } else {
    throw std::invalid_argument("scenario_from_json: unknown type '" + type +
                                "' (expected 'spatial' or 'doppler')");
  }
  if (j.contains("texture")) {
    const auto& jt = j.at("texture");
    const std::string model = jt.at("model").get<std::string>();
    if (model == "gaussian") {
      sc.texture.kind = TextureModel::Kind::kGaussian;
    } else if (model == "compound") {
      sc.texture.kind = TextureModel::Kind::kCompound;
      sc.texture.mu_tau = jt.at("mu_tau").get<double>();
      if (!(sc.texture.mu_tau > 0.0)) {
        throw std::invalid_argument("scenario_from_json: mu_tau must be positive");
      }
    } else {
      throw std::invalid_argument("scenario_from_json: unknown texture model '" + model + "'");
    }
  }
  if (j.contains("sinc")) {
    const std::string conv = j.at("sinc").get<std::string>();
    if (conv == "unnormalized") {
      sc.sinc = SincConvention::kUnnormalized;
    } else if (conv == "normalized") {
      sc.sinc = SincConvention::kNormalized;
    } else {
      throw std::invalid_argument("scenario_from_json: unknown sinc convention '" + conv + "'");
    }
  }
  return sc;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  if (const auto* sp = std::get_if<SpatialScenario>(&sc.model)) {
    j["type"] = "spatial";
    j["n"] = sp->n;
    j["noise_power_db"] = sp->noise_power_db;
    j["jammers"] = nlohmann::json::array();
    for (const Jammer& jam : sp->jammers) {
      j["jammers"].push_back({{"power_db", jam.power_db},
                              {"angle_deg", jam.angle_deg},
                              {"fractional_bandwidth", jam.fractional_bandwidth}});
    }
  } else {
    const auto& dp = std::get<DopplerScenario>(sc.model);
    j["type"] = "doppler";
    j["n"] = dp.n;
    j["cnr_s_db"] = dp.cnr_s_db;
    j["cnr_g_db"] = dp.cnr_g_db;
    j["rho_s"] = dp.rho_s;
    j["rho_g"] = dp.rho_g;
    j["f_s"] = dp.f_s;
    j["noise_power_db"] = dp.noise_power_db;
  }
  if (sc.texture.kind == TextureModel::Kind::kGaussian) {
    j["texture"] = {{"model", "gaussian"}};
  } else {
    j["texture"] = {{"model", "compound"}, {"mu_tau", sc.texture.mu_tau}};
  }
  j["sinc"] = sc.sinc == SincConvention::kUnnormalized ? "unnormalized" : "normalized";
  return j;
}

GaussianSampler::GaussianSampler(const HermitianMatrix& m) : f_(psd_factor(m)) {}

CVector GaussianSampler::draw(RngStream& rng) const {
  CVector z(f_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.next_circular();
  return f_ * z;
}

std::vector<CVector> GaussianSampler::draw_set(const RngStream& base, int k) const {
  if (k < 1) {
    throw std::invalid_argument("GaussianSampler::draw_set: need k >= 1, got " + std::to_string(k));
  }
  std::vector<CVector> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    RngStream sub = base.derive(static_cast<std::uint64_t>(i));
    out.push_back(draw(sub));
  }
  return out;
}

CompoundSampler::CompoundSampler(const HermitianMatrix& colored, double noise_power_db,
                                 double mu_tau)
    : f_(psd_factor(colored)),
      noise_sigma_(std::sqrt(db_to_linear(noise_power_db))),
      mu_tau_(mu_tau) {
  if (!(mu_tau > 0.0)) {
    throw std::invalid_argument("CompoundSampler: mu_tau must be positive, got " +
                                std::to_string(mu_tau));
  }
}

CVector CompoundSampler::draw_given_texture(RngStream& rng, double tau) const {
  const Eigen::Index n = f_.rows();
  CVector noise(n);
  for (Eigen::Index i = 0; i < n; ++i) noise[i] = noise_sigma_ * rng.next_circular();
  CVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.next_circular();
  return noise + std::sqrt(tau) * (f_ * z);
}

CVector CompoundSampler::draw(RngStream& rng) const {
  const double tau = rng.next_gamma(1.0 / mu_tau_, mu_tau_);
  return draw_given_texture(rng, tau);
}

std::vector<CVector> CompoundSampler::draw_set(const RngStream& base, int k) const {
  if (k < 1) {
    throw std::invalid_argument("CompoundSampler::draw_set: need k >= 1, got " + std::to_string(k));
  }
  std::vector<CVector> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    RngStream sub = base.derive(static_cast<std::uint64_t>(i));
    out.push_back(draw(sub));
  }
  return out;
}

std::vector<CVector> sample_gaussian(const HermitianMatrix& m, int k, const RngStream& rng) {
  return GaussianSampler(m).draw_set(rng, k);
}

std::vector<CVector> sample_compound(const HermitianMatrix& colored, double noise_power_db,
                                     double mu_tau, int k, const RngStream& rng) {
  return CompoundSampler(colored, noise_power_db, mu_tau).draw_set(rng, k);
}

}  // namespace covproj
