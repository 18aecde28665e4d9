#ifndef COVPROJ_SCENARIOS_HPP
#define COVPROJ_SCENARIOS_HPP

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "covproj/hermitian.hpp"
#include "covproj/rng.hpp"

namespace covproj {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// sinc used by the wideband jammer correlation.  The argument is already in
// radians, so the plain sin(x)/x form is the default; the normalized
// variant is kept switchable for sensitivity runs.
enum class SincConvention { kUnnormalized, kNormalized };

struct Jammer {
  double power_db = 0.0;
  double angle_deg = 0.0;
  double fractional_bandwidth = 0.0;  // in [0, 1]
};

// Uniform linear array looking at wideband jammers in white noise.
struct SpatialScenario {
  int n = 8;
  std::vector<Jammer> jammers;
  double noise_power_db = 0.0;
};

// Slow-time snapshot with sea and ground clutter in white noise.
struct DopplerScenario {
  int n = 16;
  double cnr_s_db = 10.0;   // sea clutter power, dB
  double cnr_g_db = 25.0;   // ground clutter power, dB
  double rho_s = 0.8;       // sea one-lag correlation, [0, 1)
  double rho_g = 0.95;      // ground one-lag correlation, [0, 1)
  double f_s = 0.2;         // sea normalized Doppler, [-1/2, 1/2)
  double noise_power_db = 0.0;
};

struct TextureModel {
  enum class Kind { kGaussian, kCompound };
  Kind kind = Kind::kGaussian;
  double mu_tau = 2.0;  // texture scale parameter (compound only); mean is 1
};

struct Scenario {
  std::variant<SpatialScenario, DopplerScenario> model;
  TextureModel texture;
  SincConvention sinc = SincConvention::kUnnormalized;
};

// Array steering vector, half-wavelength spacing: entry k = e^{j pi sin(theta) k}.
CVector steering_spatial(double theta_deg, int n);
// Doppler steering vector: entry k = e^{j 2 pi nu k}.
CVector steering_doppler(double nu, int n);

// Jammer-only covariance (no white floor): entry (r, c) sums
// power_i * sinc(0.5 * B_f * (r - c) * phi_i) * e^{j (r - c) phi_i}
// over jammers, with phi_i = pi sin(theta_i).
HermitianMatrix jammer_covariance(const SpatialScenario& sc,
                                  SincConvention sinc = SincConvention::kUnnormalized);

// Clutter-only covariance: entry (r, c) is
// CNR_s * rho_s^{(r-c)^2} e^{j 2 pi (r-c) f_s} + CNR_g * rho_g^{|r-c|}.
HermitianMatrix clutter_covariance(const DopplerScenario& sc);

// colored + 10^(noise_db/10) * I.
HermitianMatrix total_covariance(const HermitianMatrix& colored, double noise_power_db);

// Condition number of the true covariance; throws if it is singular.
double true_kappa(const HermitianMatrix& m);

// Scenario-level helpers used by the harness.
HermitianMatrix colored_covariance(const Scenario& sc);
int scenario_dim(const Scenario& sc);
double scenario_noise_power_db(const Scenario& sc);
std::string scenario_type_name(const Scenario& sc);
CVector scenario_steering(const Scenario& sc, double grid_value);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& sc);

// Zero-mean circular Gaussian draws with covariance m.  The factor is
// computed once; datum i of a set is generated from base.derive(i), so a
// set is reproducible regardless of threading or draw order.
class GaussianSampler {
 public:
  explicit GaussianSampler(const HermitianMatrix& m);
  Eigen::Index dim() const { return f_.rows(); }
  CVector draw(RngStream& rng) const;
  std::vector<CVector> draw_set(const RngStream& base, int k) const;

 private:
  CMatrix f_;
};

// Compound-Gaussian draws: r = noise + sqrt(tau) * speckle, with speckle
// covariance `colored`, white noise at noise_power_db, and tau gamma
// distributed with unit mean (shape 1/mu_tau, scale mu_tau).
class CompoundSampler {
 public:
  CompoundSampler(const HermitianMatrix& colored, double noise_power_db, double mu_tau);
  Eigen::Index dim() const { return f_.rows(); }
  CVector draw(RngStream& rng) const;
  // Test hook: with tau pinned to 1 this reduces to a Gaussian with
  // covariance colored + noise * I.
  CVector draw_given_texture(RngStream& rng, double tau) const;
  std::vector<CVector> draw_set(const RngStream& base, int k) const;

 private:
  CMatrix f_;
  double noise_sigma_ = 1.0;
  double mu_tau_ = 2.0;
};

std::vector<CVector> sample_gaussian(const HermitianMatrix& m, int k, const RngStream& rng);
std::vector<CVector> sample_compound(const HermitianMatrix& colored, double noise_power_db,
                                     double mu_tau, int k, const RngStream& rng);

}  // namespace covproj

#endif
