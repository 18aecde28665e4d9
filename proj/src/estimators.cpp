#include "covproj/estimators.hpp"

#include <stdexcept>
#include <utility>

namespace covproj {
namespace {

std::string registry_list() {
  std::string out;
  for (const std::string& name : estimator_registry_names()) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

Estimator projecting_estimator(NormKind norm, GaugeFn gauge, const EstimatorContext& ctx) {
  ProjectionConfig cfg;
  cfg.sigma2 = ctx.sigma2;
  cfg.kappa = ctx.kappa;
  cfg.norm = norm;
  cfg.gauge = std::move(gauge);
  return [cfg](const std::vector<CVector>& data) {
    return project(sample_covariance(data), cfg).m_hat;
  };
}

}  // namespace

std::vector<std::string> estimator_registry_names() {
  return {"fne",  "sne",  "gauge:euclidean", "gauge:max", "gauge:kyfan",
          "scm",  "nscm", "fpe",             "clairvoyant"};
}

Estimator make_estimator(const std::string& name, const EstimatorContext& ctx) {
  if (name == "fne") return projecting_estimator(NormKind::kFrobenius, {}, ctx);
  if (name == "sne") return projecting_estimator(NormKind::kSpectral, {}, ctx);
  if (name.rfind("gauge:", 0) == 0) {
    return projecting_estimator(NormKind::kGauge, named_gauge(name.substr(6)), ctx);
  }
  if (name == "scm") {
    return [](const std::vector<CVector>& data) { return scm(data); };
  }
  if (name == "nscm") {
    return [](const std::vector<CVector>& data) { return nscm(data); };
  }
  if (name == "fpe") {
    return [cfg = ctx.fpe](const std::vector<CVector>& data) { return fpe(data, cfg); };
  }
  if (name == "clairvoyant") {
    if (ctx.m_true == nullptr) {
      throw std::invalid_argument("make_estimator: clairvoyant requires the true covariance");
    }
    return [m = ctx.m_true](const std::vector<CVector>&) { return *m; };
  }
  if (name == "cml" || name == "fml" || name == "lre") {
    throw std::invalid_argument("make_estimator: estimator '" + name +
                                "' is recognized but out of scope for this library; available: " +
                                registry_list());
  }
  throw std::invalid_argument("make_estimator: unknown estimator '" + name +
                              "'; available: " + registry_list());
}

}  // namespace covproj
