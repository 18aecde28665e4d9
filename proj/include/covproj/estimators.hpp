#ifndef COVPROJ_ESTIMATORS_HPP
#define COVPROJ_ESTIMATORS_HPP

#include <functional>
#include <string>
#include <vector>

#include "covproj/baselines.hpp"
#include "covproj/hermitian.hpp"
#include "covproj/projector.hpp"

namespace covproj {

// Everything a registry estimator may need beyond the data themselves.
// m_true backs the clairvoyant pseudo-estimator and must stay alive for as
// long as the estimator callable is used.
struct EstimatorContext {
  double sigma2 = 1.0;  // projector floor, linear power
  double kappa = 1.0;   // projector condition-number cap
  FpeConfig fpe;
  const HermitianMatrix* m_true = nullptr;
};

using Estimator = std::function<HermitianMatrix(const std::vector<CVector>&)>;

// Names accepted by make_estimator, in display order:
//   fne, sne, gauge:euclidean, gauge:max, gauge:kyfan, scm, nscm, fpe,
//   clairvoyant
std::vector<std::string> estimator_registry_names();

// Resolve a registry name to a callable. The reserved names cml, fml and
// lre are recognized but rejected (no implementation is provided); unknown
// names are rejected too. Both errors list the accepted names.
Estimator make_estimator(const std::string& name, const EstimatorContext& ctx);

}  // namespace covproj

#endif
