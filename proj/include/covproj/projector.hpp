#ifndef COVPROJ_PROJECTOR_HPP
#define COVPROJ_PROJECTOR_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "covproj/hermitian.hpp"

namespace covproj {

// Estimates a disturbance covariance from a sample covariance s_hat by
// shrinking its eigenvalues onto the set
//
//   { M : M >= sigma2 * I,  cond(M) <= kappa }
//
// under a unitarily invariant norm.  The minimizer keeps the sample
// eigenvectors; with S = s_hat / sigma2 and spectrum d (descending), the
// shrunk spectrum is parameterized by a scalar u >= 1/kappa:
//
//   lambda_i(u) = min(kappa * u, max(d_i, max(1, u)))
//
// and the solvers below pick u minimizing the gauge of the deviations
// h_i(u) = |lambda_i(u) - d_i|.  Frobenius and spectral norms have closed
// forms; any other symmetric monotone gauge goes through a 1-D search.

// Symmetric gauge on the nonnegative deviation vector.  Must be finite and
// nonnegative; the solver validates every evaluation.
using GaugeFn = std::function<double(const RVector&)>;

GaugeFn euclidean_gauge();  // sqrt(sum h_i^2)   (Frobenius norm)
GaugeFn max_gauge();        // max h_i           (spectral norm)
GaugeFn kyfan_gauge();      // sum h_i           (trace norm)
// Lookup by name ("euclidean", "max", "kyfan"); throws on unknown names.
GaugeFn named_gauge(const std::string& name);

enum class NormKind { kFrobenius, kSpectral, kGauge };

struct ProjectionConfig {
  double sigma2 = 1.0;  // white floor, linear power
  double kappa = 1.0;   // condition-number cap, >= 1
  NormKind norm = NormKind::kFrobenius;
  GaugeFn gauge;  // required when norm == kGauge
};

enum class SolverBranch {
  kDegenerateZero,  // all-zero spectrum: estimate is sigma2 * I
  kKappaOne,        // cap 1: feasible set is {c * I, c >= 1}
  // Frobenius
  kFrobCapWithinBound,   // d1 <= kappa: left edge of the zero-cost band
  kFrobEndpointLow,      // objective already rising at u = 1
  kFrobEndpointHigh,     // objective still falling at u = d1
  kFrobSampleWithinCap,  // dN >= d1/kappa: sample spectrum kept
  kFrobInterior,         // interior stationary point
  // Spectral
  kSpecAllAtFloor,          // d1 <= 1: estimate is the floor itself
  kSpecMidSpread,           // 1 < d1 <= kappa, dN <= 1
  kSpecSampleWithinCap,     // 1 < d1 <= kappa, dN > 1: estimate equals S
  kSpecTopHeavyFloor,       // d1 > kappa, dN <= 1, floor still active
  kSpecTopHeavyInterior,    // d1 > kappa, dN <= 1, balanced interior point
  kSpecWideInterior,        // d1 > kappa, dN > 1, cap and tail both active
  kSpecWideSampleFeasible,  // d1 > kappa, dN > d1/kappa: estimate equals S
  // Generic gauge
  kGaugeGoldenSection,
};

const char* to_string(SolverBranch b);

struct ShrinkageSolution {
  double u_star = 0.0;
  RVector lambda_star;  // descending, >= 1, cond <= kappa
  double objective = 0.0;
  SolverBranch branch = SolverBranch::kDegenerateZero;
};

// Shrunk spectrum at a given u (requires u >= 1/kappa).
RVector lambda_of_u(const RVector& d, double u, double kappa);

// Per-eigenvalue deviation |lambda_i(u) - d_i| in closed form.
double h_of_u(double d_i, double u, double kappa);

// Deviation vector evaluated from lambda_of_u directly (used by the grid
// oracle and tests so the check does not share the closed-form branches).
RVector abs_dev_at_u(const RVector& d, double u, double kappa);

ShrinkageSolution solve_u_frobenius(const RVector& d, double kappa);
ShrinkageSolution solve_u_spectral(const RVector& d, double kappa);
ShrinkageSolution solve_u_generic(const GaugeFn& gauge, const RVector& d, double kappa);

// Exhaustive reference: argmin of gauge(|lambda(u) - d|) over a uniform
// grid of grid_points values spanning [1/kappa, max(1, d1) * (1 + 1e-6)].
// The NormKind overload is a tight branch-free loop for the two closed-form
// norms (kGauge is rejected there; pass the gauge explicitly instead).
double oracle_u(const GaugeFn& gauge, const RVector& d, double kappa, std::int64_t grid_points);
double oracle_u(NormKind kind, const RVector& d, double kappa, std::int64_t grid_points);

HermitianMatrix normalize(const HermitianMatrix& s_hat, double sigma2);

struct Projection {
  HermitianMatrix m_hat;
  ShrinkageSolution solution;
};

// Full pipeline: normalize, eigendecompose, shrink the spectrum, rebuild.
Projection project(const HermitianMatrix& s_hat, const ProjectionConfig& config);

}  // namespace covproj

#endif
