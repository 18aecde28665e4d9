#ifndef COVPROJ_BASELINES_HPP
#define COVPROJ_BASELINES_HPP

#include <vector>

#include "covproj/hermitian.hpp"
#include "covproj/tolerances.hpp"

namespace covproj {

// Configuration for the fixed-point covariance estimator.
struct FpeConfig {
  int max_iter = tol::kFpeMaxIter;
  double rel_tol = tol::kFpeRelTol;
};

// Diagnostics for a fixed-point solve. `iterations` counts updates actually
// applied (0 means the start point already satisfied the residual test).
struct FpeSolution {
  HermitianMatrix matrix;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
};

// Sample covariance (1/K) sum r_i r_i^H.
HermitianMatrix scm(const std::vector<CVector>& data);

// Normalized sample covariance (n/K) sum r_i r_i^H / (r_i^H r_i).
// Scale-invariant per datum; requires every datum to carry nonzero power.
HermitianMatrix nscm(const std::vector<CVector>& data);

// Fixed-point covariance estimator: starting from nscm, iterate
//   M <- (n/K) sum r_i r_i^H / (r_i^H M^{-1} r_i)
// with each iterate renormalized to trace n, until the relative residual
// ||M - T(M)||_F / ||M||_F drops to cfg.rel_tol. Requires K >= n.
FpeSolution fpe_solve(const std::vector<CVector>& data, const FpeConfig& cfg = {});

// Convenience wrapper returning only the converged matrix.
HermitianMatrix fpe(const std::vector<CVector>& data, const FpeConfig& cfg = {});

}  // namespace covproj

#endif
