#include "covproj/baselines.hpp"

#include <cmath>
#include <string>

#include "covproj/errors.hpp"

namespace covproj {
namespace {

// Raw fixed-point map (n/K) sum r_i r_i^H / (r_i^H M^{-1} r_i), no trace
// renormalization. The quadratic form is evaluated through a refined
// pseudo-inverse solve so a barely singular iterate does not blow up first.
CMatrix fpe_map(const HermitianMatrix& m, const std::vector<CVector>& data) {
  const Eigen::Index n = m.dim();
  const HermitianSolver solver(m);
  CMatrix acc = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const CVector& r = data[i];
    const double q = r.dot(solver.solve(r)).real();
    if (!std::isfinite(q) || q <= 0.0) {
      throw NumericalError("fpe_solve: nonpositive whitened power " + std::to_string(q) +
                           " for datum " + std::to_string(i));
    }
    acc.noalias() += (r * r.adjoint()) / q;
  }
  acc *= static_cast<double>(n) / static_cast<double>(data.size());
  return acc;
}

void check_data(const char* func, const std::vector<CVector>& data) {
  if (data.empty()) {
    throw std::invalid_argument(std::string(func) + ": empty data set");
  }
  const Eigen::Index n = data.front().size();
  if (n == 0) {
    throw std::invalid_argument(std::string(func) + ": zero-dimensional data");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != n) {
      throw std::invalid_argument(std::string(func) + ": datum " + std::to_string(i) +
                                  " has dimension " + std::to_string(data[i].size()) +
                                  ", expected " + std::to_string(n));
    }
  }
}

}  // namespace

HermitianMatrix scm(const std::vector<CVector>& data) { return sample_covariance(data); }

HermitianMatrix nscm(const std::vector<CVector>& data) {
  check_data("nscm", data);
  const Eigen::Index n = data.front().size();
  CMatrix acc = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const CVector& r = data[i];
    const double power = r.squaredNorm();
    if (power < 1e-300) {
      throw std::invalid_argument("nscm: datum " + std::to_string(i) +
                                  " has vanishing power, cannot normalize");
    }
    acc.noalias() += (r * r.adjoint()) / power;
  }
  acc *= static_cast<double>(n) / static_cast<double>(data.size());
  return HermitianMatrix::from_full(acc);
}

FpeSolution fpe_solve(const std::vector<CVector>& data, const FpeConfig& cfg) {
  check_data("fpe_solve", data);
  const Eigen::Index n = data.front().size();
  if (static_cast<Eigen::Index>(data.size()) < n) {
    throw std::invalid_argument("fpe_solve: need at least n = " + std::to_string(n) +
                                " data vectors, got " + std::to_string(data.size()));
  }
  if (cfg.max_iter < 1) {
    throw std::invalid_argument("fpe_solve: max_iter must be positive");
  }
  if (!(cfg.rel_tol > 0.0)) {
    throw std::invalid_argument("fpe_solve: rel_tol must be positive");
  }

  FpeSolution out;
  HermitianMatrix m = nscm(data);
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    const CMatrix mapped = fpe_map(m, data);
    const double residual = (mapped - m.matrix()).norm() / m.frobenius_norm();
    if (iter == 0) out.initial_residual = residual;
    if (residual <= cfg.rel_tol) {
      out.matrix = m;
      out.iterations = iter;
      out.final_residual = residual;
      return out;
    }
    if (iter == cfg.max_iter) break;
    HermitianMatrix next = HermitianMatrix::from_full(mapped);
    m = next.scaled(static_cast<double>(n) / next.trace_real());
  }
  throw NumericalError("fpe_solve: no convergence within " + std::to_string(cfg.max_iter) +
                       " iterations");
}

HermitianMatrix fpe(const std::vector<CVector>& data, const FpeConfig& cfg) {
  return fpe_solve(data, cfg).matrix;
}

}  // namespace covproj
