#include "covproj/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covproj/errors.hpp"
#include "covproj/tolerances.hpp"

namespace covproj {

HermitianMatrix HermitianMatrix::from_full(const CMatrix& a, double sym_tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("HermitianMatrix::from_full: matrix must be square, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("HermitianMatrix::from_full: matrix has non-finite entries");
  }
  if (sym_tol >= 0.0) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (asym > sym_tol * scale) {
      throw std::invalid_argument("HermitianMatrix::from_full: asymmetry " + std::to_string(asym) +
                                  " exceeds tolerance at scale " + std::to_string(scale));
    }
  }
  return HermitianMatrix(((a + a.adjoint()) * 0.5).eval());
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) {
  return HermitianMatrix(CMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::from_diagonal(const RVector& d) {
  CMatrix m = CMatrix::Zero(d.size(), d.size());
  m.diagonal() = d.cast<std::complex<double>>();
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::scaled(double a) const {
  return HermitianMatrix((m_ * a).eval());
}

HermitianMatrix HermitianMatrix::plus_diagonal(double a) const {
  CMatrix m = m_;
  m.diagonal().array() += a;
  return HermitianMatrix(std::move(m));
}

SpectralDecomposition eig_hermitian(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: eigensolver failed to converge (n=" +
                         std::to_string(m.dim()) + ")");
  }
  // Eigen returns ascending order; flip to descending.
  SpectralDecomposition out;
  out.d = es.eigenvalues().reverse();
  out.u = es.eigenvectors().rowwise().reverse();
  return out;
}

HermitianSolver::HermitianSolver(const HermitianMatrix& m)
    : a_(m.matrix()), eig_(eig_hermitian(m)) {
  const double dmax = eig_.d.size() > 0 ? eig_.d.cwiseAbs().maxCoeff() : 0.0;
  cutoff_ = static_cast<double>(eig_.d.size()) * tol::kPinvRel * dmax;
  rank_ = (eig_.d.cwiseAbs().array() > cutoff_).count();
}

CVector HermitianSolver::apply_pinv(const CVector& rhs) const {
  CVector coeff = eig_.u.adjoint() * rhs;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) {
    coeff[i] = std::abs(eig_.d[i]) > cutoff_ ? coeff[i] / eig_.d[i] : std::complex<double>(0, 0);
  }
  return eig_.u * coeff;
}

CVector HermitianSolver::solve(const CVector& rhs) const {
  if (rhs.size() != a_.rows()) {
    throw std::invalid_argument("HermitianSolver::solve: rhs size " + std::to_string(rhs.size()) +
                                " does not match dimension " + std::to_string(a_.rows()));
  }
  CVector w = apply_pinv(rhs);
  // One step of iterative refinement keeps the residual near round-off even
  // for ill-conditioned (but numerically nonsingular) systems; for singular
  // systems the correction lies in the range space and is harmless.
  w += apply_pinv(rhs - a_ * w);
  return w;
}

HermitianMatrix sample_covariance(std::span<const CVector> data) {
  if (data.empty()) {
    throw std::invalid_argument("sample_covariance: need at least one datum");
  }
  const Eigen::Index n = data[0].size();
  if (n == 0) {
    throw std::invalid_argument("sample_covariance: data must be non-empty vectors");
  }
  CMatrix acc = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != n) {
      throw std::invalid_argument("sample_covariance: datum " + std::to_string(i) + " has size " +
                                  std::to_string(data[i].size()) + ", expected " +
                                  std::to_string(n));
    }
    acc.noalias() += data[i] * data[i].adjoint();
  }
  acc *= 1.0 / static_cast<double>(data.size());
  return HermitianMatrix::from_full(acc);
}

CMatrix psd_factor(const HermitianMatrix& a) {
  SpectralDecomposition eig = eig_hermitian(a);
  const double scale = eig.d.size() > 0 ? eig.d.cwiseAbs().maxCoeff() : 0.0;
  const double dmin = eig.d.size() > 0 ? eig.d.minCoeff() : 0.0;
  if (dmin < -tol::kIndefinite * scale) {
    throw NumericalError("psd_factor: matrix is materially indefinite (min eigenvalue " +
                         std::to_string(dmin) + ")");
  }
  RVector root = eig.d.cwiseMax(0.0).cwiseSqrt();
  return eig.u * root.asDiagonal();
}

CVector solve_weight(const HermitianMatrix& m, const CVector& s) {
  return HermitianSolver(m).solve(s);
}

HermitianMatrix pseudo_inverse(const HermitianMatrix& m) {
  HermitianSolver solver(m);
  const SpectralDecomposition& eig = solver.eig();
  const double dmax = eig.d.size() > 0 ? eig.d.cwiseAbs().maxCoeff() : 0.0;
  const double cutoff = static_cast<double>(eig.d.size()) * tol::kPinvRel * dmax;
  RVector inv = RVector::Zero(eig.d.size());
  for (Eigen::Index i = 0; i < eig.d.size(); ++i) {
    if (std::abs(eig.d[i]) > cutoff) inv[i] = 1.0 / eig.d[i];
  }
  CMatrix out = eig.u * inv.asDiagonal() * eig.u.adjoint();
  return HermitianMatrix::from_full(out);
}

}  // namespace covproj
