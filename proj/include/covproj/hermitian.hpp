#ifndef COVPROJ_HERMITIAN_HPP
#define COVPROJ_HERMITIAN_HPP

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace covproj {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Hermitian matrix with the symmetry enforced structurally: every
// constructor funnels through (A + A^H)/2, which in IEEE arithmetic makes
// entry (i,j) the exact conjugate of entry (j,i) and the diagonal exactly
// real.  Consumers can therefore rely on bit-level symmetry.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  // Symmetrize a full matrix.  If sym_tol >= 0, first validate that the
  // asymmetry max|A(i,j) - conj(A(j,i))| is within sym_tol * max(1, max|A|).
  static HermitianMatrix from_full(const CMatrix& a, double sym_tol = -1.0);
  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix from_diagonal(const RVector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  std::complex<double> operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace_real() const { return m_.diagonal().real().sum(); }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix scaled(double a) const;
  HermitianMatrix plus_diagonal(double a) const;

 private:
  explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

// Eigendecomposition of a Hermitian matrix: m = u * diag(d) * u^H with d
// sorted descending and u unitary.
struct SpectralDecomposition {
  CMatrix u;
  RVector d;
};

// Throws NumericalError if the eigensolver fails to converge.
SpectralDecomposition eig_hermitian(const HermitianMatrix& m);

// Spectral solve kit: factor once, apply the (pseudo-)inverse many times.
// Eigenvalues with |d_i| <= n * kPinvRel * max|d| are treated as zero, so
// singular inputs fall back to the minimum-norm least-squares solution.
class HermitianSolver {
 public:
  explicit HermitianSolver(const HermitianMatrix& m);

  CVector solve(const CVector& rhs) const;
  const SpectralDecomposition& eig() const { return eig_; }
  Eigen::Index rank() const { return rank_; }

 private:
  CVector apply_pinv(const CVector& rhs) const;
  CMatrix a_;
  SpectralDecomposition eig_;
  double cutoff_ = 0.0;
  Eigen::Index rank_ = 0;
};

// (1/K) sum_i r_i r_i^H, accumulated in datum-index order (bit-reproducible
// for a fixed input order; see the concurrency notes in harness.hpp).
HermitianMatrix sample_covariance(std::span<const CVector> data);

// Factor F with F F^H = a.  Eigenvalues slightly negative from round-off
// are clamped to zero; materially indefinite input is rejected.
CMatrix psd_factor(const HermitianMatrix& a);

// w solving m w = s; pseudo-inverse solution when m is singular.
CVector solve_weight(const HermitianMatrix& m, const CVector& s);

// Moore-Penrose pseudo-inverse via the spectral decomposition.
HermitianMatrix pseudo_inverse(const HermitianMatrix& m);

}  // namespace covproj

#endif
