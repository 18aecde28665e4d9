#ifndef COVPROJ_TESTS_SUPPORT_HPP
#define COVPROJ_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "covproj/hermitian.hpp"
#include "covproj/rng.hpp"

namespace covproj::testsupport {

inline CMatrix random_complex_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix g(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) g(r, c) = rng.next_circular();
  }
  return g;
}

// Random PSD matrix G G^H / rank with the given rank (full rank by default).
inline HermitianMatrix random_psd(RngStream& rng, Eigen::Index n, Eigen::Index rank = -1) {
  if (rank < 0) rank = n;
  const CMatrix g = random_complex_matrix(rng, n, rank);
  return HermitianMatrix::from_full(g * g.adjoint() / static_cast<double>(rank));
}

inline CMatrix random_unitary(RngStream& rng, Eigen::Index n) {
  const Eigen::HouseholderQR<CMatrix> qr(random_complex_matrix(rng, n, n));
  return CMatrix(qr.householderQ());
}

// Descending spectrum with entries log-uniform in [lo, hi].
inline RVector random_descending_spectrum(RngStream& rng, Eigen::Index n, double lo, double hi) {
  RVector d(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = std::exp(llo + (lhi - llo) * rng.next_unit());
  }
  std::sort(d.data(), d.data() + n, std::greater<>());
  return d;
}

}  // namespace covproj::testsupport

#endif
