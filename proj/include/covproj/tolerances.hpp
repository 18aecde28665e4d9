#ifndef COVPROJ_TOLERANCES_HPP
#define COVPROJ_TOLERANCES_HPP

namespace covproj::tol {

// Numerical policy knobs, collected in one place so experiments can tweak
// them without hunting through the solvers.  Tests pin the defaults.

// Hermitian-symmetry check on JSON ingest, relative to the matrix scale.
inline constexpr double kIngestSymmetry = 1e-9;

// Relative eigenvalue cutoff factor for pseudo-inverse / weight solves:
// eigenvalues below n * kPinvRel * max|d| are treated as zero.
inline constexpr double kPinvRel = 1e-12;

// Sample-covariance eigenvalues in [-kEigClamp * d1, 0) are clamped to zero
// before projection; anything below -kIndefinite * scale is rejected as
// materially indefinite.
inline constexpr double kEigClamp = 1e-10;
inline constexpr double kIndefinite = 1e-6;

// Generic gauge solver: golden-section bracket width on u, and the relative
// objective slack used when bisecting toward the left end of a flat optimum.
inline constexpr double kGaugeSolveU = 1e-10;
inline constexpr double kPlateauRel = 1e-12;

// Fixed-point estimator defaults.
inline constexpr int kFpeMaxIter = 100;
inline constexpr double kFpeRelTol = 1e-8;

// Floor applied when converting a zero average SINR to decibels.
inline constexpr double kDbFloor = -300.0;

}  // namespace covproj::tol

#endif
