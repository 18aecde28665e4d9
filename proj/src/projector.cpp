#include "covproj/projector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covproj/errors.hpp"
#include "covproj/tolerances.hpp"

namespace covproj {

namespace {

// Shared input validation: spectrum nonincreasing and finite, kappa >= 1,
// small negative eigenvalues (round-off from a PSD source) clamped to zero.
RVector checked_spectrum(const RVector& d_in, double kappa, const char* who) {
  if (d_in.size() == 0) {
    throw std::invalid_argument(std::string(who) + ": empty spectrum");
  }
  if (!d_in.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": spectrum has non-finite entries");
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument(std::string(who) + ": kappa must be finite and >= 1, got " +
                                std::to_string(kappa));
  }
  RVector d = d_in;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    if (d[i] > d[i - 1]) {
      throw std::invalid_argument(std::string(who) + ": spectrum must be nonincreasing");
    }
  }
  const double d1 = d[0];
  if (d1 < 0.0) {
    throw NumericalError(std::string(who) + ": spectrum is materially indefinite (d1 = " +
                         std::to_string(d1) + ")");
  }
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0) {
      if (d[i] >= -tol::kEigClamp * d1) {
        d[i] = 0.0;
      } else {
        throw NumericalError(std::string(who) + ": spectrum is materially indefinite (d_" +
                             std::to_string(i) + " = " + std::to_string(d[i]) + ")");
      }
    }
  }
  return d;
}

double checked_gauge_value(const GaugeFn& gauge, const RVector& h) {
  const double g = gauge(h);
  if (!std::isfinite(g) || g < 0.0) {
    throw std::invalid_argument("solve_u_generic: gauge returned an invalid value " +
                                std::to_string(g));
  }
  return g;
}

double frob_objective(const RVector& d, double u, double kappa) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double h = h_of_u(d[i], u, kappa);
    acc += h * h;
  }
  return std::sqrt(acc);
}

double spec_objective(const RVector& d, double u, double kappa) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    acc = std::max(acc, h_of_u(d[i], u, kappa));
  }
  return acc;
}

ShrinkageSolution finish(const RVector& d, double u, double kappa, SolverBranch branch,
                         double objective) {
  ShrinkageSolution sol;
  sol.u_star = u;
  sol.lambda_star = lambda_of_u(d, u, kappa);
  sol.objective = objective;
  sol.branch = branch;
  return sol;
}

// Interior stationary point of the summed squared deviations for
// d1 > kappa > 1, once the endpoint and identity shortcuts have been ruled
// out.  With v = [d_1 .. d_Nbar, 1] (Nbar = #{d_i > 1}), each interval
// between consecutive values of {v_i} u {v_i/kappa} has a fixed split of
// eigenvalues into "capped from above" (indices 1..beta) and "lifted from
// below" (indices alpha..N), giving the candidate
//
//   u = (kappa * sum_{i<=beta} d_i + sum_{i>=alpha} d_i)
//       / (N - alpha + 1 + beta * kappa^2)
//
// which is accepted when v_alpha < u <= v_{alpha-1} and
// v_{beta+1}/kappa <= u < v_beta/kappa.  Convexity guarantees exactly one
// interval accepts.
double interior_stationary_u(const RVector& d, double kappa) {
  const Eigen::Index n = d.size();
  const double d1 = d[0];

  Eigen::Index nbar = 0;
  while (nbar < n && d[nbar] > 1.0) ++nbar;
  std::vector<double> v(d.data(), d.data() + nbar);
  v.push_back(1.0);

  std::vector<double> bp;
  bp.reserve(2 * v.size() + 2);
  bp.push_back(d1);
  bp.push_back(1.0);
  for (double x : v) {
    if (x > 1.0 && x < d1) bp.push_back(x);
    const double xk = x / kappa;
    if (xk > 1.0 && xk < d1) bp.push_back(xk);
  }
  std::sort(bp.begin(), bp.end(), std::greater<>());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  // Prefix sums of d for the candidate formula.
  std::vector<double> pre(n + 1, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) pre[i + 1] = pre[i] + d[i];

  const auto v_at = [&](std::size_t idx1) {  // 1-based accessor
    return v[idx1 - 1];
  };

  for (std::size_t t = 0; t + 1 < bp.size(); ++t) {
    const double hi = bp[t];
    const double lo = bp[t + 1];
    if (!(lo < hi)) continue;
    const double probe = 0.5 * (lo + hi);

    std::size_t alpha = 1;
    while (alpha <= v.size() && v_at(alpha) >= probe) ++alpha;
    std::size_t beta = 0;
    while (beta < v.size() && v[beta] / kappa > probe) ++beta;

    const double num = kappa * pre[beta] + (pre[n] - pre[alpha - 1]);
    const double den =
        static_cast<double>(n) - static_cast<double>(alpha) + 1.0 + static_cast<double>(beta) * kappa * kappa;
    const double u = num / den;

    const bool left_ok = alpha <= v.size() && v_at(alpha) < u &&
                         (alpha == 1 || u <= v_at(alpha - 1));
    const bool right_ok = beta >= 1 && u < v_at(beta) / kappa &&
                          (beta == v.size() || v_at(beta + 1) / kappa <= u);
    if (left_ok && right_ok) return u;
  }
  throw NumericalError("solve_u_frobenius: interior stationary point not bracketed");
}

}  // namespace

GaugeFn euclidean_gauge() {
  return [](const RVector& h) { return h.norm(); };
}

GaugeFn max_gauge() {
  return [](const RVector& h) { return h.size() > 0 ? h.maxCoeff() : 0.0; };
}

GaugeFn kyfan_gauge() {
  return [](const RVector& h) { return h.sum(); };
}

GaugeFn named_gauge(const std::string& name) {
  if (name == "euclidean") return euclidean_gauge();
  if (name == "max") return max_gauge();
  if (name == "kyfan") return kyfan_gauge();
  throw std::invalid_argument("named_gauge: unknown gauge '" + name +
                              "' (known: euclidean, max, kyfan)");
}

const char* to_string(SolverBranch b) {
  switch (b) {
    case SolverBranch::kDegenerateZero: return "degenerate-zero";
    case SolverBranch::kKappaOne: return "kappa-one";
    case SolverBranch::kFrobCapWithinBound: return "frobenius-cap-within-bound";
    case SolverBranch::kFrobEndpointLow: return "frobenius-endpoint-low";
    case SolverBranch::kFrobEndpointHigh: return "frobenius-endpoint-high";
    case SolverBranch::kFrobSampleWithinCap: return "frobenius-sample-within-cap";
    case SolverBranch::kFrobInterior: return "frobenius-interior";
    case SolverBranch::kSpecAllAtFloor: return "spectral-all-at-floor";
    case SolverBranch::kSpecMidSpread: return "spectral-mid-spread";
    case SolverBranch::kSpecSampleWithinCap: return "spectral-sample-within-cap";
    case SolverBranch::kSpecTopHeavyFloor: return "spectral-top-heavy-floor";
    case SolverBranch::kSpecTopHeavyInterior: return "spectral-top-heavy-interior";
    case SolverBranch::kSpecWideInterior: return "spectral-wide-interior";
    case SolverBranch::kSpecWideSampleFeasible: return "spectral-wide-sample-feasible";
    case SolverBranch::kGaugeGoldenSection: return "gauge-golden-section";
  }
  return "unknown";
}

RVector lambda_of_u(const RVector& d, double u, double kappa) {
  if (!(kappa >= 1.0)) {
    throw std::invalid_argument("lambda_of_u: kappa must be >= 1");
  }
  if (u < 1.0 / kappa) {
    throw std::invalid_argument("lambda_of_u: u = " + std::to_string(u) +
                                " is below 1/kappa = " + std::to_string(1.0 / kappa));
  }
  RVector lam(d.size());
  const double cap = kappa * u;
  const double floor = std::max(1.0, u);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    lam[i] = std::min(cap, std::max(d[i], floor));
  }
  return lam;
}

// Piecewise closed form: for d > 1 the deviation is d - kappa*u below the
// cap knee, zero across [d/kappa, d), then u - d; for d <= 1 it is 1 - d
// until the floor starts moving and u - d after.  Evaluated through the same
// clamp as lambda_of_u so the two stay bitwise consistent.
double h_of_u(double d_i, double u, double kappa) {
  if (u < 1.0 / kappa) {
    throw std::invalid_argument("h_of_u: u = " + std::to_string(u) + " is below 1/kappa = " +
                                std::to_string(1.0 / kappa));
  }
  const double lam = std::min(kappa * u, std::max(d_i, std::max(1.0, u)));
  return std::abs(lam - d_i);
}

RVector abs_dev_at_u(const RVector& d, double u, double kappa) {
  return (lambda_of_u(d, u, kappa) - d).cwiseAbs();
}

ShrinkageSolution solve_u_frobenius(const RVector& d_in, double kappa) {
  const RVector d = checked_spectrum(d_in, kappa, "solve_u_frobenius");
  const Eigen::Index n = d.size();
  const double d1 = d[0];
  const double dn = d[n - 1];

  const auto done = [&](double u, SolverBranch b) {
    return finish(d, u, kappa, b, frob_objective(d, u, kappa));
  };

  if (d1 == 0.0) return done(1.0 / kappa, SolverBranch::kDegenerateZero);
  if (kappa == 1.0) return done(std::max(1.0, d.mean()), SolverBranch::kKappaOne);
  if (d1 <= kappa) return done(std::max(1.0, d1) / kappa, SolverBranch::kFrobCapWithinBound);

  // d1 > kappa > 1: check the slope at both ends of [1, d1] first.
  double slope_low = 0.0;  // right-derivative of the summed squares at u = 1
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[i] <= 1.0) {
      slope_low += 2.0 * (1.0 - d[i]);
    } else if (d[i] > kappa) {
      slope_low += 2.0 * kappa * (kappa - d[i]);
    }
  }
  if (slope_low >= 0.0) return done(1.0, SolverBranch::kFrobEndpointLow);

  double slope_high = 0.0;  // left-derivative at u = d1
  for (Eigen::Index i = 0; i < n; ++i) slope_high += 2.0 * (d1 - d[i]);
  if (slope_high <= 0.0) return done(d1, SolverBranch::kFrobEndpointHigh);

  if (d1 / kappa <= dn) return done(d1 / kappa, SolverBranch::kFrobSampleWithinCap);

  return done(interior_stationary_u(d, kappa), SolverBranch::kFrobInterior);
}

ShrinkageSolution solve_u_spectral(const RVector& d_in, double kappa) {
  const RVector d = checked_spectrum(d_in, kappa, "solve_u_spectral");
  const Eigen::Index n = d.size();
  const double d1 = d[0];
  const double dn = d[n - 1];

  const auto done = [&](double u, SolverBranch b) {
    return finish(d, u, kappa, b, spec_objective(d, u, kappa));
  };

  if (d1 == 0.0) return done(1.0 / kappa, SolverBranch::kDegenerateZero);
  if (kappa == 1.0) return done(std::max(1.0, 0.5 * (d1 + dn)), SolverBranch::kKappaOne);

  if (d1 <= 1.0) return done(1.0 / kappa, SolverBranch::kSpecAllAtFloor);
  if (d1 <= kappa) {
    if (dn <= 1.0) {
      return done(std::max((d1 + dn - 1.0) / kappa, 1.0 / kappa), SolverBranch::kSpecMidSpread);
    }
    return done(d1 / kappa, SolverBranch::kSpecSampleWithinCap);
  }
  // d1 > kappa
  if (dn <= 1.0) {
    const double eta = (d1 + dn - 1.0) / kappa;
    if (eta <= 1.0) {
      return done(std::max(eta, 1.0 / kappa), SolverBranch::kSpecTopHeavyFloor);
    }
    return done((d1 + dn) / (1.0 + kappa), SolverBranch::kSpecTopHeavyInterior);
  }
  if (dn <= d1 / kappa) {
    return done((d1 + dn) / (1.0 + kappa), SolverBranch::kSpecWideInterior);
  }
  return done(d1 / kappa, SolverBranch::kSpecWideSampleFeasible);
}

ShrinkageSolution solve_u_generic(const GaugeFn& gauge, const RVector& d_in, double kappa) {
  if (!gauge) {
    throw std::invalid_argument("solve_u_generic: gauge is empty");
  }
  const RVector d = checked_spectrum(d_in, kappa, "solve_u_generic");
  const Eigen::Index n = d.size();
  const double d1 = d[0];

  RVector h(n);
  const auto objective = [&](double u) {
    for (Eigen::Index i = 0; i < n; ++i) h[i] = h_of_u(d[i], u, kappa);
    return checked_gauge_value(gauge, h);
  };

  if (d1 == 0.0) {
    const double u = 1.0 / kappa;
    return finish(d, u, kappa, SolverBranch::kDegenerateZero, objective(u));
  }

  const double lo = 1.0 / kappa;
  const double hi = std::max(1.0, d1);

  // Golden-section shrink; the objective is convex in u, so the bracket
  // always contains a minimizer.
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double e = a + invphi * (b - a);
  double fc = objective(c);
  double fe = objective(e);
  double u_best;
  double f_best;
  while (b - a > tol::kGaugeSolveU) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + invphi * (b - a);
      fe = objective(e);
    }
  }
  if (fc <= fe) {
    u_best = c;
    f_best = fc;
  } else {
    u_best = e;
    f_best = fe;
  }
  const double f_lo = objective(lo);
  if (f_lo <= f_best) {
    u_best = lo;
    f_best = f_lo;
  }

  // Flat optima are reported at their left end: bisect for the smallest u
  // whose objective matches the minimum within a relative slack.
  const double accept = f_best + tol::kPlateauRel * (1.0 + f_best);
  double u_left = u_best;
  if (u_best > lo) {
    if (f_lo <= accept) {
      u_left = lo;
    } else {
      double l = lo, r = u_best;
      while (r - l > tol::kGaugeSolveU) {
        const double mid = 0.5 * (l + r);
        if (objective(mid) <= accept) {
          r = mid;
        } else {
          l = mid;
        }
      }
      u_left = r;
    }
  }
  return finish(d, u_left, kappa, SolverBranch::kGaugeGoldenSection, objective(u_left));
}

double oracle_u(const GaugeFn& gauge, const RVector& d_in, double kappa, std::int64_t grid_points) {
  if (!gauge) {
    throw std::invalid_argument("oracle_u: gauge is empty");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("oracle_u: need at least 2 grid points");
  }
  const RVector d = checked_spectrum(d_in, kappa, "oracle_u");
  const Eigen::Index n = d.size();
  const double lo = 1.0 / kappa;
  const double hi = std::max(1.0, d[0]) * (1.0 + 1e-6);
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);

  RVector h(n);
  double best_u = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::int64_t p = 0; p < grid_points; ++p) {
    const double u = lo + step * static_cast<double>(p);
    h = abs_dev_at_u(d, u, kappa);
    const double f = checked_gauge_value(gauge, h);
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
  }
  return best_u;
}

double oracle_u(NormKind kind, const RVector& d_in, double kappa, std::int64_t grid_points) {
  if (kind == NormKind::kGauge) {
    throw std::invalid_argument("oracle_u: pass the gauge function for NormKind::kGauge");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("oracle_u: need at least 2 grid points");
  }
  const RVector d = checked_spectrum(d_in, kappa, "oracle_u");
  const Eigen::Index n = d.size();
  const double lo = 1.0 / kappa;
  const double hi = std::max(1.0, d[0]) * (1.0 + 1e-6);
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const bool is_frob = kind == NormKind::kFrobenius;

  // Branch-free blocked scan; the per-block inner loops vectorize.
  constexpr std::int64_t kBlock = 2048;
  std::array<double, kBlock> uu;
  std::array<double, kBlock> acc;
  std::array<double, kBlock> floor_of;  // max(1, u) per grid point

  double best_u = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::int64_t base = 0; base < grid_points; base += kBlock) {
    const std::int64_t len = std::min(kBlock, grid_points - base);
    for (std::int64_t p = 0; p < len; ++p) {
      uu[p] = lo + step * static_cast<double>(base + p);
      acc[p] = 0.0;
      floor_of[p] = std::max(1.0, uu[p]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double di = d[i];
      if (is_frob) {
        for (std::int64_t p = 0; p < len; ++p) {
          const double lam = std::min(kappa * uu[p], std::max(di, floor_of[p]));
          const double dev = std::abs(lam - di);
          acc[p] += dev * dev;
        }
      } else {
        for (std::int64_t p = 0; p < len; ++p) {
          const double lam = std::min(kappa * uu[p], std::max(di, floor_of[p]));
          acc[p] = std::max(acc[p], std::abs(lam - di));
        }
      }
    }
    for (std::int64_t p = 0; p < len; ++p) {
      if (acc[p] < best_f) {
        best_f = acc[p];
        best_u = uu[p];
      }
    }
  }
  return best_u;
}

HermitianMatrix normalize(const HermitianMatrix& s_hat, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("normalize: sigma2 must be positive and finite, got " +
                                std::to_string(sigma2));
  }
  return s_hat.scaled(1.0 / sigma2);
}

Projection project(const HermitianMatrix& s_hat, const ProjectionConfig& config) {
  if (!(config.kappa >= 1.0) || !std::isfinite(config.kappa)) {
    throw std::invalid_argument("project: kappa must be finite and >= 1, got " +
                                std::to_string(config.kappa));
  }
  const HermitianMatrix s = normalize(s_hat, config.sigma2);
  const SpectralDecomposition eig = eig_hermitian(s);

  ShrinkageSolution sol;
  switch (config.norm) {
    case NormKind::kFrobenius:
      sol = solve_u_frobenius(eig.d, config.kappa);
      break;
    case NormKind::kSpectral:
      sol = solve_u_spectral(eig.d, config.kappa);
      break;
    case NormKind::kGauge:
      if (!config.gauge) {
        throw std::invalid_argument("project: NormKind::kGauge requires a gauge function");
      }
      sol = solve_u_generic(config.gauge, eig.d, config.kappa);
      break;
  }

  CMatrix x = eig.u * sol.lambda_star.asDiagonal() * eig.u.adjoint();
  Projection out;
  out.m_hat = HermitianMatrix::from_full(x * config.sigma2);
  out.solution = std::move(sol);
  return out;
}

}  // namespace covproj
