#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fgap/core.hpp"
#include "fgap/periods.hpp"
#include "fgap/solution.hpp"
#include "fgap/theta.hpp"

namespace fgap {

struct ChargeReport {
  IVector n;               ///< winding values from the theta-ratio form
  RVector totals;          ///< the real totals before rounding
  IVector n_direct;        ///< winding of u along the torus cycles
  IVector n_closed;
  IVector epsilon_tilde;
  double density = 0.0;
  double density_direct = 0.0;
  double horizon = 0.0;
  bool match = false;
};

struct WindingOptions {
  bool flip_symbol = false;  ///< build eps~ from -s (the alternate-K bookkeeping)
  double integer_tolerance = 0.01;
};

/// eps~_j = (-1)^j s_j for j <= m (one-based), 0 otherwise.
inline IVector epsilon_tilde(const IVector& s, int g, bool flip = false) {
  IVector e = IVector::Zero(g);
  for (int j = 1; j <= s.size(); ++j) e[j - 1] = (j % 2 == 0 ? 1 : -1) * (flip ? -s[j - 1] : s[j - 1]);
  return e;
}

namespace detail {

inline int checked_integer(double total, double tol) {
  const double r = std::round(total);
  if (std::abs(total - r) > tol) throw TrackingError("winding total is not an integer: " + std::to_string(total));
  return static_cast<int>(r);
}

inline cplx theta_checked(const ThetaContext& ctx, const CVector& z) {
  const auto r = reduce(ctx, z);
  const cplx v = theta(ctx, r.z0);
  if (std::abs(v) < theta_floor) throw SingularDataError("theta underflow along the winding path");
  return v * std::exp(r.log_factor);
}

}  // namespace detail

/// n_j = -eps~_j + 2 Delta arg [theta(B eps~/2 + z_j(T)) / theta(z_j(T))] / (2 pi),
/// z_j(T) = z(0,0) - T e_j, T in [0, 1].
inline RVector winding_totals(const SolutionParams& p, const WindingOptions& opt = {}) {
  const auto& pd = p.periods;
  const IVector et = epsilon_tilde(p.torus.s, pd.g, opt.flip_symbol);
  const CVector shift = 0.5 * pd.B * et.cast<cplx>();
  RVector totals(pd.g);
  for (int j = 0; j < pd.g; ++j) {
    auto f = [&](double T) {
      CVector z = p.base;
      z[j] -= T;
      return detail::theta_checked(*p.ctx, shift + z) / detail::theta_checked(*p.ctx, z);
    };
    totals[j] = -et[j] + 2.0 * track_argument(f) / (2.0 * pi);
  }
  return totals;
}

inline IVector winding_charges(const SolutionParams& p, const WindingOptions& opt = {}) {
  const RVector t = winding_totals(p, opt);
  IVector n(t.size());
  for (int j = 0; j < t.size(); ++j) n[j] = detail::checked_integer(t[j], opt.integer_tolerance);
  return n;
}

/// Winding of u itself along z(0,0) - T e_j, T in [0, 1].
inline IVector winding_direct(const SolutionParams& p, double tol = 0.01) {
  IVector n(p.periods.g);
  for (int j = 0; j < p.periods.g; ++j) {
    auto f = [&](double T) {
      CVector z = p.base;
      z[j] -= T;
      return exp_iu_at(p, z);
    };
    n[j] = detail::checked_integer(track_argument(f) / (2.0 * pi), tol);
  }
  return n;
}

/// n_j = (-1)^{j-1} s_j for j <= m, 0 otherwise.
inline IVector closed_form_charges(int g, int m, const IVector& s) {
  if (s.size() != m) throw Error("closed_form_charges: s must have length m");
  IVector n = IVector::Zero(g);
  for (int j = 1; j <= m; ++j) n[j - 1] = (j % 2 == 1 ? 1 : -1) * s[j - 1];
  return n;
}

/// Charge density sum_j (iU_j - iV_j) n_j / 4.
inline double density(const PeriodData& pd, const IVector& n) {
  return ((I * (pd.U - pd.V)).transpose() * n.cast<cplx>())(0, 0).real() / 4.0;
}

/// (u(T, 0) - u(0, 0)) / (2 pi T).
inline double density_direct(const SolutionParams& p, double horizon) {
  if (horizon < 50.0) throw Error("density_direct: horizon must be at least 50");
  const auto u = u_along(p, {{0.0, 0.0}, {horizon, 0.0}});
  return (u[1] - u[0]) / (2.0 * pi * horizon);
}

/// max over x in [T/2, T] of |u(x) - u(0) - 2 pi nbar x| / (2 pi T), sampled every `step`.
inline double density_deviation(const SolutionParams& p, double nbar, double horizon, double step = 0.25) {
  std::vector<std::pair<double, double>> pts;
  const int n = static_cast<int>(std::ceil(horizon / step));
  for (int i = 0; i <= n; ++i) pts.emplace_back(horizon * i / n, 0.0);
  const auto u = u_along(p, pts);
  double dev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = pts[i].first;
    if (x < 0.5 * horizon) continue;
    dev = std::max(dev, std::abs(u[i] - u[0] - 2.0 * pi * nbar * x));
  }
  return dev / (2.0 * pi * horizon);
}

inline ChargeReport charge_report(const SolutionParams& p, double horizon = 200.0) {
  ChargeReport r;
  const auto& pd = p.periods;
  r.totals = winding_totals(p);
  r.n = winding_charges(p);
  r.n_direct = winding_direct(p);
  r.n_closed = closed_form_charges(pd.g, pd.m, p.torus.s);
  r.epsilon_tilde = epsilon_tilde(p.torus.s, pd.g);
  r.density = density(pd, r.n);
  r.horizon = horizon;
  r.density_direct = density_direct(p, horizon);
  r.match = r.n == r.n_closed && r.n == r.n_direct;
  return r;
}

/// Torus point whose image matches A(D), if A(D) - B(1/2 - s/4, 1/2)^t is real
/// modulo the lattice for some s; throws when more than one s matches.
inline std::optional<TorusPoint> check_admissible_image(const PeriodData& pd, const CVector& ad, double tol = 1e-6) {
  std::optional<TorusPoint> found;
  const int combos = 1 << pd.m;
  for (int mask = 0; mask < combos; ++mask) {
    TorusPoint tp{IVector(pd.m), RVector::Zero(pd.g)};
    for (int i = 0; i < pd.m; ++i) tp.s[i] = (mask >> i) & 1 ? -1 : 1;
    const CVector v = ad - divisor_image(pd, tp);
    const auto red = lattice_reduce(v, pd.B);
    if (red.residual.imag().cwiseAbs().maxCoeff() > tol) continue;
    if (found) throw AdmissibilityError("divisor image matches more than one torus component");
    RVector x = red.residual.real();
    for (int i = 0; i < pd.g; ++i) x[i] -= std::floor(x[i]);
    tp.x0 = x;
    found = tp;
  }
  return found;
}

/// A(D) for a divisor given by its points (canonical routes).
inline CVector divisor_abel(const SpectralCurve& curve, const PeriodData& pd, const std::vector<SheetPoint>& divisor) {
  CVector ad = CVector::Zero(pd.g);
  for (const auto& P : divisor) ad += abel_point(curve, pd.norm_coeffs, P);
  return ad;
}

inline std::optional<TorusPoint> check_admissible(const SpectralCurve& curve, const PeriodData& pd,
                                                  const std::vector<SheetPoint>& divisor, double tol = 1e-6) {
  if (static_cast<int>(divisor.size()) != pd.g) throw Error("divisor must have g points");
  for (const auto& P : divisor) {
    const cplx f = curve.mu_squared(P.lambda);
    if (std::abs(P.mu * P.mu - f) > 1e-8 * std::max(1.0, std::abs(f))) throw PathError("divisor point is not on the curve");
  }
  return check_admissible_image(pd, divisor_abel(curve, pd, divisor), tol);
}

/// Coefficients (ascending) of the degree g-1 polynomial through (lambda_i, mu_i / lambda_i).
inline CVector divisor_polynomial(const std::vector<SheetPoint>& divisor) {
  const int g = static_cast<int>(divisor.size());
  CMatrix vand(g, g);
  CVector rhs(g);
  for (int i = 0; i < g; ++i) {
    cplx pw = 1.0;
    for (int k = 0; k < g; ++k) {
      vand(i, k) = pw;
      pw *= divisor[i].lambda;
    }
    rhs[i] = divisor[i].mu / divisor[i].lambda;
  }
  Eigen::FullPivLU<CMatrix> lu(vand);
  if (!lu.isInvertible()) throw AdmissibilityError("divisor points are not distinct");
  return lu.solve(rhs);
}

inline double poly_eval(const RVector& c, double x) {
  double v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * x + c[k];
  return v;
}

/// Interpolation symbols: s'_j is the sign of the interpolating polynomial on real cut j.
inline IVector divisor_symbols(const SpectralCurve& curve, const std::vector<SheetPoint>& divisor) {
  const CVector c = divisor_polynomial(divisor);
  const double big = std::max(1e-300, c.cwiseAbs().maxCoeff());
  if (c.imag().cwiseAbs().maxCoeff() > 1e-8 * big) throw AdmissibilityError("interpolating polynomial is not real");
  const RVector cr = c.real();
  const int m = curve.real_pair_count();
  IVector s(m);
  for (int j = 0; j < m; ++j) {
    const auto& pr = curve.real_pairs()[j];
    const double mid = poly_eval(cr, 0.5 * (pr.lower + pr.upper));
    if (mid == 0.0) throw AdmissibilityError("polynomial vanishes at a cut midpoint");
    const int sign = mid > 0 ? 1 : -1;
    for (int k = 0; k <= 64; ++k) {
      const double x = pr.lower + (pr.upper - pr.lower) * k / 64.0;
      if (poly_eval(cr, x) * sign < 0.0) throw AdmissibilityError("polynomial changes sign on a real cut");
    }
    s[j] = sign;
  }
  return s;
}

/// True when the torus symbol of an admissible divisor equals its interpolation symbol.
inline bool symbols_coincide_check(const SpectralCurve& curve, const PeriodData& pd, const std::vector<SheetPoint>& divisor) {
  const auto tp = check_admissible(curve, pd, divisor);
  if (!tp) throw AdmissibilityError("divisor is not admissible");
  return tp->s == divisor_symbols(curve, divisor);
}

}  // namespace fgap
