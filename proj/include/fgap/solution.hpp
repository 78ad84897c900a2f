#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fgap/core.hpp"
#include "fgap/periods.hpp"
#include "fgap/theta.hpp"

namespace fgap {

/// Point of the real torus T_s: symbol s (length m) and real coordinate x0 (length g).
struct TorusPoint {
  IVector s;
  RVector x0;
};

/// Image of an admissible divisor on T_s: A(D) = x0 + B (1/2 - s/4, 1/2)^t.
inline CVector divisor_image(const PeriodData& pd, const TorusPoint& tp) {
  if (tp.s.size() != pd.m || tp.x0.size() != pd.g) throw Error("torus point has the wrong dimensions");
  for (int i = 0; i < pd.m; ++i) {
    if (tp.s[i] != 1 && tp.s[i] != -1) throw Error("torus symbol entries must be +1 or -1");
  }
  CVector pattern = CVector::Constant(pd.g, 0.5);
  for (int i = 0; i < pd.m; ++i) pattern[i] = 0.5 - 0.25 * tp.s[i];
  return tp.x0.cast<cplx>() + pd.B * pattern;
}

struct SolutionParams {
  PeriodData periods;
  TorusPoint torus;
  CVector K;       ///< Riemann constants in use (pd.K unless overridden)
  CVector base;    ///< z(0, 0) = -A(D) - K
  cplx C1;
  std::shared_ptr<const ThetaContext> ctx;
};

/// Constant C1 = (-1)^{g-m} exp(pi i eps^t B eps / 2), which makes |e^{iu}| = 1.
inline cplx c1_constant(const PeriodData& pd) {
  const CVector e = pd.eps.cast<cplx>();
  const cplx q = (e.transpose() * pd.B * e)(0, 0);
  return ((pd.g - pd.m) % 2 == 0 ? 1.0 : -1.0) * std::exp(I * pi * q / 2.0);
}

inline SolutionParams make_solution(const PeriodData& pd, const TorusPoint& tp,
                                    const std::optional<CVector>& k_override = std::nullopt,
                                    double theta_tolerance = 1e-13) {
  SolutionParams p;
  p.periods = pd;
  p.torus = tp;
  p.K = k_override ? *k_override : pd.K;
  p.base = -divisor_image(pd, tp) - p.K;
  p.C1 = c1_constant(pd);
  p.ctx = std::make_shared<const ThetaContext>(pd.B, theta_tolerance);
  return p;
}

inline CVector z_of_xt(const SolutionParams& p, double x, double t) {
  const auto& pd = p.periods;
  return p.base + (I * x / 4.0) * (pd.V - pd.U) - (I * t / 4.0) * (pd.U + pd.V);
}

namespace detail {

// theta(z) as (value at the reduced point, transformation exponent)
inline std::pair<cplx, cplx> theta_split(const ThetaContext& ctx, const CVector& z) {
  const auto r = reduce(ctx, z);
  return {theta(ctx, r.z0), r.log_factor};
}

}  // namespace detail

/// Singularity threshold on |theta| at a reduced argument.
inline constexpr double theta_floor = 1e-12;

inline cplx exp_iu_at(const SolutionParams& p, const CVector& z) {
  const auto [t0, l0] = detail::theta_split(*p.ctx, z);
  if (std::abs(t0) < theta_floor) throw SingularDataError("theta(z) vanishes: data on the theta divisor");
  const auto [tp, lp] = detail::theta_split(*p.ctx, p.periods.A0 + z);
  const auto [tm, lm] = detail::theta_split(*p.ctx, z - p.periods.A0);
  return p.C1 * tp * tm / (t0 * t0) * std::exp(lp + lm - 2.0 * l0);
}

/// e^{iu(x,t)} = C1 theta(A0 + z) theta(-A0 + z) / theta(z)^2.
inline cplx exp_iu(const SolutionParams& p, double x, double t) { return exp_iu_at(p, z_of_xt(p, x, t)); }

namespace detail {

// step in (x, t) keeping |delta z| below 0.01
inline double track_step(const SolutionParams& p) {
  const auto& pd = p.periods;
  const double rate = std::max((pd.V - pd.U).norm(), (pd.U + pd.V).norm()) / 4.0;
  return rate > 0.0 ? 0.01 / rate : 1.0;
}

// phase change of f from a to b, refined until two levels agree
template <class F>
double tracked_phase(F&& f, double a, double b, cplx fa, cplx fb, int depth, int max_depth) {
  const double whole = std::arg(fb / fa);
  const double mid = 0.5 * (a + b);
  const cplx fm = f(mid);
  const double left = std::arg(fm / fa), right = std::arg(fb / fm);
  if (std::abs(left) < 0.25 * pi && std::abs(right) < 0.25 * pi && std::abs(left + right - whole) < 1e-9) return whole;
  if (depth >= max_depth) throw TrackingError("phase tracking exceeded the refinement limit");
  return tracked_phase(f, a, mid, fa, fm, depth + 1, max_depth) + tracked_phase(f, mid, b, fm, fb, depth + 1, max_depth);
}

}  // namespace detail

/// Continuous change of arg f(s) over s in [0, 1], sampled at n0 initial steps.
template <class F>
double track_argument(F&& f, int n0 = 256, int max_depth = 20) {
  double total = 0.0;
  cplx prev = f(0.0);
  for (int i = 1; i <= n0; ++i) {
    const double s0 = static_cast<double>(i - 1) / n0, s1 = static_cast<double>(i) / n0;
    const cplx cur = f(s1);
    total += detail::tracked_phase(f, s0, s1, prev, cur, 0, max_depth);
    prev = cur;
  }
  return total;
}

/// Continuous real u along straight segments between waypoints (x, t).
inline std::vector<double> u_along(const SolutionParams& p, const std::vector<std::pair<double, double>>& waypoints) {
  std::vector<double> out;
  if (waypoints.empty()) return out;
  out.push_back(std::arg(exp_iu(p, waypoints[0].first, waypoints[0].second)));
  const double h = detail::track_step(p);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const auto [x0, t0] = waypoints[i - 1];
    const auto [x1, t1] = waypoints[i];
    const double len = std::hypot(x1 - x0, t1 - t0);
    const int n0 = std::max(1, static_cast<int>(std::ceil(len / h)));
    auto f = [&](double s) { return exp_iu(p, x0 + s * (x1 - x0), t0 + s * (t1 - t0)); };
    out.push_back(out.back() + (len == 0.0 ? 0.0 : track_argument(f, n0)));
  }
  return out;
}

/// |u_tt - u_xx + sin u| by centred second differences with step h.
inline double pde_residual(const SolutionParams& p, double x, double t, double h = 1e-3) {
  const cplx w0 = exp_iu(p, x, t);
  auto d = [&](double dx, double dt) { return std::arg(exp_iu(p, x + dx, t + dt) / w0); };
  const double utt = (d(0.0, h) + d(0.0, -h)) / (h * h);
  const double uxx = (d(h, 0.0) + d(-h, 0.0)) / (h * h);
  return std::abs(utt - uxx + std::sin(std::arg(w0)));
}

}  // namespace fgap
