#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fgap/contour.hpp"
#include "fgap/core.hpp"
#include "fgap/homology.hpp"
#include "fgap/quadrature.hpp"
#include "fgap/spectral_curve.hpp"

namespace fgap {

struct LatticeReduction {
  CVector residual;  ///< v - N - B M
  IVector N;
  IVector M;
};

/// Reduces v modulo Z^g + B Z^g (rounded solution of the real 2g x 2g system).
inline LatticeReduction lattice_reduce(const CVector& v, const CMatrix& B) {
  const RMatrix y = B.imag();
  const RVector mreal = y.ldlt().solve(v.imag());
  LatticeReduction r;
  r.M = mreal.array().round().cast<int>().matrix();
  CVector w = v - B * r.M.cast<cplx>();
  r.N = w.real().array().round().cast<int>().matrix();
  r.residual = w - r.N.cast<cplx>();
  return r;
}

/// Normalized periods and the half-period data of the curve.
///
/// U and V are the derivatives of the Abel map in the local parameters
/// lambda^{-1/2} at infinity and lambda^{1/2} at 0, both on the branch where
/// mu > 0 along the positive axis.
struct PeriodData {
  int g = 0;
  int m = 0;
  CMatrix B;
  CMatrix norm_coeffs;  ///< omega_i = sum_k norm_coeffs(i, k-1) lambda^{k-1} d lambda / mu
  CVector U;
  CVector V;
  CVector A0;           ///< eps'/2 + B eps/2
  IVector eps_prime;    ///< (0_m, 1_{g-m})
  IVector eps;          ///< (1_m, 0_{g-m})
  CVector K;            ///< 1/2 (1_m, nu_2) + 1/2 B (nu_1, 1_{g-m})
  std::uint64_t fingerprint = 0;

  // numerical certificates
  double a0_residual = 0.0;   ///< |A(0) by quadrature - A0| after lattice reduction
  double u_oracle_error = 0.0;
  double v_oracle_error = 0.0;
};

namespace detail {

// Gauss sums on [a, b] of lambda^{k-1}/mu with mu continued from mu_a.
inline void open_path_integral(const SpectralCurve& curve, std::span<const cplx> route, cplx mu_start, int g,
                               const QuadratureOptions& opt, CVector& acc, cplx& mu_end) {
  if (route.size() < 2) {
    mu_end = mu_start;
    return;
  }
  const auto nodes = refine_polyline(curve, route, 1e-6 * curve.scale());
  const auto mus = lift_nodes(curve, nodes, mu_start);
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) total += std::abs(nodes[i] - nodes[i - 1]);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    integrate_segment(curve, nodes[i - 1], nodes[i], mus[i - 1], mus[i], g,
                      opt.tolerance * std::abs(nodes[i] - nodes[i - 1]) / total, 0, opt, acc);
  }
  mu_end = mus.back();
}

// Integral from q to the branch point p with lambda = p + (q - p) u^2, u: 1 -> 0.
inline void endpoint_integral(const SpectralCurve& curve, cplx q, cplx p, cplx mu_q, int g, CVector& acc) {
  const auto& rule = quad::gauss_rule(2);
  const int pieces = 8;
  cplx h_prev = mu_q;  // h = mu / u, equal to mu at u = 1
  for (int piece = 0; piece < pieces; ++piece) {
    const double u0 = 1.0 - static_cast<double>(piece) / pieces, u1 = 1.0 - static_cast<double>(piece + 1) / pieces;
    const double c = 0.5 * (u0 + u1), hw = 0.5 * (u1 - u0);
    // nodes ordered from u0 towards u1 so the continuation is sequential
    for (std::size_t i = rule.nodes.size(); i-- > 0;) {
      const double u = c - hw * rule.nodes[i];
      const cplx lam = p + (q - p) * u * u;
      h_prev = nearest_root(curve.mu_squared(lam) / (u * u), h_prev);
      cplx term = rule.weights[i] * hw * 2.0 * (q - p) / h_prev;
      for (int k = 0; k < g; ++k) {
        acc[k] += term;
        term *= lam;
      }
    }
  }
}

// Integral of lambda^{k-1} d lambda / mu from infinity to x > 0 on the branch mu > 0.
inline CVector infinity_tail(const SpectralCurve& curve, double x, int g) {
  const auto bp = curve.branch_points();
  const auto& rule = quad::gauss_rule(2);
  const double s1 = 1.0 / std::sqrt(x);
  CVector out = CVector::Zero(g);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = 0.5 * s1 * (rule.nodes[i] + 1.0);
    const double w = 0.5 * s1 * rule.weights[i];
    cplx prod = 1.0;
    for (const auto& e : bp) prod *= 1.0 - e * s * s;
    const cplx root = std::sqrt(prod);
    for (int k = 1; k <= g; ++k) out[k - 1] += w * (-2.0 * std::pow(s, 2 * (g - k))) / root;
  }
  return out;
}

inline bool is_branch_point(const SpectralCurve& curve, cplx p) {
  return curve.distance_to_branch(p) <= 1e-12 * curve.scale();
}

}  // namespace detail

/// Start of every canonical Abel route: a point on the positive axis beyond all branch points.
inline double abel_base(const SpectralCurve& curve) { return 2.0 * curve.scale() + 1.0; }

/// Canonical route from the base point to lambda: up, across, then down to
/// lambda, with the final approach tilted sideways when that keeps it further
/// from the other branch points.
inline std::vector<cplx> canonical_route(const SpectralCurve& curve, cplx lambda) {
  const double x = abel_base(curve);
  if (lambda.imag() == 0.0 && lambda.real() >= 0.0) return {x, lambda};
  const double scale = curve.scale();
  const cplx up{0.0, 0.7 * scale + 0.5};
  std::vector<cplx> others;
  for (const auto& e : curve.finite_branch_points()) {
    if (std::abs(e - lambda) > 1e-12 * scale) others.push_back(e);
  }
  std::vector<cplx> best;
  double best_clearance = -1.0;
  for (double o : {0.0, 0.15, -0.15, 0.3, -0.3, 0.5, -0.5}) {
    std::vector<cplx> route{x, x + up, lambda + o * scale + up, lambda};
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < route.size(); ++i) c = std::min(c, detail::segment_branch_distance(others, route[i - 1], route[i]));
    if (c > best_clearance + 1e-3 * scale) {
      best_clearance = c;
      best = std::move(route);
    }
  }
  return best;
}

/// Abel map A(P) = int_inf^P omega along route (route[0] must be abel_base(curve)).
///
/// The route is continued from mu > 0 at its start. When it arrives on the
/// other sheet than P, the result is negated (the involution acts as -1 on
/// the Jacobian).
inline CVector abel_map(const SpectralCurve& curve, const CMatrix& norm_coeffs, const SheetPoint& P,
                        std::span<const cplx> route, const QuadratureOptions& opt = {}) {
  const int g = curve.genus();
  if (route.empty() && std::isinf(std::abs(P.lambda))) return CVector::Zero(g);
  const double x = abel_base(curve);
  if (route.size() < 2 || std::abs(route.front() - x) > 1e-12 * x) throw PathError("abel_map: route must start at the base point");
  if (std::abs(route.back() - P.lambda) > 1e-12 * std::max(1.0, std::abs(P.lambda))) {
    throw PathError("abel_map: route does not end at P");
  }
  CVector mono = detail::infinity_tail(curve, x, g);
  const cplx mu_x = std::sqrt(curve.mu_squared(x));
  cplx mu_end;
  const bool branch = detail::is_branch_point(curve, P.lambda);
  if (!branch) {
    detail::open_path_integral(curve, route, cplx{std::abs(mu_x), 0.0}, g, opt, mono, mu_end);
    CVector a = norm_coeffs * mono;
    return std::abs(mu_end - P.mu) <= std::abs(mu_end + P.mu) ? a : CVector(-a);
  }
  // stop short of the branch point and finish with the square-root substitution
  std::vector<cplx> pts(route.begin(), route.end());
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : curve.finite_branch_points()) {
    if (std::abs(e - P.lambda) > 1e-12 * curve.scale()) d = std::min(d, std::abs(e - P.lambda));
  }
  const cplx p = pts.back();
  pts.pop_back();
  const cplx prev = pts.back();
  const double len = std::abs(prev - p);
  const cplx q = len > 0.3 * d ? p + (prev - p) * (0.3 * d / len) : prev;
  if (q != prev) pts.push_back(q);
  detail::open_path_integral(curve, pts, cplx{std::abs(mu_x), 0.0}, g, opt, mono, mu_end);
  detail::endpoint_integral(curve, q, p, mu_end, g, mono);
  return norm_coeffs * mono;
}

/// A(P) along the canonical route.
inline CVector abel_point(const SpectralCurve& curve, const CMatrix& norm_coeffs, const SheetPoint& P,
                          const QuadratureOptions& opt = {}) {
  const auto route = canonical_route(curve, P.lambda);
  return abel_map(curve, norm_coeffs, P, route, opt);
}

inline SheetPoint branch_sheet_point(cplx e) { return {e, 0, cplx{0.0, 0.0}}; }

namespace detail {

// Value at zeta = 0 of omega/d zeta by the trapezoid rule on |zeta| = r,
// continuing mu from the branch mu > 0 at the positive real point.
template <class Lambda, class DLambda>
CVector local_derivative(const SpectralCurve& curve, const CMatrix& c, double r, Lambda lam_of, DLambda dlam_of) {
  const int g = curve.genus();
  const int n = 256;
  CVector acc = CVector::Zero(g);
  cplx mu_prev = std::abs(std::sqrt(curve.mu_squared(lam_of(cplx{r, 0.0}))));
  for (int j = 0; j < n; ++j) {
    const cplx zeta = r * std::exp(I * (2.0 * pi * j / n));
    const cplx lam = lam_of(zeta);
    mu_prev = nearest_root(curve.mu_squared(lam), mu_prev);
    CVector mono(g);
    cplx pw = dlam_of(zeta) / mu_prev;
    for (int k = 0; k < g; ++k) {
      mono[k] = pw;
      pw *= lam;
    }
    acc += c * mono;
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

/// U by the contour-limit oracle: mean of omega / d(lambda^{-1/2}) on a small circle about infinity.
inline CVector U_oracle(const SpectralCurve& curve, const CMatrix& norm_coeffs) {
  const double r = 0.5 / std::sqrt(curve.scale());
  return detail::local_derivative(
      curve, norm_coeffs, r, [](cplx z) { return 1.0 / (z * z); }, [](cplx z) { return -2.0 / (z * z * z); });
}

/// V by the contour-limit oracle: mean of omega / d(lambda^{1/2}) on a small circle about 0.
inline CVector V_oracle(const SpectralCurve& curve, const CMatrix& norm_coeffs) {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& e : curve.branch_points()) dmin = std::min(dmin, std::abs(e));
  const double r = 0.5 * std::sqrt(dmin);
  return detail::local_derivative(
      curve, norm_coeffs, r, [](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; });
}

inline CVector k_formula(const CMatrix& B, int m) {
  const int g = static_cast<int>(B.rows());
  CVector first(g), second(g);
  for (int i = 0; i < g; ++i) {
    first[i] = i < m ? 1.0 : static_cast<double>(i + 1);
    second[i] = i < m ? static_cast<double>(i + 1) : 1.0;
  }
  return 0.5 * first + 0.5 * B * second;
}

/// Normalized period matrix, U, V, A(0) and K for the curve.
inline PeriodData period_data(const SpectralCurve& curve, const QuadratureOptions& opt = {}) {
  const auto basis = build_basis(curve, opt);
  const int g = curve.genus(), m = curve.real_pair_count();
  PeriodData pd;
  pd.g = g;
  pd.m = m;
  pd.fingerprint = curve.fingerprint();
  Eigen::FullPivLU<CMatrix> lu(basis.a_periods);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw BasisError("singular a-period matrix");
  pd.norm_coeffs = lu.inverse();
  pd.B = pd.norm_coeffs * basis.b_periods;

  cplx prod = 1.0;
  for (const auto& e : curve.branch_points()) prod *= -e;
  pd.U = -2.0 * pd.norm_coeffs.col(g - 1);
  pd.V = 2.0 * pd.norm_coeffs.col(0) / std::sqrt(prod.real());
  pd.u_oracle_error = (U_oracle(curve, pd.norm_coeffs) - pd.U).cwiseAbs().maxCoeff();
  pd.v_oracle_error = (V_oracle(curve, pd.norm_coeffs) - pd.V).cwiseAbs().maxCoeff();

  pd.eps_prime = IVector::Zero(g);
  pd.eps = IVector::Zero(g);
  for (int i = 0; i < g; ++i) (i < m ? pd.eps[i] : pd.eps_prime[i]) = 1;
  pd.A0 = 0.5 * pd.eps_prime.cast<cplx>() + 0.5 * pd.B * pd.eps.cast<cplx>();
  const CVector a0 = abel_point(curve, pd.norm_coeffs, branch_sheet_point(0.0), opt);
  pd.a0_residual = lattice_reduce(a0 - pd.A0, pd.B).residual.cwiseAbs().maxCoeff();
  pd.K = k_formula(pd.B, m);
  return pd;
}

struct RiemannConstants {
  CVector K;          ///< canonical representative (block formula)
  CVector abel_sum;   ///< sum of A(E_{2i-1}) along canonical routes
  double residual;    ///< |abel_sum - K| modulo the lattice
};

/// K as the sum of the Abel images of the odd branch points, checked against
/// the block formula; throws BasisError when they disagree beyond tol.
inline RiemannConstants riemann_constants(const SpectralCurve& curve, const PeriodData& pd, double tol = 1e-6,
                                          const QuadratureOptions& opt = {}) {
  RiemannConstants rc;
  rc.K = pd.K;
  rc.abel_sum = CVector::Zero(pd.g);
  for (int j = 1; j <= pd.g; ++j) {
    rc.abel_sum += abel_point(curve, pd.norm_coeffs, branch_sheet_point(curve.odd_branch_point(j)), opt);
  }
  rc.residual = lattice_reduce(rc.abel_sum - rc.K, pd.B).residual.cwiseAbs().maxCoeff();
  if (rc.residual > tol) throw BasisError("Abel-sum K disagrees with the block formula");
  return rc;
}

}  // namespace fgap
