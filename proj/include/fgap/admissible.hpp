#pragma once

#include <cmath>
#include <vector>

#include "fgap/charge.hpp"
#include "fgap/core.hpp"
#include "fgap/periods.hpp"

namespace fgap {

/// Point on the real oval over cut j (zero-based): lambda = mid + half cos(phi),
/// sheet taken from the sign of sin(phi).
inline SheetPoint oval_point(const SpectralCurve& curve, int j, double phi) {
  const auto& pr = curve.real_pairs().at(j);
  const double mid = 0.5 * (pr.lower + pr.upper), half = 0.5 * (pr.upper - pr.lower);
  const double lam = mid + half * std::cos(phi);
  const double f = curve.mu_squared(lam).real();
  const double mu = std::sin(phi) >= 0.0 ? std::sqrt(std::max(f, 0.0)) : -std::sqrt(std::max(f, 0.0));
  return {cplx{lam, 0.0}, mu >= 0.0 ? 0 : 1, cplx{mu, 0.0}};
}

struct AdmissiblePoint {
  std::vector<SheetPoint> divisor;
  std::vector<double> phi;
  TorusPoint torus;
  IVector s_prime;
  bool coincide = false;
};

namespace detail {

// Y^{-1} Im A(D) shifted so that zeros of sin(2 pi .) mark the admissible pattern
inline RVector pattern_defect(const PeriodData& pd, const CVector& ad) {
  const RVector c = pd.B.imag().ldlt().solve(ad.imag());
  RVector f(pd.g);
  for (int i = 0; i < pd.g; ++i) f[i] = std::sin(2.0 * pi * (c[i] - (i < pd.m ? 0.25 : 0.5)));
  return f;
}

inline std::optional<AdmissiblePoint> classify(const SpectralCurve& curve, const PeriodData& pd,
                                               std::vector<SheetPoint> divisor, std::vector<double> phi) {
  const auto tp = check_admissible(curve, pd, divisor);
  if (!tp) return std::nullopt;
  AdmissiblePoint a;
  a.divisor = std::move(divisor);
  a.phi = std::move(phi);
  a.torus = *tp;
  a.s_prime = divisor_symbols(curve, a.divisor);
  a.coincide = a.s_prime == a.torus.s;
  return a;
}

}  // namespace detail

/// Genus-1 scan over the real oval: every admissible divisor {P}, P on the oval.
inline std::vector<AdmissiblePoint> admissible_scan_g1(const SpectralCurve& curve, const PeriodData& pd, int samples = 400) {
  if (pd.g != 1 || pd.m != 1) throw Error("admissible_scan_g1 needs g = m = 1");
  auto defect = [&](double phi) {
    const auto P = oval_point(curve, 0, phi);
    return detail::pattern_defect(pd, abel_point(curve, pd.norm_coeffs, P))[0];
  };
  std::vector<AdmissiblePoint> out;
  // grid offset by half a step so no node sits on a branch point
  const double h = 2.0 * pi / samples;
  double a = 0.5 * h, fa = defect(a);
  for (int i = 1; i <= samples; ++i) {
    const double b = (i + 0.5) * h, fb = defect(b);
    if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi), fm = defect(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double phi = 0.5 * (lo + hi);
      if (auto pt = detail::classify(curve, pd, {oval_point(curve, 0, phi)}, {phi})) out.push_back(std::move(*pt));
    }
    a = b;
    fa = fb;
  }
  return out;
}

/// Genus-2 scan over pairs of points on the two real ovals (m = 2): sign-change
/// cells of the defect on a grid, refined by Newton's method.
inline std::vector<AdmissiblePoint> admissible_scan_g2(const SpectralCurve& curve, const PeriodData& pd, int grid = 40) {
  if (pd.g != 2 || pd.m != 2) throw Error("admissible_scan_g2 needs g = m = 2");
  auto abel_on = [&](int j, double phi) { return abel_point(curve, pd.norm_coeffs, oval_point(curve, j, phi)); };
  const double h = 2.0 * pi / grid;
  std::vector<CVector> a1(grid + 1), a2(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    a1[i] = abel_on(0, (i + 0.5) * h);
    a2[i] = abel_on(1, (i + 0.5) * h);
  }
  auto defect = [&](double p1, double p2) { return detail::pattern_defect(pd, abel_on(0, p1) + abel_on(1, p2)); };

  std::vector<AdmissiblePoint> out;
  for (int i = 0; i < grid; ++i) {
    for (int k = 0; k < grid; ++k) {
      // sign changes of both components inside the cell
      bool pos[2] = {false, false}, neg[2] = {false, false};
      for (int di = 0; di <= 1; ++di) {
        for (int dk = 0; dk <= 1; ++dk) {
          const RVector f = detail::pattern_defect(pd, a1[i + di] + a2[k + dk]);
          for (int c = 0; c < 2; ++c) (f[c] > 0.0 ? pos[c] : neg[c]) = true;
        }
      }
      if (!(pos[0] && neg[0] && pos[1] && neg[1])) continue;
      Eigen::Vector2d x((i + 1.0) * h, (k + 1.0) * h);
      bool converged = false;
      for (int it = 0; it < 30; ++it) {
        const RVector f = defect(x[0], x[1]);
        if (f.norm() < 1e-12) {
          converged = true;
          break;
        }
        const double e = 1e-6;
        Eigen::Matrix2d jac;
        jac.col(0) = (defect(x[0] + e, x[1]) - defect(x[0] - e, x[1])) / (2 * e);
        jac.col(1) = (defect(x[0], x[1] + e) - defect(x[0], x[1] - e)) / (2 * e);
        x -= jac.fullPivLu().solve(Eigen::Vector2d(f[0], f[1]));
      }
      if (!converged) continue;
      // keep roots inside their cell so each is reported once
      if (x[0] < (i + 0.5) * h || x[0] >= (i + 1.5) * h || x[1] < (k + 0.5) * h || x[1] >= (k + 1.5) * h) continue;
      if (auto pt = detail::classify(curve, pd, {oval_point(curve, 0, x[0]), oval_point(curve, 1, x[1])}, {x[0], x[1]})) {
        out.push_back(std::move(*pt));
      }
    }
  }
  return out;
}

}  // namespace fgap
