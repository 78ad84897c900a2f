#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <vector>

#include "fgap/contour.hpp"
#include "fgap/core.hpp"
#include "fgap/spectral_curve.hpp"

namespace fgap {

/// Canonical basis a_1..a_g, b_1..b_g built from 2g constructed contours.
///
/// The constructed contours are raw_a and raw_c; the a-cycles are integer
/// combinations of raw_a only. Column j of `transform` expresses final cycle j (a's first, then
/// b's) in the raw contours (raw_a first, then raw_c).
struct CycleBasis {
  std::vector<CyclePath> raw_a;
  std::vector<CyclePath> raw_c;
  IMatrix transform;
  /// Intersection matrix of the final cycles; [[0, I], [-I, 0]] when symplectic.
  IMatrix intersection;
  /// Action of tau on the final cycles: tau(cycle j) = sum_i tau_action(i, j) cycle i.
  IMatrix tau_action;
  /// Periods of lambda^{k-1} d lambda / mu: row k-1, column = cycle.
  CMatrix a_periods;
  CMatrix b_periods;
};

namespace detail {

inline std::vector<cplx> ellipse_polygon(double xl, double xr, double h, int n = 96) {
  const double c = 0.5 * (xl + xr), r = 0.5 * (xr - xl);
  std::vector<cplx> pts;
  for (int i = 0; i <= n; ++i) {
    const double th = 2.0 * pi * i / n;
    pts.emplace_back(c + r * std::cos(th), h * std::sin(th));
  }
  return pts;
}

inline int winding_about(const std::vector<cplx>& poly, cplx p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) total += std::arg((poly[i + 1] - p) / (poly[i] - p));
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

// Flattens an axis-crossing ellipse until it encloses exactly the branch points
// accepted by `wanted` (which must lie on the real axis).
template <class Pred>
std::vector<cplx> real_ellipse(const SpectralCurve& curve, double xl, double xr, Pred wanted) {
  const auto branch = curve.finite_branch_points();
  double h = 0.5 * (xr - xl);
  for (int it = 0; it < 60; ++it) {
    auto poly = ellipse_polygon(xl, xr, h);
    bool ok = true;
    for (const auto& e : branch) {
      if ((winding_about(poly, e) != 0) != wanted(e)) {
        ok = false;
        break;
      }
    }
    if (ok) return poly;
    h *= 0.6;
  }
  throw BasisError("no admissible ellipse for a real cycle");
}

inline std::vector<cplx> arc(cplx centre, double r, double from, double sweep, int n = 17) {
  std::vector<cplx> pts;
  for (int i = 0; i < n; ++i) pts.push_back(centre + r * std::exp(I * (from + sweep * i / (n - 1))));
  return pts;
}

// Half-circle around e starting at angle arg(-n), passing through e + r*toward.
inline std::vector<cplx> cap_through(cplx e, double r, cplx n, cplx toward) {
  auto cap = arc(e, r, std::arg(-n), pi);
  if (std::abs(cap[8] - (e + r * toward)) > r) cap = arc(e, r, std::arg(-n), -pi);
  return cap;
}

// distance from the segment [a, b] to the branch points other than e
inline double corridor_clearance(const SpectralCurve& curve, cplx e, cplx a, cplx b) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.finite_branch_points()) {
    if (p != e) d = std::min(d, segment_distance(p, a, b));
  }
  return d;
}

// Unimodular U with U H U^t = I (mod 2) for a symmetric H that is
// nondegenerate and not alternating over F2. Built from row additions
// and swaps only, so U stays invertible over the integers.
inline IMatrix f2_orthonormalize(const IMatrix& h) {
  const int n = static_cast<int>(h.rows());
  IMatrix v = IMatrix::Identity(n, n);
  auto form = [&](int i, int j) {
    const long x = (v.row(i) * h * v.row(j).transpose())(0, 0);
    return static_cast<int>(((x % 2) + 2) % 2);
  };
  int k = 0;
  while (k < n) {
    int j = k;
    while (j < n && form(j, j) == 0) ++j;
    if (j < n) {
      v.row(k).swap(v.row(j));
      for (int r = k + 1; r < n; ++r) {
        if (form(r, k)) v.row(r) += v.row(k);
      }
      ++k;
      continue;
    }
    // the rest is alternating: take a hyperbolic pair and merge it with the previous unit vector
    if (k == 0) throw BasisError("complex block of 2 Re B is alternating mod 2");
    int x = -1, y = -1;
    for (int i = k; i < n && x < 0; ++i) {
      for (int l = i + 1; l < n; ++l) {
        if (form(i, l)) {
          x = i;
          y = l;
          break;
        }
      }
    }
    if (x < 0) throw BasisError("complex block of 2 Re B is degenerate mod 2");
    v.row(k).swap(v.row(x));
    v.row(k + 1).swap(v.row(y == k ? x : y));
    for (int r = k + 2; r < n; ++r) {
      const int fx = form(r, k), fy = form(r, k + 1);
      if (fy) v.row(r) += v.row(k);
      if (fx) v.row(r) += v.row(k + 1);
    }
    const int u = k - 1;
    v.row(u) += v.row(k);
    v.row(u) += v.row(k + 1);
    v.row(k) += v.row(u);
    v.row(k + 1) += v.row(u);
    k += 2;
  }
  return v;
}

inline double isolation_radius(const SpectralCurve& curve, cplx e) {
  double d = std::abs(e.imag());
  for (const auto& b : curve.finite_branch_points()) {
    if (b != e) d = std::min(d, std::abs(b - e));
  }
  return d;
}

}  // namespace detail

/// Builds the canonical basis with tau a_i = -a_i, tau b_i = b_i (i <= m),
/// tau b_i = b_i + a_i (i > m), and computes the monomial periods over it.
inline CycleBasis build_basis(const SpectralCurve& curve, const QuadratureOptions& opt = {}) {
  require_valid(curve);
  const int g = curve.genus(), m = curve.real_pair_count();
  const auto& rp = curve.real_pairs();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (rp[i].lower < rp[j].upper && rp[j].lower < rp[i].upper) throw BasisError("overlapping real cuts");
    }
  }

  CycleBasis basis;
  std::vector<double> axis{0.0};
  for (const auto& p : rp) {
    axis.push_back(p.lower);
    axis.push_back(p.upper);
  }
  std::sort(axis.begin(), axis.end());

  // real a_i: crosses the axis in the middle of cut i and on the positive axis
  for (int i = 0; i < m; ++i) {
    const double xl = 0.5 * (rp[i].lower + rp[i].upper), xr = 0.5 * std::abs(rp[i].upper);
    auto poly = detail::real_ellipse(curve, xl, xr, [&](cplx e) { return e.imag() == 0.0 && xl < e.real() && e.real() < xr; });
    basis.raw_a.push_back(CyclePath::from_positive_axis(curve, std::move(poly)));
  }
  // complex block: tubes and keyholes fanned out from hubs on the positive axis
  const auto& cp = curve.complex_pairs();
  const double hub = curve.hub(), delta = 0.05 * hub, scale = curve.scale();
  for (std::size_t r = 0; r < cp.size(); ++r) {
    const cplx e = cp[r];
    const double hj = hub + r * delta, w = 0.3 * delta;
    const cplx d = (e - hj) / std::abs(e - hj), n = I * d;
    const double rad = 0.3 * detail::isolation_radius(curve, e);
    // narrow the corridor when another branch point sits close to it
    const cplx neck = e - 2.0 * rad * d;
    const double clear = detail::corridor_clearance(curve, e, cplx{hj, 0.0}, neck);
    if (clear < 1e-6 * scale) throw BasisError("a branch point lies on an a-cycle corridor");
    const double ww = std::min(w, 0.3 * clear), side = std::min(rad, 0.3 * clear);
    std::vector<cplx> upper{cplx{hj + ww, 0.0}, neck - side * n};
    for (const auto& z : detail::cap_through(e, rad, n, d)) upper.push_back(z);
    upper.push_back(neck + side * n);
    upper.emplace_back(hj - ww, 0.0);
    std::vector<cplx> poly = upper;
    for (auto it = upper.rbegin() + 1; it != upper.rend(); ++it) poly.push_back(std::conj(*it));
    basis.raw_a.push_back(CyclePath::from_positive_axis(curve, std::move(poly)));
  }

  // real b_i: encircles cut i, crossing the neighbouring gaps at their midpoints
  for (int i = 0; i < m; ++i) {
    const double lo = rp[i].lower, hi = rp[i].upper;
    const auto kl = std::find(axis.begin(), axis.end(), lo) - axis.begin();
    const auto kh = std::find(axis.begin(), axis.end(), hi) - axis.begin();
    const double left = kl > 0 ? axis[kl - 1] : lo - (hi - lo);
    const double right = axis[kh + 1];
    const double xl = lo - 0.5 * (lo - left), xr = hi + 0.5 * (right - hi);
    auto poly = detail::real_ellipse(curve, xl, xr, [&](cplx e) { return e.imag() == 0.0 && lo <= e.real() && e.real() <= hi; });
    const cplx mu = std::sqrt(curve.mu_squared(poly.front()));
    basis.raw_c.emplace_back(curve, std::move(poly), mu);
  }
  for (std::size_t r = 0; r < cp.size(); ++r) {
    const cplx e = cp[r];
    const double hj = hub + r * delta;
    const double rad = 0.17 * detail::isolation_radius(curve, e);
    const double reach = 3.0 * scale * (1.0 + 0.2 * r) + 3.0;
    // slit direction: away from the hub, turned slightly if that clears other branch points
    const cplx d0 = (e - hj) / std::abs(e - hj);
    cplx d = d0;
    double clear = -1.0;
    for (double turn : {0.0, 0.1, -0.1, 0.2, -0.2, 0.35, -0.35}) {
      const cplx dt = d0 * std::exp(I * turn);
      const double c = detail::corridor_clearance(curve, e, e + 2.0 * rad * dt, e + reach * dt);
      if (c > clear + 1e-12) {
        clear = c;
        d = dt;
      }
      if (turn == 0.0 && c >= 3.0 * rad) break;
    }
    if (clear < 1e-6 * scale) throw BasisError("no clear slit for a b-cycle");
    const cplx n = I * d, neck = e + 2.0 * rad * d, far = e + reach * d;
    const double side = std::min(rad, 0.3 * clear);
    std::vector<cplx> poly{far - side * n, neck - side * n};
    for (const auto& z : detail::cap_through(e, rad, n, -d)) poly.push_back(z);
    poly.push_back(neck + side * n);
    poly.push_back(far + side * n);
    const double big = std::abs(far + side * n);
    const double t0 = std::arg(far + side * n);
    double t1 = std::arg(far - side * n);
    if (t1 < t0) t1 += 2.0 * pi;
    for (const auto& z : detail::arc(0.0, big, t0, t1 - t0, 200)) poly.push_back(z);
    poly.erase(poly.end() - 200);  // first arc point duplicates far + side * n
    const cplx mu = std::sqrt(curve.mu_squared(poly.front()));
    basis.raw_c.emplace_back(curve, std::move(poly), mu);
  }

  // raw intersection numbers
  IMatrix iaa(g, g), iac(g, g), icc(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      iaa(i, j) = intersection_number(curve, basis.raw_a[i], basis.raw_a[j]);
      iac(i, j) = intersection_number(curve, basis.raw_a[i], basis.raw_c[j]);
      icc(i, j) = intersection_number(curve, basis.raw_c[i], basis.raw_c[j]);
    }
  }
  if (iaa.cwiseAbs().maxCoeff() != 0) throw BasisError("a-cycles intersect each other");
  const RMatrix iac_inv = iac.cast<double>().inverse();
  if (!iac_inv.allFinite() || (iac_inv - iac_inv.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-9) {
    throw BasisError("a/c intersection matrix is not unimodular");
  }
  const IMatrix minv = iac_inv.array().round().cast<int>().matrix();
  const IMatrix q = minv.transpose() * icc * minv;
  IMatrix x = IMatrix::Zero(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = i + 1; j < g; ++j) x(i, j) = q(i, j);
  }

  // monomial periods of the raw contours, evaluated concurrently
  std::vector<std::future<CVector>> jobs;
  for (int i = 0; i < g; ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] { return integrate_monomials(curve, basis.raw_a[i], g, opt); }));
  }
  for (int i = 0; i < g; ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] { return integrate_monomials(curve, basis.raw_c[i], g, opt); }));
  }
  CMatrix pa(g, g), pc(g, g);
  for (int i = 0; i < g; ++i) pa.col(i) = jobs[i].get();
  for (int i = 0; i < g; ++i) pc.col(i) = jobs[g + i].get();
  const CMatrix pa_raw = pa;

  CMatrix pb0 = pc * minv.cast<cplx>() + pa * x.cast<cplx>();
  CMatrix b0 = pa.inverse() * pb0;

  // 2 Re B must be I mod 2 on the complex block; otherwise change the complex
  // a-cycles by an integer matrix (a -> a U^{-1}, b -> b U^t, B -> U B U^t)
  IMatrix u = IMatrix::Identity(g, g);
  if (g > m) {
    IMatrix h(g - m, g - m);
    for (int i = 0; i < g - m; ++i) {
      for (int j = 0; j < g - m; ++j) h(i, j) = static_cast<int>(std::lround(2.0 * b0(m + i, m + j).real()));
    }
    u.bottomRightCorner(g - m, g - m) = detail::f2_orthonormalize(h);
  }
  const RMatrix u_inv_r = u.cast<double>().inverse();
  const IMatrix u_inv = u_inv_r.array().round().cast<int>().matrix();
  if ((u * u_inv - IMatrix::Identity(g, g)).cwiseAbs().maxCoeff() != 0) throw BasisError("a-cycle change is not unimodular");
  pa = pa * u_inv.cast<cplx>();
  pb0 = pb0 * u.transpose().cast<cplx>();
  b0 = pa.inverse() * pb0;

  IMatrix s(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) s(i, j) = static_cast<int>(std::lround(b0(i, j).real() + (i == j && i >= m ? 0.5 : 0.0)));
  }
  basis.a_periods = pa;
  basis.b_periods = pb0 - pa * s.transpose().cast<cplx>();

  IMatrix w = IMatrix::Zero(2 * g, 2 * g);
  w.topLeftCorner(g, g) = u_inv;
  w.topRightCorner(g, g) = x * u.transpose() - u_inv * s.transpose();
  w.bottomRightCorner(g, g) = minv * u.transpose();
  basis.transform = w;

  IMatrix raw(2 * g, 2 * g);
  raw << iaa, iac, -iac.transpose(), icc;
  basis.intersection = w.transpose() * raw * w;

  // tau acts on periods by complex conjugation: solve conj(P) = P T over the integers
  CMatrix praw(g, 2 * g);
  praw << pa_raw, pc;
  RMatrix lhs(2 * g, 2 * g), rhs(2 * g, 2 * g);
  lhs << praw.real(), praw.imag();
  rhs << praw.real(), -praw.imag();
  const RMatrix t = lhs.fullPivLu().solve(rhs);
  if ((t - t.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-6) throw BasisError("tau action is not integral");
  const RMatrix tf = w.cast<double>().inverse() * t.array().round().matrix() * w.cast<double>();
  basis.tau_action = tf.array().round().cast<int>().matrix();
  return basis;
}

}  // namespace fgap
