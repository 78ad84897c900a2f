#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fgap/core.hpp"
#include "fgap/quadrature.hpp"
#include "fgap/spectral_curve.hpp"

namespace fgap {

/// Closed piecewise-linear contour on the curve.
///
/// Vertices are refined so that every piece is short compared with its
/// distance to the branch points; mu is continued node by node. The sheet
/// of each node follows from comparing its mu with the sheet-0 branch.
class CyclePath {
 public:
  CyclePath() = default;

  /// Closes the polygon if needed and continues mu from mu_start at vertices[0].
  CyclePath(const SpectralCurve& curve, std::vector<cplx> vertices, cplx mu_start, double delta_rel = 1e-6) {
    if (vertices.size() < 3) throw PathError("CyclePath: need at least three vertices");
    const cplx first = vertices.front();
    if (std::abs(vertices.back() - first) > 1e-14 * std::max(1.0, std::abs(first))) vertices.push_back(first);
    vertices.back() = first;
    nodes_ = refine_polyline(curve, vertices, delta_rel * curve.scale());
    const cplx f = curve.mu_squared(first);
    if (std::abs(mu_start * mu_start - f) > 1e-8 * std::abs(f)) throw PathError("CyclePath: mu_start is not on the curve");
    mus_ = lift_nodes(curve, nodes_, mu_start);
    if (std::abs(mus_.back() - mu_start) > 1e-6 * std::abs(mu_start)) {
      throw PathError("CyclePath: contour does not close on the curve (odd number of branch points enclosed)");
    }
    mus_.back() = mu_start;
  }

  /// Path whose first vertex lies on the positive axis, started on the branch mu > 0 there.
  static CyclePath from_positive_axis(const SpectralCurve& curve, std::vector<cplx> vertices) {
    const cplx mu = std::sqrt(curve.mu_squared(vertices.front()));
    return CyclePath(curve, std::move(vertices), cplx{std::abs(mu), 0.0});
  }

  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<cplx>& mus() const { return mus_; }
  std::size_t size() const { return nodes_.size(); }

  SheetPoint start(const SpectralCurve& curve) const {
    return {nodes_.front(), sheet_of(curve, nodes_.front(), mus_.front()), mus_.front()};
  }

  CyclePath reversed() const {
    CyclePath r;
    r.nodes_.assign(nodes_.rbegin(), nodes_.rend());
    r.mus_.assign(mus_.rbegin(), mus_.rend());
    return r;
  }

  /// Image under the anti-holomorphic involution (lambda, mu) -> (conj lambda, conj mu).
  CyclePath conjugated() const {
    CyclePath r;
    for (const auto& z : nodes_) r.nodes_.push_back(std::conj(z));
    for (const auto& z : mus_) r.mus_.push_back(std::conj(z));
    return r;
  }

 private:
  std::vector<cplx> nodes_;
  std::vector<cplx> mus_;
};

struct QuadratureOptions {
  double tolerance = 1e-10;
  int max_depth = 30;
};

namespace detail {

// Gauss nodes on [a, b] with mu continued from mu_a through them in order;
// returns false when the continuation does not land on mu_b.
inline bool lift_segment(const SpectralCurve& curve, const quad::GaussRule& rule, cplx a, cplx b, cplx mu_a, cplx mu_b,
                         std::vector<cplx>& lam, std::vector<cplx>& mu) {
  const std::size_t n = rule.nodes.size();
  lam.resize(n);
  mu.resize(n);
  const cplx c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx prev = mu_a;
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = c + h * rule.nodes[i];
    prev = nearest_root(curve.mu_squared(lam[i]), prev);
    mu[i] = prev;
  }
  const cplx end = nearest_root(curve.mu_squared(b), prev);
  return std::abs(end - mu_b) <= 1e-6 * std::abs(mu_b);
}

// sum_i w_i lambda_i^{k-1} / mu_i for k = 1..g, plus the same sums of moduli
inline void segment_sums(const quad::GaussRule& rule, cplx h, const std::vector<cplx>& lam, const std::vector<cplx>& mu,
                         int g, CVector& val, RVector& mag) {
  val.setZero(g);
  mag.setZero(g);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    cplx term = rule.weights[i] * h / mu[i];
    for (int k = 0; k < g; ++k) {
      val[k] += term;
      mag[k] += std::abs(term);
      term *= lam[i];
    }
  }
}

inline void integrate_segment(const SpectralCurve& curve, cplx a, cplx b, cplx mu_a, cplx mu_b, int g, double tol,
                              int depth, const QuadratureOptions& opt, CVector& acc) {
  thread_local std::vector<cplx> lam, mu;
  const cplx h = 0.5 * (b - a);
  CVector lo, hi;
  RVector mag_lo, mag_hi;
  bool ok = lift_segment(curve, quad::gauss_rule(1), a, b, mu_a, mu_b, lam, mu);
  if (ok) {
    segment_sums(quad::gauss_rule(1), h, lam, mu, g, lo, mag_lo);
    ok = lift_segment(curve, quad::gauss_rule(2), a, b, mu_a, mu_b, lam, mu);
  }
  if (ok) {
    segment_sums(quad::gauss_rule(2), h, lam, mu, g, hi, mag_hi);
    bool conv = true;
    for (int k = 0; k < g; ++k) {
      if (std::abs(hi[k] - lo[k]) > std::max(tol, 1e-14 * mag_hi[k])) conv = false;
    }
    if (conv) {
      acc += hi;
      return;
    }
  }
  if (depth >= opt.max_depth) throw ConvergenceError("contour quadrature did not converge");
  const cplx mid = 0.5 * (a + b);
  const cplx mu_mid = nearest_root(curve.mu_squared(mid), ok ? mu[mu.size() / 2] : 0.5 * (mu_a + mu_b));
  integrate_segment(curve, a, mid, mu_a, mu_mid, g, 0.5 * tol, depth + 1, opt, acc);
  integrate_segment(curve, mid, b, mu_mid, mu_b, g, 0.5 * tol, depth + 1, opt, acc);
}

}  // namespace detail

/// Integrals of lambda^{k-1} d lambda / mu over the path, k = 1..count.
inline CVector integrate_monomials(const SpectralCurve& curve, const CyclePath& path, int count,
                                   const QuadratureOptions& opt = {}) {
  const auto& z = path.nodes();
  const auto& mu = path.mus();
  double total = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) total += std::abs(z[i] - z[i - 1]);
  CVector acc = CVector::Zero(count);
  if (total == 0.0) return acc;
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double share = opt.tolerance * std::abs(z[i] - z[i - 1]) / total;
    detail::integrate_segment(curve, z[i - 1], z[i], mu[i - 1], mu[i], count, share, 0, opt, acc);
  }
  return acc;
}

/// Period of lambda^{k-1} d lambda / mu over the path (k is one-based).
inline cplx integrate_monomial(const SpectralCurve& curve, const CyclePath& path, int k,
                               const QuadratureOptions& opt = {}) {
  if (k < 1) throw Error("integrate_monomial: k must be >= 1");
  return integrate_monomials(curve, path, k, opt)[k - 1];
}

/// Algebraic intersection number p . q on the curve: transversal crossings in
/// the lambda-plane count only where both paths carry the same value of mu.
inline int intersection_number(const SpectralCurve& curve, const CyclePath& p, const CyclePath& q) {
  const auto& P = p.nodes();
  const auto& Q = q.nodes();
  const auto& mp = p.mus();
  const auto& mq = q.mus();
  int total = 0;
  for (std::size_t i = 0; i + 1 < P.size(); ++i) {
    const cplx a = P[i], b = P[i + 1];
    const double pxl = std::min(a.real(), b.real()), pxh = std::max(a.real(), b.real());
    const double pyl = std::min(a.imag(), b.imag()), pyh = std::max(a.imag(), b.imag());
    for (std::size_t j = 0; j + 1 < Q.size(); ++j) {
      const cplx c = Q[j], d = Q[j + 1];
      if (pxh < std::min(c.real(), d.real()) || std::max(c.real(), d.real()) < pxl) continue;
      if (pyh < std::min(c.imag(), d.imag()) || std::max(c.imag(), d.imag()) < pyl) continue;
      const cplx d1 = b - a, d2 = d - c;
      const double den = (std::conj(d1) * d2).imag();
      if (std::abs(den) < 1e-300) continue;
      const cplx w = c - a;
      const double t = (std::conj(w) * d2).imag() / den;
      const double s = (std::conj(w) * d1).imag() / den;
      if (t < 0.0 || t >= 1.0 || s < 0.0 || s >= 1.0) continue;
      const cplx x = a + t * d1;
      const cplx f = curve.mu_squared(x);
      const cplx mu1 = detail::nearest_root(f, mp[i]);
      const cplx mu2 = detail::nearest_root(f, mq[j]);
      if (std::abs(mu1 - mu2) < 1e-8 * std::abs(mu1)) total += den > 0 ? 1 : -1;
    }
  }
  return total;
}

}  // namespace fgap
