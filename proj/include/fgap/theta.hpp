#pragma once

#include <cmath>
#include <vector>

#include "fgap/core.hpp"

namespace fgap {

/// Upper incomplete gamma Gamma(a, x) for half-integer or integer a = twice_a / 2.
inline double upper_gamma_half(int twice_a, double x) {
  double val;
  double a;
  if (twice_a % 2 == 0) {
    val = std::exp(-x);  // Gamma(1, x)
    a = 1.0;
  } else {
    val = std::sqrt(pi) * std::erfc(std::sqrt(x));  // Gamma(1/2, x)
    a = 0.5;
  }
  while (2.0 * a < twice_a) {
    val = a * val + std::pow(x, a) * std::exp(-x);
    a += 1.0;
  }
  return val;
}

/// Riemann matrix with a precomputed enumeration ellipsoid.
///
/// Arguments are accepted when c = Im(B)^{-1} Im z satisfies |c_i| <= 1/2,
/// which is what reduce() produces; the radius is chosen so that the
/// neglected tail is below target_abs_error for every such argument.
class ThetaContext {
 public:
  ThetaContext(const CMatrix& B, double target_abs_error = 1e-13) : B_(B), target_(target_abs_error) {
    g_ = static_cast<int>(B.rows());
    Y_ = B.imag();
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, B.cwiseAbs().maxCoeff())) {
      throw ThetaDomainError("Riemann matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(Y_);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ThetaDomainError("Im(B) is not positive definite");
    yldlt_.compute(Y_);
    Eigen::LLT<RMatrix> llt(pi * Y_);
    T_ = llt.matrixU();

    // rho bounds the shortest vector of T Z^g: below by the smallest
    // eigenvalue, above by the shortest column
    const double rho_lo = std::sqrt(pi * es.eigenvalues().minCoeff());
    double rho_hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g_; ++i) rho_hi = std::min(rho_hi, T_.col(i).norm());
    // the summands carry exp(pi c^t Y c) <= exp(pi/4 sum |Y_ij|) for |c_i| <= 1/2
    const double scale = std::exp(0.25 * pi * Y_.cwiseAbs().sum());
    double r = 0.5 * rho_hi + 0.5;
    for (;;) {
      const double t = r - 0.5 * rho_hi;
      tail_ = scale * 0.5 * g_ * std::pow(2.0 / rho_lo, g_) * upper_gamma_half(g_, t * t);
      if (tail_ <= target_ || r > 1e3) break;
      r += 0.05;
    }
    radius_ = r;
  }

  int genus() const { return g_; }
  const CMatrix& B() const { return B_; }
  double target_abs_error() const { return target_; }
  double radius() const { return radius_; }
  double tail_bound() const { return tail_; }

  /// Im(B)^{-1} Im z: the centre of the dominant lattice terms (with a sign flip).
  RVector centre(const CVector& z) const { return yldlt_.solve(z.imag()); }

  /// Lattice sum over { n : |T (n + c)| < R } for the given radius.
  cplx sum(const CVector& z, double R) const {
    const RVector c = centre(z);
    IVector n(g_);
    cplx acc = 0.0;
    enumerate(g_ - 1, c, R * R, n, z, acc);
    return acc;
  }

  /// Number of lattice points used for argument z.
  long count(const CVector& z) const {
    const RVector c = centre(z);
    IVector n(g_);
    long cnt = 0;
    count_rec(g_ - 1, c, radius_ * radius_, n, cnt);
    return cnt;
  }

 private:
  // admissible range of n_i given n_{i+1..g-1}: |T(n + c)|^2 <= r2
  bool range(int i, const RVector& c, double r2, const IVector& n, int& lo, int& hi) const {
    double used = 0.0;
    for (int r = i + 1; r < g_; ++r) {
      double v = 0.0;
      for (int j = r; j < g_; ++j) v += T_(r, j) * (n[j] + c[j]);
      used += v * v;
    }
    const double rem = r2 - used;
    if (rem < 0.0) return false;
    double shift = 0.0;
    for (int j = i + 1; j < g_; ++j) shift += T_(i, j) * (n[j] + c[j]);
    const double mid = -c[i] - shift / T_(i, i);
    const double half = std::sqrt(rem) / T_(i, i);
    lo = static_cast<int>(std::ceil(mid - half));
    hi = static_cast<int>(std::floor(mid + half));
    return lo <= hi;
  }

  void enumerate(int i, const RVector& c, double r2, IVector& n, const CVector& z, cplx& acc) const {
    int lo, hi;
    if (!range(i, c, r2, n, lo, hi)) return;
    for (int k = lo; k <= hi; ++k) {
      n[i] = k;
      if (i > 0) {
        enumerate(i - 1, c, r2, n, z, acc);
        continue;
      }
      cplx q = 0.0, l = 0.0;
      for (int a = 0; a < g_; ++a) {
        if (n[a] == 0) continue;
        cplx row = 0.0;
        for (int b = 0; b < g_; ++b) row += B_(a, b) * static_cast<double>(n[b]);
        q += static_cast<double>(n[a]) * row;
        l += static_cast<double>(n[a]) * z[a];
      }
      acc += std::exp(I * pi * q + 2.0 * pi * I * l);
    }
  }

  void count_rec(int i, const RVector& c, double r2, IVector& n, long& cnt) const {
    int lo, hi;
    if (!range(i, c, r2, n, lo, hi)) return;
    for (int k = lo; k <= hi; ++k) {
      n[i] = k;
      if (i == 0) {
        ++cnt;
      } else {
        count_rec(i - 1, c, r2, n, cnt);
      }
    }
  }

  CMatrix B_;
  RMatrix Y_;
  RMatrix T_;
  Eigen::LDLT<RMatrix> yldlt_;
  double target_;
  double radius_ = 0.0;
  double tail_ = 0.0;
  int g_ = 0;
};

/// theta(z | B) for an argument inside the declared region.
inline cplx theta(const ThetaContext& ctx, const CVector& z) {
  const RVector c = ctx.centre(z);
  if (c.cwiseAbs().maxCoeff() > 0.5 + 1e-9) throw ThetaDomainError("theta: argument outside the reduced region");
  return ctx.sum(z, ctx.radius());
}

struct ThetaReduction {
  CVector z0;
  IVector N;
  IVector M;
  cplx log_factor;  ///< theta(z) = theta(z0) * exp(log_factor)
};

/// z = z0 + N + B M with z0 in the fundamental domain, plus the transformation exponent.
inline ThetaReduction reduce(const ThetaContext& ctx, const CVector& z) {
  ThetaReduction r;
  const RVector c = ctx.centre(z);
  r.M = c.array().round().cast<int>().matrix();
  const CVector mc = r.M.cast<cplx>();
  CVector w = z - ctx.B() * mc;
  r.N = w.real().array().round().cast<int>().matrix();
  r.z0 = w - r.N.cast<cplx>();
  r.log_factor = -2.0 * pi * I * (mc.transpose() * r.z0)(0, 0) - pi * I * (mc.transpose() * ctx.B() * mc)(0, 0);
  return r;
}

/// theta(z | B) for any z: reduce, evaluate, apply the transformation factor.
inline cplx theta_any(const ThetaContext& ctx, const CVector& z) {
  const auto r = reduce(ctx, z);
  return theta(ctx, r.z0) * std::exp(r.log_factor);
}

/// |theta((z1, z2) | diag(B1, B2)) - theta(z1 | B1) theta(z2 | B2)|.
inline double block_factorization_check(const CMatrix& B1, const CMatrix& B2, const CVector& z1, const CVector& z2,
                                        double target_abs_error = 1e-13) {
  const auto g1 = B1.rows(), g2 = B2.rows();
  CMatrix B = CMatrix::Zero(g1 + g2, g1 + g2);
  B.topLeftCorner(g1, g1) = B1;
  B.bottomRightCorner(g2, g2) = B2;
  CVector z(g1 + g2);
  z << z1, z2;
  const ThetaContext joint(B, target_abs_error), c1(B1, target_abs_error), c2(B2, target_abs_error);
  return std::abs(theta_any(joint, z) - theta_any(c1, z1) * theta_any(c2, z2));
}

}  // namespace fgap
