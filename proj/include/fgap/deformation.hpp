#pragma once

#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "fgap/charge.hpp"
#include "fgap/core.hpp"
#include "fgap/periods.hpp"
#include "fgap/solution.hpp"
#include "fgap/spectral_curve.hpp"

namespace fgap {

struct SweepRecord {
  double k = 1.0;
  bool ok = false;
  std::string error;  ///< set when the period or charge computation failed at this k
  CMatrix B;
  double offdiag_norm = 0.0;
  double diag_re_residual = 0.0;
  double min_eig_im = 0.0;
  IVector charges;
};

/// Largest |B_ij| between the two blocks and between distinct indices of the first block.
inline double offdiag_norm(const CMatrix& B, int m) {
  const int g = static_cast<int>(B.rows());
  double v = 0.0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      if (i == j) continue;
      if (i < m || j < m) v = std::max(v, std::abs(B(i, j)));
    }
  }
  return v;
}

/// Deviation of Re(B) from diag(0_m, -1/2 I) on the diagonal blocks.
inline double diag_re_residual(const CMatrix& B, int m) {
  const int g = static_cast<int>(B.rows());
  double v = 0.0;
  for (int j = 0; j < m; ++j) v = std::max(v, std::abs(B(j, j).real()));
  for (int i = m; i < g; ++i) {
    for (int j = m; j < g; ++j) v = std::max(v, std::abs(B(i, j).real() + (i == j ? 0.5 : 0.0)));
  }
  return v;
}

inline SweepRecord sweep_point(const SpectralCurve& curve, const TorusPoint& tp, double k) {
  SweepRecord r;
  r.k = k;
  try {
    const auto ck = scaled_curve(curve, k);
    const auto pd = period_data(ck);
    const int m = pd.m;
    r.B = pd.B;
    r.offdiag_norm = offdiag_norm(pd.B, m);
    r.diag_re_residual = diag_re_residual(pd.B, m);
    r.min_eig_im = Eigen::SelfAdjointEigenSolver<RMatrix>(pd.B.imag()).eigenvalues().minCoeff();
    r.charges = winding_charges(make_solution(pd, tp));
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

/// Periods and charges along Gamma(k) for each k (increasing, k >= 1).
inline std::vector<SweepRecord> sweep(const SpectralCurve& curve, const TorusPoint& tp, const std::vector<double>& ks) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1.0 || (i > 0 && ks[i] <= ks[i - 1])) throw Error("sweep: k values must be increasing and >= 1");
  }
  std::vector<std::future<SweepRecord>> jobs;
  for (double k : ks) jobs.push_back(std::async(std::launch::async, [&, k] { return sweep_point(curve, tp, k); }));
  std::vector<SweepRecord> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// First-order Richardson extrapolation in 1/k from two samples.
inline cplx richardson(double k1, cplx v1, double k2, cplx v2) { return (k2 * v2 - k1 * v1) / (k2 - k1); }

struct LimitReport {
  bool passed = true;
  std::vector<std::string> failures;
  std::vector<cplx> tau_extrapolated;  ///< limits of B_jj, j <= m
  bool charges_constant = true;
};

/// Limiting block shape at the largest k: |Re B_jj| (j <= m), |Re B2 + I/2| and the
/// coupling entries all below tol; charges equal on every record.
inline LimitReport limit_check(const std::vector<SweepRecord>& records, int m, double tol = 0.02) {
  LimitReport rep;
  auto fail = [&rep](std::string msg) {
    rep.passed = false;
    rep.failures.push_back(std::move(msg));
  };
  std::vector<const SweepRecord*> good;
  for (const auto& r : records) {
    if (r.ok) {
      good.push_back(&r);
    } else {
      fail("k=" + std::to_string(r.k) + ": " + r.error);
    }
  }
  if (good.empty()) {
    fail("no successful records");
    return rep;
  }
  const auto& last = *good.back();
  if (last.k < 1e3) fail("largest k is below 1000");
  if (last.offdiag_norm >= tol) fail("off-block entries at k=" + std::to_string(last.k) + ": " + std::to_string(last.offdiag_norm));
  if (last.diag_re_residual >= tol) fail("diagonal real parts at k=" + std::to_string(last.k) + ": " + std::to_string(last.diag_re_residual));
  for (const auto* r : good) {
    if (r->charges != good.front()->charges) rep.charges_constant = false;
    if (r->min_eig_im <= 0.0) fail("Im B not positive definite at k=" + std::to_string(r->k));
  }
  if (!rep.charges_constant) fail("charges change along the sweep");
  if (good.size() >= 2) {
    const auto& prev = *good[good.size() - 2];
    for (int j = 0; j < m; ++j) rep.tau_extrapolated.push_back(richardson(prev.k, prev.B(j, j), last.k, last.B(j, j)));
  }
  return rep;
}

/// Normalized period ratio of a genus-1 component y^2 = x (x - e1)(x - e2),
/// e2 < e1 < 0, from real-interval integrals of 1/|y|: tau = i I_cut / I_gap.
inline cplx elliptic_tau(const SpectralCurve& component, int n = 400) {
  if (component.genus() != 1 || component.real_pair_count() != 1) throw Error("elliptic_tau needs a curve with one real pair");
  const double e2 = component.real_pairs()[0].lower, e1 = component.real_pairs()[0].upper;
  // integral of 1/sqrt|(x - a)(x - b)(x - c)| over [a, b]; x = a + (b - a)(1 - cos t)/2
  // absorbs the endpoint singularities, leaving a smooth even integrand (midpoint rule)
  auto interval = [n](double a, double b, double c) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = pi * (i + 0.5) / n;
      const double x = a + 0.5 * (b - a) * (1.0 - std::cos(t));
      s += 1.0 / std::sqrt(std::abs(x - c));
    }
    return s * pi / n;
  };
  const double cut = interval(e2, e1, 0.0);
  const double gap = interval(e1, 0.0, e2);
  return I * cut / gap;
}

}  // namespace fgap
