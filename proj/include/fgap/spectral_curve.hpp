#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fgap/core.hpp"

namespace fgap {

/// A pair of real branch points (E_{2j}, E_{2j-1}) with lower < upper < 0.
struct RealPair {
  double lower;
  double upper;
};

/// Hyperelliptic spectral curve mu^2 = lambda * prod_i (lambda - E_i).
///
/// Real branch points come in pairs bounding a cut [lower, upper] on the
/// negative axis. Non-real branch points are stored by their upper
/// half-plane representative; the conjugate is implied.
///
/// Complex pairs are held in hub-angle order: sorted by pi - arg(E - H),
/// where H = 40 max|E| over the complex block is the point on the positive
/// axis from which the cycle basis fans out. Index j of a complex pair in
/// every downstream vector (B, U, V, K) refers to this order.
class SpectralCurve {
 public:
  SpectralCurve() = default;

  SpectralCurve(std::vector<RealPair> real_pairs, std::vector<cplx> complex_pairs)
      : real_pairs_(std::move(real_pairs)), complex_pairs_(std::move(complex_pairs)) {
    for (auto& e : complex_pairs_) {
      if (e.imag() < 0.0) e = std::conj(e);
    }
    sort_complex_block();
  }

  int genus() const { return static_cast<int>(real_pairs_.size() + complex_pairs_.size()); }
  int real_pair_count() const { return static_cast<int>(real_pairs_.size()); }

  const std::vector<RealPair>& real_pairs() const { return real_pairs_; }
  const std::vector<cplx>& complex_pairs() const { return complex_pairs_; }

  /// E_1..E_{2g}: real pair j gives (upper, lower), complex pair gives (E, conj E).
  std::vector<cplx> branch_points() const {
    std::vector<cplx> out;
    out.reserve(2 * genus());
    for (const auto& p : real_pairs_) {
      out.emplace_back(p.upper, 0.0);
      out.emplace_back(p.lower, 0.0);
    }
    for (const auto& e : complex_pairs_) {
      out.push_back(e);
      out.push_back(std::conj(e));
    }
    return out;
  }

  /// Branch points in the finite plane, including lambda = 0.
  std::vector<cplx> finite_branch_points() const {
    auto out = branch_points();
    out.insert(out.begin(), cplx{0.0, 0.0});
    return out;
  }

  /// E_{2j-1} for j = 1..g (one-based, as in the charge formulas).
  cplx odd_branch_point(int j) const {
    const int m = real_pair_count();
    if (j <= m) return {real_pairs_[j - 1].upper, 0.0};
    return complex_pairs_[j - m - 1];
  }

  cplx mu_squared(cplx lambda) const {
    cplx v = lambda;
    for (const auto& p : real_pairs_) v *= (lambda - p.upper) * (lambda - p.lower);
    for (const auto& e : complex_pairs_) v *= (lambda - e) * (lambda - std::conj(e));
    return v;
  }

  /// Sheet-0 branch of mu: cuts on [0, +inf), on each real pair and on each
  /// segment [conj E, E]; mu / lambda^{g+1/2} -> +1 along the upper side of
  /// the positive axis.
  cplx mu_sheet0(cplx lambda) const {
    // on the cut [0, inf) itself take the upper-side value
    cplx v = (lambda.imag() == 0.0 && lambda.real() > 0.0) ? cplx{std::sqrt(lambda.real()), 0.0}
                                                             : I * std::sqrt(-lambda);
    for (const auto& p : real_pairs_) v *= segment_sqrt(lambda, p.lower, p.upper);
    for (const auto& e : complex_pairs_) v *= segment_sqrt(lambda, std::conj(e), e);
    return v;
  }

  /// Largest branch-point modulus (1 for an empty curve).
  double scale() const {
    double s = 0.0;
    for (const auto& e : branch_points()) s = std::max(s, std::abs(e));
    return s > 0.0 ? s : 1.0;
  }

  double distance_to_branch(cplx lambda) const {
    double d = std::abs(lambda);
    for (const auto& e : branch_points()) d = std::min(d, std::abs(lambda - e));
    return d;
  }

  /// Hub position on the positive axis used by the complex-block cycles.
  double hub() const {
    double r = 0.0;
    for (const auto& e : complex_pairs_) r = std::max(r, std::abs(e));
    return 40.0 * r;
  }

  /// 64-bit FNV-1a digest of the branch data.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double x) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffU;
        h *= 1099511628211ULL;
      }
    };
    mix(static_cast<double>(real_pair_count()));
    for (const auto& p : real_pairs_) {
      mix(p.lower);
      mix(p.upper);
    }
    for (const auto& e : complex_pairs_) {
      mix(e.real());
      mix(e.imag());
    }
    return h;
  }

 private:
  // sqrt((z - a)(z - b)) with its cut on the segment [a, b], ~ (z - mid) at infinity.
  static cplx segment_sqrt(cplx z, cplx a, cplx b) {
    const cplx c = 0.5 * (a + b);
    const cplx h = 0.5 * (b - a);
    const cplx w = (z - c) / h;
    if (std::abs(w) < 1e-300) return h * I;
    return h * w * std::sqrt(1.0 - 1.0 / (w * w));
  }

  void sort_complex_block() {
    if (complex_pairs_.size() < 2) return;
    const double hub_x = hub();
    auto key = [hub_x](cplx e) { return pi - std::arg(e - hub_x); };
    std::stable_sort(complex_pairs_.begin(), complex_pairs_.end(),
                     [&](cplx a, cplx b) { return key(a) < key(b); });
  }

  std::vector<RealPair> real_pairs_;
  std::vector<cplx> complex_pairs_;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

/// Checks the reality and distinctness conditions on the branch data.
inline ValidationReport validate(const SpectralCurve& curve) {
  ValidationReport rep;
  auto violate = [&rep](std::string msg) {
    rep.valid = false;
    rep.violations.push_back(std::move(msg));
  };
  if (curve.genus() < 1) violate("genus must be positive");

  int j = 1;
  for (const auto& p : curve.real_pairs()) {
    const std::string tag = "real pair " + std::to_string(j);
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper)) violate(tag + ": non-finite branch point");
    if (p.lower >= 0.0 || p.upper >= 0.0) violate(tag + ": positive real branch point (real branch points must be negative)");
    if (!(p.lower < p.upper)) violate(tag + ": expected lower < upper");
    ++j;
  }
  j = 1;
  for (const auto& e : curve.complex_pairs()) {
    const std::string tag = "complex pair " + std::to_string(j);
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) violate(tag + ": non-finite branch point");
    if (e.imag() == 0.0) violate(tag + ": branch point is real (list it as a real pair)");
    ++j;
  }

  const auto pts = curve.finite_branch_points();
  const double tol = 1e-14 * curve.scale();
  bool coincide = false;
  for (std::size_t a = 0; a < pts.size() && !coincide; ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (std::abs(pts[a] - pts[b]) <= tol) {
        coincide = true;
        break;
      }
    }
  }
  if (coincide) violate("branch points are not distinct (or one sits at lambda = 0)");

  if (rep.valid && curve.genus() > 0) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& e : curve.branch_points()) {
      lo = std::min(lo, std::abs(e));
      hi = std::max(hi, std::abs(e));
    }
    if (hi / lo > 1e8) rep.warnings.push_back("ill-conditioned: branch-point modulus ratio exceeds 1e8");

    const auto& rp = curve.real_pairs();
    for (std::size_t a = 0; a < rp.size(); ++a) {
      for (std::size_t b = a + 1; b < rp.size(); ++b) {
        if (rp[a].lower < rp[b].upper && rp[b].lower < rp[a].upper) {
          rep.warnings.push_back("real pair cuts " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                                 " overlap; no cycle basis can be built");
        }
      }
    }
    for (std::size_t a = 0; a + 1 < rp.size(); ++a) {
      if (rp[a + 1].upper > rp[a].lower) {
        rep.warnings.push_back("real pairs are not ordered outward from 0; the scaled family collides at some k");
        break;
      }
    }
  }
  return rep;
}

/// Throws CurveError listing every violation when the curve is invalid.
inline void require_valid(const SpectralCurve& curve) {
  const auto rep = validate(curve);
  if (rep.valid) return;
  std::string msg = "invalid spectral curve:";
  for (const auto& v : rep.violations) msg += " [" + v + "]";
  throw CurveError(msg);
}

/// Member Gamma(k) of the multiscale family: real pair j scaled by k^{j-1},
/// every complex pair by k^m.
inline SpectralCurve scaled_curve(const SpectralCurve& curve, double k) {
  if (!(k >= 1.0)) throw CurveError("scaled_curve: k must be >= 1");
  require_valid(curve);
  std::vector<RealPair> rp;
  double f = 1.0;
  for (const auto& p : curve.real_pairs()) {
    rp.push_back({p.lower * f, p.upper * f});
    f *= k;
  }
  const double fc = std::pow(k, curve.real_pair_count());
  std::vector<cplx> cp;
  for (const auto& e : curve.complex_pairs()) cp.push_back(e * fc);
  return SpectralCurve(std::move(rp), std::move(cp));
}

/// Components of the nodal limit: one elliptic curve per real pair, plus the
/// complex block as a curve of its own when it is non-empty.
inline std::vector<SpectralCurve> elliptic_components(const SpectralCurve& curve) {
  require_valid(curve);
  std::vector<SpectralCurve> out;
  for (const auto& p : curve.real_pairs()) out.emplace_back(std::vector<RealPair>{p}, std::vector<cplx>{});
  if (!curve.complex_pairs().empty()) out.emplace_back(std::vector<RealPair>{}, curve.complex_pairs());
  return out;
}

/// A point of the curve: lambda with a concrete value of mu.
struct SheetPoint {
  cplx lambda;
  int sheet = 0;  ///< 0 when mu agrees with the sheet-0 branch, else 1
  cplx mu;
};

inline int sheet_of(const SpectralCurve& curve, cplx lambda, cplx mu) {
  const cplx ref = curve.mu_sheet0(lambda);
  return std::abs(mu - ref) <= std::abs(mu + ref) ? 0 : 1;
}

inline SheetPoint make_point(const SpectralCurve& curve, cplx lambda, int sheet) {
  const cplx mu0 = curve.mu_sheet0(lambda);
  return {lambda, sheet, sheet == 0 ? mu0 : -mu0};
}

namespace detail {

inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline double segment_branch_distance(const std::vector<cplx>& branch, cplx a, cplx b) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : branch) d = std::min(d, segment_distance(e, a, b));
  return d;
}

inline cplx nearest_root(cplx value_sq, cplx reference) {
  const cplx r = std::sqrt(value_sq);
  return std::abs(r - reference) <= std::abs(r + reference) ? r : -r;
}

}  // namespace detail

/// Subdivides a polyline so that every piece is shorter than `ratio` times its
/// distance to the nearest branch point. Throws PathError when a segment
/// passes within `min_distance` of a branch point.
inline std::vector<cplx> refine_polyline(const SpectralCurve& curve, std::span<const cplx> pts, double min_distance,
                                         double ratio = 0.2) {
  std::vector<cplx> out;
  if (pts.empty()) return out;
  const auto branch = curve.finite_branch_points();
  out.push_back(pts[0]);
  auto rec = [&](auto&& self, cplx a, cplx b, int depth) -> void {
    const double d = detail::segment_branch_distance(branch, a, b);
    if (d < min_distance) throw PathError("path passes within the exclusion radius of a branch point");
    if (std::abs(b - a) <= ratio * d) {
      out.push_back(b);
      return;
    }
    if (depth > 60) throw PathError("path refinement did not terminate");
    const cplx mid = 0.5 * (a + b);
    self(self, a, mid, depth + 1);
    self(self, mid, b, depth + 1);
  };
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] == pts[i - 1]) continue;
    rec(rec, pts[i - 1], pts[i], 0);
  }
  return out;
}

/// mu continued along refined nodes, starting from mu_start at nodes[0].
inline std::vector<cplx> lift_nodes(const SpectralCurve& curve, std::span<const cplx> nodes, cplx mu_start) {
  std::vector<cplx> mus;
  mus.reserve(nodes.size());
  cplx prev = mu_start;
  for (const auto& z : nodes) {
    prev = detail::nearest_root(curve.mu_squared(z), prev);
    mus.push_back(prev);
  }
  if (!mus.empty()) mus.front() = mu_start;
  return mus;
}

/// Analytic continuation of mu along a polyline in the lambda-plane.
inline SheetPoint continue_mu(const SpectralCurve& curve, std::span<const cplx> path, const SheetPoint& start,
                              double delta_rel = 1e-6) {
  const cplx f = curve.mu_squared(start.lambda);
  if (std::abs(start.mu * start.mu - f) > 1e-8 * std::max(std::abs(f), 1e-300)) {
    throw PathError("continue_mu: start point is not on the curve");
  }
  if (path.size() < 2) return start;
  if (std::abs(path.front() - start.lambda) > 1e-12 * std::max(1.0, std::abs(start.lambda))) {
    throw PathError("continue_mu: path does not begin at the start point");
  }
  const auto nodes = refine_polyline(curve, path, delta_rel * curve.scale());
  const auto mus = lift_nodes(curve, nodes, start.mu);
  const cplx end = nodes.back();
  return {end, sheet_of(curve, end, mus.back()), mus.back()};
}

}  // namespace fgap
