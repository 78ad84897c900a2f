#pragma once

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fgap/charge.hpp"
#include "fgap/core.hpp"
#include "fgap/periods.hpp"
#include "fgap/spectral_curve.hpp"

namespace fgap::io {

using nlohmann::json;

/// {"real_pairs": [[lo, hi], ...], "complex_pairs": [[re, im], ...]}
inline SpectralCurve curve_from_json(const json& j) {
  std::vector<RealPair> rp;
  std::vector<cplx> cp;
  if (j.contains("real_pairs")) {
    for (const auto& p : j.at("real_pairs")) {
      if (!p.is_array() || p.size() != 2) throw json::type_error::create(302, "real pair must be [lower, upper]", &p);
      rp.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  if (j.contains("complex_pairs")) {
    for (const auto& p : j.at("complex_pairs")) {
      if (!p.is_array() || p.size() != 2) throw json::type_error::create(302, "complex pair must be [re, im]", &p);
      cp.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  }
  return SpectralCurve(std::move(rp), std::move(cp));
}

inline json curve_to_json(const SpectralCurve& c) {
  json j;
  j["real_pairs"] = json::array();
  for (const auto& p : c.real_pairs()) j["real_pairs"].push_back({p.lower, p.upper});
  j["complex_pairs"] = json::array();
  for (const auto& e : c.complex_pairs()) j["complex_pairs"].push_back({e.real(), e.imag()});
  return j;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

inline json to_json(const CMatrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    a.push_back(row);
  }
  return a;
}

inline json to_json(const IVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline json to_json(const ValidationReport& r) {
  return {{"valid", r.valid}, {"violations", r.violations}, {"warnings", r.warnings}};
}

inline json to_json(const PeriodData& pd) {
  return {{"g", pd.g},
          {"m", pd.m},
          {"fingerprint", hex(pd.fingerprint)},
          {"B", to_json(pd.B)},
          {"norm_coeffs", to_json(pd.norm_coeffs)},
          {"U", to_json(pd.U)},
          {"V", to_json(pd.V)},
          {"A0", to_json(pd.A0)},
          {"eps_prime", to_json(pd.eps_prime)},
          {"eps", to_json(pd.eps)},
          {"K", to_json(pd.K)},
          {"checks", {{"a0_residual", pd.a0_residual}, {"u_oracle_error", pd.u_oracle_error}, {"v_oracle_error", pd.v_oracle_error}}}};
}

inline json to_json(const ChargeReport& r) {
  return {{"n", to_json(r.n)},
          {"winding_totals", to_json(r.totals)},
          {"n_direct", to_json(r.n_direct)},
          {"n_closed", to_json(r.n_closed)},
          {"epsilon_tilde", to_json(r.epsilon_tilde)},
          {"density", r.density},
          {"density_direct", r.density_direct},
          {"horizon", r.horizon},
          {"match", r.match}};
}

/// Decimal text with 17 significant digits (round-trips a double).
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace fgap::io
