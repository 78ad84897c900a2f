// Command-line front end: validate, periods, charges, sample, sweep, admissible-scan.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fgap/fgap.hpp"
#include "fgap/json_io.hpp"

namespace {

using namespace fgap;
using io::json;

constexpr int exit_ok = 0;
constexpr int exit_domain = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string curve_path;
  std::vector<int> s;
  std::vector<double> x0;
  unsigned long long seed = 1;
  double tol_quadrature = 1e-10;
  double tol_theta = 1e-13;
  std::string format = "json";
  std::string out;
  bool all_s = false;
  double horizon = 200.0;
  double xmin = 0.0, xmax = 1.0, tmin = 0.0, tmax = 1.0;
  int nx = 10, nt = 10;
  std::vector<double> ks{1, 2, 5, 10, 100, 1000};
};

SpectralCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open curve file: " + path);
  json j;
  try {
    in >> j;
    return io::curve_from_json(j);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed curve file: ") + e.what());
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

QuadratureOptions quad_options(const RunConfig& cfg) {
  QuadratureOptions q;
  q.tolerance = cfg.tol_quadrature;
  return q;
}

TorusPoint torus_from(const RunConfig& cfg, int g, int m) {
  TorusPoint tp{IVector(m), RVector(g)};
  if (static_cast<int>(cfg.s.size()) != m) throw UsageError("--s needs " + std::to_string(m) + " entries (the curve's m)");
  for (int i = 0; i < m; ++i) tp.s[i] = cfg.s[i];
  if (cfg.x0.empty()) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < g; ++i) tp.x0[i] = u(rng);
  } else {
    if (static_cast<int>(cfg.x0.size()) != g) throw UsageError("--x0 needs " + std::to_string(g) + " entries (the curve's genus)");
    for (int i = 0; i < g; ++i) tp.x0[i] = cfg.x0[i];
  }
  return tp;
}

SpectralCurve valid_curve(const RunConfig& cfg) {
  auto curve = load_curve(cfg.curve_path);
  require_valid(curve);
  return curve;
}

int cmd_validate(const RunConfig& cfg) {
  const auto curve = load_curve(cfg.curve_path);
  const auto rep = validate(curve);
  Output out(cfg.out);
  out.stream() << io::to_json(rep).dump(2) << "\n";
  return rep.valid ? exit_ok : exit_domain;
}

int cmd_periods(const RunConfig& cfg) {
  const auto curve = valid_curve(cfg);
  const auto pd = period_data(curve, quad_options(cfg));
  json j = io::to_json(pd);
  j["curve"] = io::curve_to_json(curve);
  Output out(cfg.out);
  out.stream() << j.dump(2) << "\n";
  return exit_ok;
}

int cmd_charges(const RunConfig& cfg) {
  const auto curve = valid_curve(cfg);
  const auto pd = period_data(curve, quad_options(cfg));
  std::vector<IVector> symbols;
  if (cfg.all_s) {
    for (int mask = 0; mask < (1 << pd.m); ++mask) {
      IVector s(pd.m);
      for (int i = 0; i < pd.m; ++i) s[i] = (mask >> i) & 1 ? -1 : 1;
      symbols.push_back(s);
    }
  } else {
    auto tp = torus_from(cfg, pd.g, pd.m);
    symbols.push_back(tp.s);
  }
  RunConfig base = cfg;
  base.s.assign(pd.m, 1);
  const RVector x0 = torus_from(base, pd.g, pd.m).x0;

  bool all_match = true;
  json rows = json::array();
  std::ostringstream csv;
  csv << "s,n,n_closed,density,density_direct,match\n";
  auto join = [](const IVector& v) {
    std::string r;
    for (Eigen::Index i = 0; i < v.size(); ++i) r += (i ? " " : "") + std::to_string(v[i]);
    return r;
  };
  for (const auto& s : symbols) {
    const auto p = make_solution(pd, TorusPoint{s, x0}, std::nullopt, cfg.tol_theta);
    const auto rep = charge_report(p, cfg.horizon);
    all_match = all_match && rep.match;
    json row = io::to_json(rep);
    row["s"] = io::to_json(s);
    row["x0"] = io::to_json(x0);
    rows.push_back(row);
    csv << join(s) << "," << join(rep.n) << "," << join(rep.n_closed) << "," << io::num(rep.density) << ","
        << io::num(rep.density_direct) << "," << (rep.match ? "true" : "false") << "\n";
  }
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << csv.str();
  } else {
    out.stream() << (cfg.all_s ? rows : rows[0]).dump(2) << "\n";
  }
  return all_match ? exit_ok : exit_domain;
}

int cmd_sample(const RunConfig& cfg) {
  if (cfg.nx < 1 || cfg.nt < 1) throw UsageError("--nx and --nt must be positive");
  const auto curve = valid_curve(cfg);
  const auto pd = period_data(curve, quad_options(cfg));
  const auto p = make_solution(pd, torus_from(cfg, pd.g, pd.m), std::nullopt, cfg.tol_theta);
  auto coord = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
  std::vector<std::pair<double, double>> pts;
  for (int j = 0; j < cfg.nt; ++j) {
    for (int i = 0; i < cfg.nx; ++i) pts.emplace_back(coord(cfg.xmin, cfg.xmax, cfg.nx, i), coord(cfg.tmin, cfg.tmax, cfg.nt, j));
  }
  const auto u = u_along(p, pts);
  Output out(cfg.out);
  auto& os = out.stream();
  os << "x,t,re_exp_iu,im_exp_iu,u,modulus_error\n";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const cplx w = exp_iu(p, pts[k].first, pts[k].second);
    os << io::num(pts[k].first) << "," << io::num(pts[k].second) << "," << io::num(w.real()) << "," << io::num(w.imag()) << ","
       << io::num(u[k]) << "," << io::num(std::abs(std::abs(w) - 1.0)) << "\n";
  }
  return exit_ok;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto curve = valid_curve(cfg);
  const int g = curve.genus(), m = curve.real_pair_count();
  const auto recs = sweep(curve, torus_from(cfg, g, m), cfg.ks);
  Output out(cfg.out);
  auto& os = out.stream();
  os << "k,ok,offdiag_norm,diag_re_residual";
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) os << ",re_B" << i + 1 << j + 1 << ",im_B" << i + 1 << j + 1;
  }
  for (int j = 0; j < g; ++j) os << ",n" << j + 1;
  os << "\n";
  bool ok = true;
  for (const auto& r : recs) {
    ok = ok && r.ok;
    os << io::num(r.k) << "," << (r.ok ? 1 : 0) << "," << io::num(r.offdiag_norm) << "," << io::num(r.diag_re_residual);
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const cplx b = r.ok ? r.B(i, j) : cplx{NAN, NAN};
        os << "," << io::num(b.real()) << "," << io::num(b.imag());
      }
    }
    for (int j = 0; j < g; ++j) os << "," << (r.ok ? std::to_string(r.charges[j]) : "");
    os << "\n";
    if (!r.ok) std::cerr << "k=" << r.k << ": " << r.error << "\n";
  }
  return ok ? exit_ok : exit_domain;
}

int cmd_admissible_scan(const RunConfig& cfg) {
  const auto curve = valid_curve(cfg);
  const auto pd = period_data(curve, quad_options(cfg));
  std::vector<AdmissiblePoint> pts;
  if (pd.g == 1 && pd.m == 1) {
    pts = admissible_scan_g1(curve, pd);
  } else if (pd.g == 2 && pd.m == 2) {
    pts = admissible_scan_g2(curve, pd);
  } else {
    throw UsageError("admissible-scan supports g = m = 1 and g = m = 2 curves");
  }
  bool all = !pts.empty();
  json rows = json::array();
  Output out(cfg.out);
  auto& os = out.stream();
  if (cfg.format == "csv") os << "point,lambda,mu,s,s_prime,coincide\n";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& a = pts[k];
    all = all && a.coincide;
    json pj = json::array();
    for (const auto& P : a.divisor) pj.push_back({{"lambda", P.lambda.real()}, {"mu", P.mu.real()}});
    rows.push_back({{"divisor", pj}, {"s", io::to_json(a.torus.s)}, {"x0", io::to_json(a.torus.x0)},
                    {"s_prime", io::to_json(a.s_prime)}, {"coincide", a.coincide}});
    if (cfg.format == "csv") {
      for (std::size_t i = 0; i < a.divisor.size(); ++i) {
        os << k << "," << io::num(a.divisor[i].lambda.real()) << "," << io::num(a.divisor[i].mu.real()) << ","
           << a.torus.s[std::min<Eigen::Index>(i, a.torus.s.size() - 1)] << ","
           << a.s_prime[std::min<Eigen::Index>(i, a.s_prime.size() - 1)] << "," << (a.coincide ? "true" : "false") << "\n";
      }
    }
  }
  if (cfg.format != "csv") os << rows.dump(2) << "\n";
  return all ? exit_ok : exit_domain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-gap sine-Gordon solutions and their topological charges"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve_path, "curve JSON file")->required();
    sub->add_option("--seed", cfg.seed, "seed for randomized inputs (default x0)");
    sub->add_option("--tol-quadrature", cfg.tol_quadrature, "contour quadrature tolerance");
    sub->add_option("--tol-theta", cfg.tol_theta, "theta truncation tolerance");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_torus = [&cfg](CLI::App* sub) {
    sub->add_option("--s", cfg.s, "torus symbol, m entries of +1/-1")->delimiter(',');
    sub->add_option("--x0", cfg.x0, "torus coordinate, g entries (default: random from --seed)")->delimiter(',');
  };

  auto* validate_cmd = app.add_subcommand("validate", "check the reality conditions of a curve");
  add_common(validate_cmd);
  auto* periods_cmd = app.add_subcommand("periods", "period matrix, U, V, A(0), K");
  add_common(periods_cmd);
  auto* charges_cmd = app.add_subcommand("charges", "winding charges, closed form and density");
  add_common(charges_cmd);
  add_torus(charges_cmd);
  charges_cmd->add_flag("--all-s", cfg.all_s, "report every torus component");
  charges_cmd->add_option("--horizon", cfg.horizon, "x horizon of the direct density estimate");
  auto* sample_cmd = app.add_subcommand("sample", "e^{iu} and u on an (x, t) grid, as CSV");
  add_common(sample_cmd);
  add_torus(sample_cmd);
  sample_cmd->add_option("--xmin", cfg.xmin);
  sample_cmd->add_option("--xmax", cfg.xmax);
  sample_cmd->add_option("--nx", cfg.nx);
  sample_cmd->add_option("--tmin", cfg.tmin);
  sample_cmd->add_option("--tmax", cfg.tmax);
  sample_cmd->add_option("--nt", cfg.nt);
  auto* sweep_cmd = app.add_subcommand("sweep", "periods and charges along the scaled family, as CSV");
  add_common(sweep_cmd);
  add_torus(sweep_cmd);
  sweep_cmd->add_option("--k", cfg.ks, "scale factors, increasing")->delimiter(',');
  auto* scan_cmd = app.add_subcommand("admissible-scan", "admissible divisors on the real ovals and their symbols");
  add_common(scan_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg);
    if (*periods_cmd) return cmd_periods(cfg);
    if (*charges_cmd) return cmd_charges(cfg);
    if (*sample_cmd) return cmd_sample(cfg);
    if (*sweep_cmd) return cmd_sweep(cfg);
    if (*scan_cmd) return cmd_admissible_scan(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const fgap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_domain;
  }
  return exit_usage;
}
