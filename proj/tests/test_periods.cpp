#include <catch_amalgamated.hpp>

#include <random>

#include "fgap/homology.hpp"
#include "fgap/periods.hpp"
#include "test_curves.hpp"

using namespace fgap;

namespace {

void check_structure(const PeriodData& pd) {
  const int g = pd.g, m = pd.m;
  CHECK((pd.B - pd.B.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(pd.B.imag()).eigenvalues().minCoeff() > 0.0);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double target = (i == j && i >= m) ? -0.5 : 0.0;
      CHECK(std::abs(pd.B(i, j).real() - target) < 1e-6);
    }
  }
  CHECK((I * pd.U).imag().cwiseAbs().maxCoeff() < 1e-8);
  CHECK((I * pd.V).imag().cwiseAbs().maxCoeff() < 1e-8);
  CHECK(pd.a0_residual < 1e-8);
}

// dense trapezoid rule on the circle |lambda - centre| = r, mu continued
cplx trapezoid_circle(const SpectralCurve& c, cplx centre, double r, int n, int k) {
  cplx acc = 0.0;
  cplx mu = std::sqrt(c.mu_squared(centre + r));
  for (int j = 0; j < n; ++j) {
    const cplx e = std::exp(I * (2.0 * pi * j / n));
    const cplx lam = centre + r * e;
    const cplx root = std::sqrt(c.mu_squared(lam));
    mu = std::abs(root - mu) <= std::abs(root + mu) ? root : -root;
    acc += std::pow(lam, k - 1) / mu * (I * r * e);
  }
  return acc * (2.0 * pi / n);
}

}  // namespace

TEST_CASE("monomial integrals: cancellation and residue-free loops", "[periods]") {
  const auto c = testing_curves::g2_mixed();
  const auto basis = build_basis(c);
  for (const auto& p : basis.raw_c) {
    const CVector fwd = integrate_monomials(c, p, 2), back = integrate_monomials(c, p.reversed(), 2);
    CHECK((fwd + back).cwiseAbs().maxCoeff() < 1e-12);
  }
  const std::vector<cplx> square{cplx{1.0, 1.0}, cplx{3.0, 1.0}, cplx{3.0, 3.0}, cplx{1.0, 3.0}};
  const CyclePath empty(c, square, c.mu_sheet0(square[0]));
  CHECK(integrate_monomials(c, empty, 2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a-cycle period matches a brute-force trapezoid oracle", "[periods]") {
  const auto c = testing_curves::g1_real();
  // a circle enclosing -2 and -0.5 (and nothing else) is homologous to the oval over the cut
  const cplx centre{-1.25, 0.0};
  const double r = 1.0;
  std::vector<cplx> poly;
  for (int j = 0; j < 400; ++j) poly.push_back(centre + r * std::exp(I * (2.0 * pi * j / 400)));
  const CyclePath loop(c, poly, std::sqrt(c.mu_squared(poly[0])));
  const cplx engine = integrate_monomial(c, loop, 1);
  const cplx oracle = trapezoid_circle(c, centre, r, 1000000, 1);
  CHECK(std::abs(engine - oracle) < 1e-9);
  // and it equals twice the real-interval integral, up to sign
  const auto basis = build_basis(c);
  const cplx bper = basis.b_periods(0, 0);
  CHECK(std::abs(std::abs(bper) - std::abs(engine)) < 1e-9);
}

TEST_CASE("build_basis is symplectic with the tau action of the special basis", "[periods]") {
  for (const auto& c : testing_curves::matrix()) {
    const int g = c.genus(), m = c.real_pair_count();
    const auto b = build_basis(c);
    IMatrix j = IMatrix::Zero(2 * g, 2 * g);
    j.topRightCorner(g, g).setIdentity();
    j.bottomLeftCorner(g, g) = -IMatrix::Identity(g, g);
    CHECK(b.intersection == j);
    IMatrix tau = IMatrix::Zero(2 * g, 2 * g);
    tau.topLeftCorner(g, g) = -IMatrix::Identity(g, g);
    tau.bottomRightCorner(g, g).setIdentity();
    for (int i = m; i < g; ++i) tau(i, g + i) = 1;  // tau b_i = b_i + a_i for i > m
    CHECK(b.tau_action == tau);
  }
  CHECK_THROWS_AS(build_basis(SpectralCurve({{-3.0, -1.0}, {-2.0, -0.5}}, {})), BasisError);
}

TEST_CASE("period_data examples", "[periods]") {
  SECTION("g = m = 1: B purely imaginary") {
    const auto pd = period_data(testing_curves::g1_real());
    CHECK(std::abs(pd.B(0, 0).real()) < 1e-10);
    CHECK(pd.B(0, 0).imag() > 0.0);
    CHECK(pd.u_oracle_error < 1e-6);
    CHECK(pd.v_oracle_error < 1e-6);
  }
  SECTION("g = 1, m = 0: Re B = -1/2") {
    const auto pd = period_data(testing_curves::g1_complex());
    CHECK(std::abs(pd.B(0, 0).real() + 0.5) < 1e-6);
    CHECK(pd.B(0, 0).imag() > 0.0);
  }
  SECTION("g = m = 2: Re B = 0") {
    const auto pd = period_data(testing_curves::g2_real());
    CHECK(pd.B.real().cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("structural invariants over the curve matrix", "[periods]") {
  for (const auto& c : testing_curves::matrix()) {
    const auto pd = period_data(c);
    check_structure(pd);
    CHECK(pd.u_oracle_error < 1e-6);
    CHECK(pd.v_oracle_error < 1e-6);
    // a-periods of the normalized differentials are the identity
    const auto basis = build_basis(c);
    CHECK((pd.norm_coeffs * basis.a_periods - CMatrix::Identity(pd.g, pd.g)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("structural invariants on randomized curves", "[periods]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 24; ++trial) {
    const int g = 1 + trial % 3, m = (trial / 3) % (g + 1);
    const auto c = testing_curves::random_curve(rng, g, m);
    INFO("trial " << trial << " g=" << g << " m=" << m);
    check_structure(period_data(c));
  }
}

TEST_CASE("Abel map: base point, route independence, half periods", "[periods]") {
  const auto c = testing_curves::g2_mixed();
  const auto pd = period_data(c);
  const SheetPoint inf{cplx{std::numeric_limits<double>::infinity(), 0.0}, 0, 0.0};
  CHECK(abel_map(c, pd.norm_coeffs, inf, std::span<const cplx>{}).cwiseAbs().maxCoeff() == 0.0);

  SECTION("routes differing by an a-cycle differ by a unit vector") {
    const auto g1 = testing_curves::g1_real();
    const auto p1 = period_data(g1);
    const double x = abel_base(g1);
    const SheetPoint P = make_point(g1, cplx{0.5, 0.2}, 0);
    const std::vector<cplx> direct{x, P.lambda};
    // detour around the oval crossing the cut midpoint and the positive axis
    const std::vector<cplx> detour{x, cplx{0.25, 0.0}, cplx{0.25, 1.0}, cplx{-1.25, 1.0}, cplx{-1.25, -1.0},
                                   cplx{0.25, -1.0}, cplx{0.25, 0.0}, P.lambda};
    const CVector a = abel_map(g1, p1.norm_coeffs, P, direct), b = abel_map(g1, p1.norm_coeffs, P, detour);
    const CVector d = b - a;
    CHECK(std::abs(std::abs(d[0]) - 1.0) < 1e-8);
  }
  SECTION("different routes agree modulo the lattice") {
    const SheetPoint P = make_point(c, cplx{-2.0, -0.7}, 1);
    const double x = abel_base(c);
    const std::vector<cplx> r1 = canonical_route(c, P.lambda);
    const std::vector<cplx> r2{x, cplx{x, -5.0}, cplx{-6.0, -5.0}, cplx{-6.0, 0.3}, cplx{-2.2, 0.3}, P.lambda};
    const CVector d = abel_map(c, pd.norm_coeffs, P, r1) - abel_map(c, pd.norm_coeffs, P, r2);
    CHECK(lattice_reduce(d, pd.B).residual.cwiseAbs().maxCoeff() < 1e-8);
  }
  SECTION("g = 1: twice A(E1) is a lattice vector") {
    const auto g1 = testing_curves::g1_real();
    const auto p1 = period_data(g1);
    for (const auto& e : g1.branch_points()) {
      const CVector a = abel_point(g1, p1.norm_coeffs, branch_sheet_point(e));
      CHECK(lattice_reduce(2.0 * a, p1.B).residual.cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SECTION("the involution negates A") {
    const SheetPoint P = make_point(c, cplx{0.7, 1.3}, 0), Q = make_point(c, cplx{0.7, 1.3}, 1);
    const CVector s = abel_point(c, pd.norm_coeffs, P) + abel_point(c, pd.norm_coeffs, Q);
    CHECK(lattice_reduce(s, pd.B).residual.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Riemann constants from Abel sums match the block formula", "[periods]") {
  SECTION("g = m = 1: K = (1 + B)/2") {
    const auto c = testing_curves::g1_real();
    const auto pd = period_data(c);
    const auto rc = riemann_constants(c, pd);
    CHECK(std::abs(rc.K[0] - 0.5 * (1.0 + pd.B(0, 0))) < 1e-14);
    CHECK(rc.residual < 1e-6);
  }
  SECTION("g = m = 2") {
    const auto c = testing_curves::g2_real();
    const auto pd = period_data(c);
    const CVector expect = 0.5 * CVector::Constant(2, 1.0) + 0.5 * pd.B * (CVector(2) << 1.0, 2.0).finished();
    CHECK((pd.K - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(riemann_constants(c, pd).residual < 1e-6);
  }
  SECTION("randomized curves") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
      const int g = 1 + trial % 3, m = (trial / 3) % (g + 1);
      const auto c = testing_curves::random_curve(rng, g, m);
      const auto pd = period_data(c);
      INFO("trial " << trial);
      CHECK(riemann_constants(c, pd).residual < 1e-6);
    }
  }
}
