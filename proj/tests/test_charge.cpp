#include <catch_amalgamated.hpp>

#include <random>

#include "fgap/admissible.hpp"
#include "fgap/charge.hpp"
#include "test_curves.hpp"

using namespace fgap;

namespace {

IVector ivec(std::initializer_list<int> v) {
  IVector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (int x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("closed-form charges and epsilon~", "[charge]") {
  CHECK(closed_form_charges(1, 1, ivec({1})) == ivec({1}));
  CHECK(closed_form_charges(1, 1, ivec({-1})) == ivec({-1}));
  CHECK(closed_form_charges(2, 2, ivec({1, 1})) == ivec({1, -1}));
  CHECK(closed_form_charges(3, 1, ivec({-1})) == ivec({-1, 0, 0}));
  CHECK(closed_form_charges(2, 0, IVector(0)) == ivec({0, 0}));
  CHECK_THROWS_AS(closed_form_charges(2, 1, ivec({1, 1})), Error);
  CHECK(epsilon_tilde(ivec({1, 1}), 3) == ivec({-1, 1, 0}));
  CHECK(epsilon_tilde(ivec({1, 1}), 3, true) == ivec({1, -1, 0}));
}

TEST_CASE("winding charges equal the closed form on the curve matrix", "[charge]") {
  std::mt19937_64 rng(21);
  for (const auto& c : testing_curves::matrix()) {
    const auto pd = period_data(c);
    for (int mask = 0; mask < (1 << pd.m); ++mask) {
      const TorusPoint tp{testing_curves::symbol(pd.m, mask), testing_curves::random_x0(rng, pd.g)};
      const auto p = make_solution(pd, tp);
      const IVector expect = closed_form_charges(pd.g, pd.m, tp.s);
      INFO("g=" << pd.g << " m=" << pd.m << " mask=" << mask);
      CHECK(winding_charges(p) == expect);
      CHECK(winding_direct(p) == expect);
      const RVector totals = winding_totals(p);
      CHECK((totals - expect.cast<double>()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("alternate Riemann-constant bookkeeping flips the sign", "[charge]") {
  const auto pd = period_data(testing_curves::g1_real());
  WindingOptions opt;
  opt.flip_symbol = true;
  for (int s : {1, -1}) {
    const TorusPoint tp{ivec({s}), RVector::Constant(1, 0.2)};
    const auto p = make_solution(pd, tp, CVector::Constant(1, 0.5));
    CHECK(winding_charges(p, opt) == ivec({-s}));
  }
}

TEST_CASE("density is linear in the charges and matches the long-run slope", "[charge]") {
  const auto pd = period_data(testing_curves::g3_m2());
  const IVector a = ivec({1, 0, 0}), b = ivec({0, -1, 0});
  CHECK(std::abs(density(pd, IVector(a + b)) - density(pd, a) - density(pd, b)) < 1e-14);
  CHECK(density(pd, IVector::Zero(3)) == 0.0);

  std::mt19937_64 rng(22);
  const TorusPoint tp{ivec({1, 1}), testing_curves::random_x0(rng, 3)};
  const auto p = make_solution(pd, tp);
  const auto rep = charge_report(p, 200.0);
  CHECK(rep.match);
  CHECK(std::abs(rep.density_direct - rep.density) < 0.01);
  CHECK_THROWS_AS(density_direct(p, 10.0), Error);

  const double d100 = density_deviation(p, rep.density, 100.0), d200 = density_deviation(p, rep.density, 200.0);
  INFO("D(100)=" << d100 << " D(200)=" << d200);
  CHECK(d200 < d100);
  CHECK(d100 / d200 >= 1.2);
  CHECK(d100 / d200 <= 3.0);
}

TEST_CASE("admissibility test on torus images", "[charge]") {
  const auto pd = period_data(testing_curves::g2_mixed());
  const TorusPoint tp{ivec({-1}), (RVector(2) << 0.25, 0.6).finished()};
  const CVector lattice = CVector::Constant(2, 1.0) * 2.0 - pd.B * CVector::Constant(2, 1.0);
  const auto found = check_admissible_image(pd, divisor_image(pd, tp) + lattice);
  REQUIRE(found.has_value());
  CHECK(found->s == tp.s);
  CHECK((found->x0 - tp.x0).cwiseAbs().maxCoeff() < 1e-10);

  CVector off = divisor_image(pd, tp);
  off[0] += cplx{0.0, 1e-3};
  CHECK_FALSE(check_admissible_image(pd, off).has_value());
}

TEST_CASE("interpolation symbols of divisors", "[charge]") {
  const auto c = testing_curves::g1_real();
  const std::vector<SheetPoint> up{make_point(c, cplx{-1.0, 0.0}, 0)};
  const std::vector<SheetPoint> down{make_point(c, cplx{-1.0, 0.0}, 1)};
  const IVector su = divisor_symbols(c, up), sd = divisor_symbols(c, down);
  CHECK(su.size() == 1);
  CHECK(su[0] == -sd[0]);

  const auto c2 = testing_curves::g2_real();
  const std::vector<SheetPoint> dup{make_point(c2, cplx{-0.7, 0.0}, 0), make_point(c2, cplx{-0.7, 0.0}, 1)};
  CHECK_THROWS_AS(divisor_symbols(c2, dup), AdmissibilityError);
}

TEST_CASE("admissible scans: symbols coincide", "[charge]") {
  SECTION("genus 1") {
    const auto c = testing_curves::g1_real();
    const auto pd = period_data(c);
    const auto pts = admissible_scan_g1(c, pd);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].torus.s[0] == -pts[1].torus.s[0]);
    for (const auto& a : pts) {
      CHECK(a.coincide);
      CHECK(a.s_prime == a.torus.s);
      CHECK(symbols_coincide_check(c, pd, a.divisor));
    }
  }
  SECTION("genus 2") {
    const auto c = testing_curves::g2_real();
    const auto pd = period_data(c);
    const auto pts = admissible_scan_g2(c, pd);
    REQUIRE(pts.size() >= 2);
    for (const auto& a : pts) CHECK(a.coincide);
  }
  SECTION("a non-admissible divisor") {
    const auto c = testing_curves::g1_real();
    const auto pd = period_data(c);
    const std::vector<SheetPoint> d{make_point(c, cplx{1.0, 0.5}, 0)};
    CHECK_FALSE(check_admissible(c, pd, d).has_value());
    CHECK_THROWS_AS(symbols_coincide_check(c, pd, d), AdmissibilityError);
  }
}
