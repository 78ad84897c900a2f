#include <catch_amalgamated.hpp>

#include "fgap/deformation.hpp"
#include "test_curves.hpp"

using namespace fgap;

TEST_CASE("k = 1 reproduces the base curve", "[deformation]") {
  const auto c = testing_curves::g2_real();
  const TorusPoint tp{IVector::Constant(2, 1), RVector::Constant(2, 0.4)};
  const auto rec = sweep_point(c, tp, 1.0);
  REQUIRE(rec.ok);
  CHECK((rec.B - period_data(c).B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec.charges == closed_form_charges(2, 2, tp.s));
}

TEST_CASE("block norms", "[deformation]") {
  CMatrix B(3, 3);
  B << cplx{0.0, 1.0}, 0.1, 0.0, 0.1, cplx{0.0, 2.0}, cplx{0.0, 0.2}, 0.0, cplx{0.0, 0.2}, cplx{-0.5, 1.0};
  CHECK(offdiag_norm(B, 2) > 0.0);
  CHECK(diag_re_residual(B, 2) < 1e-15);
  CMatrix D = B;
  D(0, 1) = D(1, 0) = 0.0;
  D(1, 2) = D(2, 1) = 0.0;
  CHECK(offdiag_norm(D, 2) == 0.0);
}

TEST_CASE("sweeps split off the elliptic blocks", "[deformation]") {
  const std::vector<double> ks{1.0, 10.0, 100.0, 500.0, 1000.0};
  SECTION("two real pairs") {
    const auto c = testing_curves::g2_real();
    const TorusPoint tp{IVector::Constant(2, 1), RVector::Constant(2, 0.3)};
    const auto recs = sweep(c, tp, ks);
    REQUIRE(recs.size() == ks.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].k == ks[i]);
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].offdiag_norm < recs[i - 1].offdiag_norm);
    const auto rep = limit_check(recs, 2);
    for (const auto& f : rep.failures) UNSCOPED_INFO(f);
    CHECK(rep.passed);
    CHECK(rep.charges_constant);
    const auto comps = elliptic_components(c);
    REQUIRE(rep.tau_extrapolated.size() == 2);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(rep.tau_extrapolated[j] - elliptic_tau(comps[j])) < 0.05);
  }
  SECTION("real pair plus complex pair") {
    const auto c = testing_curves::g2_mixed();
    const TorusPoint tp{IVector::Constant(1, -1), RVector::Constant(2, 0.1)};
    const auto rep = limit_check(sweep(c, tp, ks), 1);
    for (const auto& f : rep.failures) UNSCOPED_INFO(f);
    CHECK(rep.passed);
    REQUIRE(rep.tau_extrapolated.size() == 1);
    CHECK(std::abs(rep.tau_extrapolated[0] - elliptic_tau(elliptic_components(c)[0])) < 0.05);
  }
  SECTION("genus 1 is unchanged") {
    const auto c = testing_curves::g1_real();
    const auto recs = sweep(c, TorusPoint{IVector::Constant(1, 1), RVector::Zero(1)}, {1.0, 1000.0});
    REQUIRE(recs.size() == 2);
    CHECK(std::abs(recs[0].B(0, 0) - recs[1].B(0, 0)) < 1e-12);
  }
  SECTION("failures are recorded per k") {
    const auto c = testing_curves::g2_real();
    const TorusPoint tp{IVector::Constant(2, 1), RVector::Zero(2)};
    const auto bad = sweep_point(c, tp, 0.5);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.error.empty());
    CHECK_FALSE(limit_check({bad, sweep_point(c, tp, 2.0)}, 2).passed);
    CHECK_THROWS_AS(sweep(c, tp, {2.0, 1.0}), Error);
  }
}

TEST_CASE("elliptic tau agrees with the period engine", "[deformation]") {
  for (const auto& c : {testing_curves::g1_real(), SpectralCurve({{-5.0, -0.2}}, {}), SpectralCurve({{-1.1, -1.0}}, {})}) {
    const cplx engine = period_data(c).B(0, 0);
    CHECK(std::abs(elliptic_tau(c) - engine) < 1e-8);
  }
  CHECK(std::abs(elliptic_tau(testing_curves::g1_real()) - cplx{0.0, 1.27926157117101}) < 1e-10);
}

TEST_CASE("Richardson extrapolation removes the 1/k term", "[deformation]") {
  auto f = [](double k) { return cplx{0.3, 2.0} + cplx{1.5, -0.7} / k; };
  CHECK(std::abs(richardson(100.0, f(100.0), 1000.0, f(1000.0)) - cplx{0.3, 2.0}) < 1e-12);
}
