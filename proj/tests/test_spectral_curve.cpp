#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fgap/spectral_curve.hpp"
#include "test_curves.hpp"

using namespace fgap;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("validate accepts and rejects per the reality conditions", "[spectral_curve]") {
  CHECK(validate(SpectralCurve({{-2.0, -0.5}}, {})).valid);
  CHECK(validate(SpectralCurve({{-3.0, -1.0}}, {cplx{-1.0, 2.0}})).valid);

  const auto bad = validate(SpectralCurve({{-2.0, 0.5}}, {}));
  CHECK_FALSE(bad.valid);
  REQUIRE(bad.violations.size() == 1);
  CHECK_THAT(bad.violations[0], ContainsSubstring("positive real branch point"));

  SECTION("each violated condition is listed") {
    const auto rep = validate(SpectralCurve({{-0.5, -2.0}, {-1.0, 0.0}}, {cplx{1.0, 0.0}}));
    CHECK_FALSE(rep.valid);
    CHECK(rep.violations.size() >= 4);
  }
  SECTION("coincident branch points") {
    CHECK_FALSE(validate(SpectralCurve({{-2.0, -1.0}, {-3.0, -2.0}}, {})).valid);
    CHECK_FALSE(validate(SpectralCurve({}, {cplx{-1.0, 1.0}, cplx{-1.0, -1.0}})).valid);
  }
  SECTION("genus zero") { CHECK_FALSE(validate(SpectralCurve({}, {})).valid); }
  SECTION("warnings") {
    const auto wide = validate(SpectralCurve({{-2e9, -1e9}, {-2e-1, -1e-1}}, {}));
    CHECK(wide.valid);
    CHECK(wide.warnings.size() >= 1);
  }
}

TEST_CASE("complex pairs are stored in the upper half-plane", "[spectral_curve]") {
  const SpectralCurve c({}, {cplx{-1.0, -1.0}});
  REQUIRE(c.complex_pairs().size() == 1);
  CHECK(c.complex_pairs()[0] == cplx{-1.0, 1.0});
}

TEST_CASE("branch points are closed under conjugation", "[spectral_curve]") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 3, m = trial % (g + 1);
    const auto c = testing_curves::random_curve(rng, g, m);
    REQUIRE(validate(c).valid);
    auto bp = c.branch_points();
    auto conj = bp;
    for (auto& z : conj) z = std::conj(z);
    auto key = [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); };
    std::sort(bp.begin(), bp.end(), key);
    std::sort(conj.begin(), conj.end(), key);
    CHECK(bp == conj);
  }
}

TEST_CASE("mu_sheet0 squares to the curve polynomial and is positive at +infinity", "[spectral_curve]") {
  const auto c = testing_curves::g3_m1();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const cplx z{u(rng), u(rng)};
    const cplx mu = c.mu_sheet0(z);
    CHECK(std::abs(mu * mu - c.mu_squared(z)) <= 1e-12 * std::abs(c.mu_squared(z)));
  }
  const double x = 1e4;
  const cplx ratio = c.mu_sheet0(cplx{x, 1e-9}) / std::pow(x, 3.5);
  CHECK(std::abs(ratio - 1.0) < 1e-2);
  CHECK(c.mu_sheet0(x).real() > 0.0);
}

TEST_CASE("scaled_curve follows the exponents of the family", "[spectral_curve]") {
  const SpectralCurve two({{-3.0, -2.5}, {-1.0, -0.5}}, {});
  const auto s10 = scaled_curve(two, 10.0);
  CHECK(s10.real_pairs()[0].lower == -3.0);
  CHECK(s10.real_pairs()[0].upper == -2.5);
  CHECK(s10.real_pairs()[1].lower == Catch::Approx(-10.0));
  CHECK(s10.real_pairs()[1].upper == Catch::Approx(-5.0));

  const auto mixed = scaled_curve(testing_curves::g2_mixed(), 4.0);
  CHECK(mixed.real_pairs()[0].lower == -3.0);
  CHECK(mixed.real_pairs()[0].upper == -1.0);
  CHECK(std::abs(mixed.complex_pairs()[0] - cplx{-4.0, 8.0}) < 1e-14);

  SECTION("k = 1 is the identity") {
    for (const auto& c : testing_curves::matrix()) {
      const auto s = scaled_curve(c, 1.0);
      CHECK(s.branch_points() == c.branch_points());
    }
  }
  SECTION("semigroup property") {
    const auto c = testing_curves::g3_m3();
    const auto a = scaled_curve(scaled_curve(c, 2.0), 3.5);
    const auto b = scaled_curve(c, 7.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(a.real_pairs()[j].lower == Catch::Approx(b.real_pairs()[j].lower).epsilon(1e-14));
      CHECK(a.real_pairs()[j].upper == Catch::Approx(b.real_pairs()[j].upper).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(scaled_curve(two, 0.5), CurveError);
}

TEST_CASE("elliptic_components splits off the real pairs", "[spectral_curve]") {
  const auto one = elliptic_components(testing_curves::g1_real());
  REQUIRE(one.size() == 1);
  CHECK(one[0].real_pairs()[0].lower == -2.0);
  CHECK(one[0].real_pairs()[0].upper == -0.5);
  CHECK(elliptic_components(testing_curves::g2_real()).size() == 2);
  const auto m0 = elliptic_components(testing_curves::g2_complex());
  REQUIRE(m0.size() == 1);
  CHECK(m0[0].branch_points() == testing_curves::g2_complex().branch_points());
  const auto mixed = elliptic_components(testing_curves::g3_m1());
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[1].genus() == 2);
}

TEST_CASE("continue_mu has square-root monodromy", "[spectral_curve]") {
  const auto c = testing_curves::g1_real();
  const SheetPoint start = make_point(c, cplx{-1.25, 0.4}, 0);

  SECTION("constant path") {
    const std::vector<cplx> path{start.lambda};
    const auto end = continue_mu(c, path, start);
    CHECK(end.mu == start.mu);
  }
  auto circle = [](cplx centre, double r, cplx from, int n) {
    std::vector<cplx> pts{from};
    const double t0 = std::arg(from - centre);
    for (int i = 1; i <= n; ++i) pts.push_back(centre + r * std::exp(I * (t0 + 2.0 * pi * i / n)));
    pts.back() = from;
    return pts;
  };
  SECTION("loop around one branch point flips the sheet") {
    const SheetPoint near = make_point(c, cplx{-0.5, 0.3}, 0);
    const auto end = continue_mu(c, circle(cplx{-0.5, 0.0}, 0.3, near.lambda, 64), near);
    CHECK(std::abs(end.mu + near.mu) < 1e-12 * std::abs(near.mu));
    CHECK(end.sheet != near.sheet);
  }
  SECTION("loop around two branch points restores mu") {
    const auto path = circle(cplx{-1.25, 0.0}, 0.4, start.lambda, 64);
    const auto end = continue_mu(c, path, start);
    CHECK(std::abs(end.mu - start.mu) < 1e-10 * std::abs(start.mu));
    CHECK(end.sheet == start.sheet);
  }
  SECTION("odd and even counts on a genus-3 curve") {
    const auto c3 = testing_curves::g3_m3();
    const SheetPoint s3 = make_point(c3, cplx{-2.5, 0.6}, 1);
    const auto big = continue_mu(c3, circle(cplx{-2.5, 0.0}, 0.6, s3.lambda, 128), s3);  // encloses -3 and -2
    CHECK(std::abs(big.mu - s3.mu) < 1e-10 * std::abs(s3.mu));
    const auto odd = continue_mu(c3, circle(cplx{-2.0, 0.0}, std::abs(s3.lambda + 2.0), s3.lambda, 128), s3);
    CHECK(std::abs(odd.mu + s3.mu) < 1e-10 * std::abs(s3.mu));
  }
  SECTION("continuation does not depend on the subdivision") {
    const std::vector<cplx> coarse{start.lambda, cplx{2.0, 1.0}, cplx{2.0, -1.0}, cplx{-3.0, -1.0}};
    std::vector<cplx> fine;
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
      for (int k = 0; k < 10; ++k) fine.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * (k / 10.0));
    }
    fine.push_back(coarse.back());
    CHECK(std::abs(continue_mu(c, coarse, start).mu - continue_mu(c, fine, start).mu) < 1e-12);
  }
  SECTION("path too close to a branch point") {
    const std::vector<cplx> path{start.lambda, cplx{-0.5, 0.0}};
    CHECK_THROWS_AS(continue_mu(c, path, start), PathError);
  }
}
