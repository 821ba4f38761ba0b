#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "s2fl/rng.hpp"
#include "s2fl/surrogates.hpp"

using namespace s2fl;

namespace {

constexpr int kAnchors = 1000;
constexpr int kPoints = 1000;

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("sqrt_product_upper hand values") {
  CHECK(sqrt_product_upper(1, 1)(1, 1) == doctest::Approx(1.0));
  CHECK(sqrt_product_upper(1, 1)(4, 1) == doctest::Approx(2.5));
  CHECK(sqrt_product_upper(4, 9)(4, 9) == doctest::Approx(6.0));
}

TEST_CASE("bilinear bounds hand values") {
  CHECK(bilinear_upper(1, 1)(1, 1) == doctest::Approx(1.0));
  CHECK(bilinear_upper(1, 1)(2, 0.5) == doctest::Approx(2.125));
  CHECK(bilinear_square_upper(1, 1)(1, 2) == doctest::Approx(8.5));
  CHECK(bilinear_lower(1, 1)(1, 1) == doctest::Approx(1.0));
  CHECK(bilinear_lower(1, 1)(4, 2) == doctest::Approx(3.5));
  CHECK(bilinear_lower(1, 1)(0.25, 1) == doctest::Approx(0.0));
}

TEST_CASE("ratio_upper hand values") {
  CHECK(ratio_upper(1, 1)(1, 1) == doctest::Approx(1.0));
  CHECK(ratio_upper(1, 1)(2, 1) == doctest::Approx(2.25));
}

TEST_CASE("fdma_rate_lower hand value and coefficients") {
  const auto s = fdma_rate_lower(1, 1, 1, 1);
  CHECK(s.lambda == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  CHECK(s.mu == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.upsilon == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(s(1, 2) == doctest::Approx(std::log(2.0) + 0.25).epsilon(1e-12));
  CHECK(s(1, 2) <= std::log(3.0));
}

TEST_CASE("tangency at 1000 random anchors per kind") {
  Rng rng(101);
  for (int i = 0; i < kAnchors; ++i) {
    const double x = rng.uniform(1e-3, 1e3), y = rng.uniform(1e-3, 1e3);
    CHECK(close_rel(sqrt_product_upper(x, y)(x, y), std::sqrt(x * y)));
    CHECK(close_rel(bilinear_upper(x, y)(x, y), x * y));
    CHECK(close_rel(bilinear_square_upper(x, y)(x, y), x * y * y));
    CHECK(close_rel(bilinear_lower(x, y)(x, y), x * y));
    CHECK(close_rel(ratio_upper(x, y)(x, y), x / y));

    const double h = rng.uniform(1e-6, 1e-2), n0 = rng.uniform(1e-15, 1e-12);
    const auto fr = fdma_rate_lower(x * 1e3, y * 1e-4, h, n0);
    CHECK(close_rel(fr(x * 1e3, y * 1e-4), fr.exact(x * 1e3, y * 1e-4)));

    std::vector<double> p{y * 1e-4, y * 5e-5, y * 2e-5};
    std::vector<double> g{h, h * 0.5, h * 0.1};
    const auto nr = noma_rate_lower(p, x, 0, g, n0, 5e5);
    CHECK(close_rel(nr(p, x), nr.exact(p, x)));
  }
}

TEST_CASE("bound direction at 1000 random points per kind") {
  Rng rng(202);
  const auto up = [&](double surrogate, double exact) {
    CHECK(surrogate >= exact - 1e-9 * std::max(1.0, std::abs(exact)));
  };
  const auto lo = [&](double surrogate, double exact) {
    CHECK(surrogate <= exact + 1e-9 * std::max(1.0, std::abs(exact)));
  };
  const auto s1 = sqrt_product_upper(2.0, 0.5);
  const auto s2 = bilinear_upper(3.0, 0.7);
  const auto s3 = bilinear_square_upper(0.4, 1.6);
  const auto s4 = bilinear_lower(1.2, 2.5);
  const auto s5 = ratio_upper(0.8, 0.6);
  const auto s6 = fdma_rate_lower(1e5, 5e-3, 1e-4, 1e-14);
  std::vector<double> pbar{5e-3, 3e-3, 1e-3};
  std::vector<double> gains{2e-4, 1e-4, 5e-5};
  const auto s7 = noma_rate_lower(pbar, 0.7, 0, gains, 1e-14, 5e5);

  for (int i = 0; i < kPoints; ++i) {
    const double x = rng.uniform(1e-3, 1e3), y = rng.uniform(1e-3, 1e3);
    up(s1(x, y), std::sqrt(x * y));
    up(s2(x, y), x * y);
    up(s3(x, y), x * y * y);
    lo(s4(x, y), x * y);
    up(s5(x, y), x / y);

    const double b = rng.uniform(1e3, 1e6), p = rng.uniform(1e-5, 1e-1);
    lo(s6(b, p), s6.exact(b, p));

    std::vector<double> pt{rng.uniform(1e-5, 1e-1), rng.uniform(1e-5, 1e-1),
                           rng.uniform(1e-5, 1e-1)};
    const double tc = rng.uniform(1e-3, 1e2);
    lo(s7(pt, tc), s7.exact(pt, tc));
  }
}

TEST_CASE("curvature: upper kinds convex, lower kinds concave on segments") {
  Rng rng(303);
  const auto s2 = bilinear_upper(1.5, 0.7);
  const auto s4 = bilinear_lower(1.2, 2.5);
  const auto s5 = ratio_upper(0.8, 0.6);
  const auto s6 = fdma_rate_lower(1e5, 5e-3, 1e-4, 1e-14);
  for (int i = 0; i < 500; ++i) {
    const double x1 = rng.uniform(1e-2, 1e2), y1 = rng.uniform(1e-2, 1e2);
    const double x2 = rng.uniform(1e-2, 1e2), y2 = rng.uniform(1e-2, 1e2);
    const double xm = 0.5 * (x1 + x2), ym = 0.5 * (y1 + y2);
    CHECK(s2(xm, ym) <= 0.5 * (s2(x1, y1) + s2(x2, y2)) + 1e-9);
    CHECK(s4(xm, ym) >= 0.5 * (s4(x1, y1) + s4(x2, y2)) - 1e-9);
    CHECK(s5(xm, ym) <= 0.5 * (s5(x1, y1) + s5(x2, y2)) + 1e-9);

    const double b1 = rng.uniform(1e3, 1e6), p1 = rng.uniform(1e-5, 1e-1);
    const double b2 = rng.uniform(1e3, 1e6), p2 = rng.uniform(1e-5, 1e-1);
    const double mid = s6(0.5 * (b1 + b2), 0.5 * (p1 + p2));
    CHECK(mid >= 0.5 * (s6(b1, p1) + s6(b2, p2)) - 1e-9 * std::max(1.0, std::abs(mid)));
  }
}

TEST_CASE("NOMA surrogate single-user degeneracy") {
  // with no interferers the tangency identity lambda - upsilon/tcbar = exact holds
  std::vector<double> p{4e-3};
  std::vector<double> g{1.3e-4};
  const auto s = noma_rate_lower(p, 0.9, 0, g, 1e-14, 5e5);
  CHECK(s.lambda - s.upsilon / 0.9 == doctest::Approx(s.exact(p, 0.9)).epsilon(1e-12));
}

TEST_CASE("anchors are clamped away from zero") {
  CHECK(clamp_anchor(0.0) == doctest::Approx(kAnchorFloor));
  CHECK(std::isfinite(bilinear_upper(0.0, 1.0)(1.0, 1.0)));
  CHECK(std::isfinite(ratio_upper(1.0, 0.0)(1.0, 1.0)));
}
