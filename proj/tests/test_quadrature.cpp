#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slitsim/quadrature.hpp"

using slitsim::integrate_adaptive;

TEST_CASE("Kronrod rule integrates polynomials up to degree 22 on one panel") {
  for (int deg = 0; deg <= 22; ++deg) {
    auto f = [deg](double x) { return std::pow(x, deg); };
    // max_subdivisions = 1: no refinement allowed, tolerance loose.
    const auto r = integrate_adaptive<double>(f, {0.0, 1.0}, 1.0, 1);
    CHECK(r.value == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-14));
  }
}

TEST_CASE("adaptive refinement reaches tolerance on smooth and peaked integrands") {
  auto e = [](double x) { return std::exp(x); };
  auto r = integrate_adaptive<double>(e, {0.0, 1.0}, 1e-13, 100);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-14));

  // Lorentzian of width 1e-3 centred inside a long interval.
  const double w = 1e-3;
  auto lorentz = [w](double x) { return w / (w * w + (x - 0.3) * (x - 0.3)); };
  r = integrate_adaptive<double>(lorentz, {-50.0, 0.3, 50.0}, 1e-11, 2000);
  const double exact = std::atan(49.7 / w) + std::atan(50.3 / w);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-11));
  CHECK(r.error <= 1e-11);
}

TEST_CASE("long double instantiation") {
  auto f = [](long double x) { return 1.0L / (1.0L + x * x); };
  const auto r = integrate_adaptive<long double>(f, {0.0L, 1.0L}, 1e-17L, 200);
  CHECK(std::abs(r.value - std::numbers::pi_v<long double> / 4) < 1e-17L);
}

TEST_CASE("running out of subdivisions throws ToleranceError") {
  auto spike = [](double x) { return 1e-6 / (1e-12 + x * x); };
  CHECK_THROWS_AS(integrate_adaptive<double>(spike, {-1.0, 1.0}, 1e-12, 3), slitsim::ToleranceError);
}

TEST_CASE("breakpoints must be ascending") {
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(integrate_adaptive<double>(f, {1.0, 0.0}, 1e-10, 10), slitsim::ConfigError);
  CHECK_THROWS_AS(integrate_adaptive<double>(f, {1.0}, 1e-10, 10), slitsim::ConfigError);
}
