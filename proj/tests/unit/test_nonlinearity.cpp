#include <doctest.h>

#include <cmath>

#include "fracwave/nonlinearity.hpp"

using namespace fracwave;

namespace {
double simpson(const NonlinearitySpec& f, double b) {
  const int n = 2000;
  const double h = b / n;
  double s = f.value(0.0) + f.value(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f.value(i * h);
  return s * h / 3.0;
}
}  // namespace

TEST_CASE("values") {
  const auto q = NonlinearitySpec::quintic(-2.0, 0.5);
  CHECK(q.value(2.0) == doctest::Approx(32.0 - 16.0 + 1.0));
  CHECK(q.derivative(2.0) == doctest::Approx(80.0 - 24.0 + 0.5));
  const auto s = NonlinearitySpec::sin5();
  CHECK(s.value(0.0) == 0.0);
  CHECK(s.value(1.2) == doctest::Approx(std::sin(std::pow(1.2, 5)) / 1.2));
  CHECK(NonlinearitySpec::zero().value(3.0) == 0.0);
}

TEST_CASE("primitive integrates the value") {
  for (const auto& f : {NonlinearitySpec::quintic(-2.0, 0.5), NonlinearitySpec::sin5()})
    for (double b : {-1.3, 0.4, 1.1, 1.6})
      CHECK(f.primitive(b) == doctest::Approx(simpson(f, b)).epsilon(1e-8));
}

TEST_CASE("derivative matches finite differences") {
  for (const auto& f : {NonlinearitySpec::quintic(1.0, -3.0), NonlinearitySpec::sin5()})
    for (double u : {-1.4, -0.3, 0.2, 0.9, 1.3}) {
      const double h = 1e-6;
      CHECK(f.derivative(u) == doctest::Approx((f.value(u + h) - f.value(u - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("sin5 derivative is not bounded below") {
  const auto s = NonlinearitySpec::sin5();
  double lowest = 0.0;
  for (double u = 0.0; u < 3.0; u += 1e-4) lowest = std::min(lowest, s.derivative(u));
  CHECK(lowest < -100.0);
}

TEST_CASE("dissipativity bound holds on a dense sample") {
  for (const auto& f : {NonlinearitySpec::quintic(-2.0, 0.5), NonlinearitySpec::quintic(), NonlinearitySpec::sin5()}) {
    const double m = f.dissipativity_bound();
    for (double u = -5.0; u <= 5.0; u += 1e-3) CHECK(f.value(u) * u >= -m - 1e-12);
  }
  // f(s) s = w^3 - 2 w^2 with w = s^2: minimum at w = 4/3
  CHECK(NonlinearitySpec::quintic(-2.0, 0.0).dissipativity_bound() == doctest::Approx(32.0 / 27.0));
}

TEST_CASE("primitive lower constant") {
  const double lambda0 = 1.0;
  for (const auto& f : {NonlinearitySpec::quintic(-2.0, 0.5), NonlinearitySpec::sin5(), NonlinearitySpec::zero()}) {
    const double c = f.primitive_lower_constant(lambda0);
    CHECK(c >= 0.0);
    for (double u = -6.0; u <= 6.0; u += 1e-3) CHECK(f.primitive(u) >= -lambda0 / 8 * u * u - c - 1e-12);
  }
  CHECK(NonlinearitySpec::quintic().primitive_lower_constant(1.0) == 0.0);
}

TEST_CASE("growth constant dominates the derivative") {
  for (const auto& f : {NonlinearitySpec::quintic(-2.0, 0.5), NonlinearitySpec::sin5()}) {
    const double c = f.growth_constant();
    for (double u = -4.0; u <= 4.0; u += 1e-3) CHECK(std::abs(f.derivative(u)) <= c * (1 + std::pow(u, 4)));
  }
}

TEST_CASE("names round trip") {
  CHECK(parse_nonlinearity_kind(NonlinearitySpec::sin5().name()) == NonlinearityKind::sin5);
  CHECK(parse_nonlinearity_kind("quintic") == NonlinearityKind::quintic);
  CHECK_THROWS(parse_nonlinearity_kind("cubic"));
}
