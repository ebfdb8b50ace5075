#include <doctest.h>

#include <cmath>

#include "fracwave/gronwall.hpp"
#include "oracles.hpp"

using namespace fracwave;

namespace {
GronwallParams make(double p, double h) {
  GronwallParams g;
  g.p = p;
  g.H = h;
  return g;
}
}  // namespace

TEST_CASE("frozen recursion values at p = 2") {
  const GronwallParams g = make(2.0, 0.0);
  CHECK(g.window_constant() == 5.0);
  const GronwallTrace t = build_trace(g, 30);
  CHECK(t.M[0] == doctest::Approx(oracle::kGronwallM0).epsilon(1e-9));
  CHECK(t.T[1] == doctest::Approx(oracle::kGronwallT1).epsilon(1e-9));
  CHECK(extinction_time(g) == doctest::Approx(oracle::kGronwallExtinction).epsilon(1e-9));
  CHECK(t.T.back() < extinction_time(g));
}

TEST_CASE("window condition holds with equality") {
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (double h : {0.0, 1.0}) {
      const GronwallParams g = make(p, h);
      const int k_max = p == 1.0 ? 10 : 30;
      const GronwallTrace t = build_trace(g, k_max);
      for (int k = 1; k <= k_max; ++k) CHECK(std::abs(window_condition(t, g, k) - 0.5) <= 1e-12);
      for (int k = 1; k <= k_max; ++k) CHECK(t.dT[static_cast<std::size_t>(k)] > 0.0);
    }
}

TEST_CASE("recursion with a source approaches its fixed point") {
  const GronwallParams g = make(2.0, 1.0);
  const GronwallTrace t = build_trace(g, 60);
  const double source = 4.0 * std::sqrt(1.0 * (5.0 + 1.0));
  CHECK(t.M.back() == doctest::Approx(2.0 * source).epsilon(1e-9));
}

TEST_CASE("ode against its closed form") {
  // H = 0, p = 2: sqrt(Y) = sqrt(Y0) - kappa t / 2 until extinction at 2 sqrt(Y0) / kappa
  GronwallParams g = make(2.0, 0.0);
  g.Y0 = 4.0;
  const OdeSolution sol(g, 10.0);
  for (double t : {0.5, 1.7, 3.2}) CHECK(sol.value(t) == doctest::Approx(std::pow(2.0 - t / 2, 2)).epsilon(1e-8));
  CHECK(sol.value(5.0) == 0.0);
  // int sqrt(Y) up to extinction = int_0^4 (2 - t/2) dt = 4
  CHECK(sol.root_integral(9.0) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("ode with source settles at the equilibrium") {
  const GronwallParams g = make(2.0, 1.0);
  const OdeSolution sol(g, 200.0);
  CHECK(sol.value(150.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("decay bound dominates the ode") {
  for (double p : {1.5, 2.0, 3.0})
    for (double h : {0.0, 1.0}) {
      const GronwallVerification v = verify_against_ode(make(p, h), 30, 100);
      CHECK(v.samples == 100);
      CHECK(v.violations == 0);
      CHECK(v.w_below_m);
      CHECK(v.passed);
    }
  const GronwallVerification v = verify_against_ode(make(2.0, 0.0), 30, 100);
  CHECK(v.exact_extinction == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(v.extinction_bound == doctest::Approx(23.852).epsilon(1e-3 / 23.852));
}

TEST_CASE("linear case") {
  const GronwallVerification v = verify_against_ode(make(1.0, 0.0), 8, 50);
  CHECK(v.violations == 0);
  CHECK(v.exact_extinction < 0.0);
}

TEST_CASE("extinction scales with Y0^((p-1)/p)") {
  GronwallParams a = make(2.0, 0.0), b = make(2.0, 0.0);
  b.Y0 = 16.0;
  CHECK(extinction_time(b) / extinction_time(a) == doctest::Approx(4.0));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(build_trace(make(0.5, 0.0), 3));
  CHECK_THROWS(build_trace(make(2.0, -1.0), 3));
  GronwallParams g = make(2.0, 0.0);
  g.lambda = 2.0;
  CHECK_THROWS(build_trace(g, 3));
  CHECK_THROWS(extinction_time(make(2.0, 1.0)));
  CHECK_THROWS(extinction_time(make(1.0, 0.0)));
  const GronwallTrace t = build_trace(make(2.0, 0.0), 3);
  CHECK_THROWS(decay_bound(t, make(2.0, 0.0), t.T.back() * 1.01));
  CHECK_THROWS(window_condition(t, make(2.0, 0.0), 4));
}
