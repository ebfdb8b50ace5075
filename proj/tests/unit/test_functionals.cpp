#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fracwave/functionals.hpp"
#include "oracles.hpp"

using namespace fracwave;

namespace {
State random_state(const BoxDomain& d, double scale, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  State s{SpectralField(d), SpectralField(d), 0.0};
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    s.u[i] = scale * n01(rng) / std::pow(k, 1.5);
    s.v[i] = scale * n01(rng) / k;
  }
  return s;
}

Physics quintic_physics() {
  Physics p;
  p.nonlinearity = NonlinearitySpec::quintic(-2.0, 0.0);
  return p;
}

Ledger synthetic_ledger(double value, double step, double end) {
  Ledger l;
  l.settings.centers = {{1.0, 0, 0}, {2.0, 0, 0}};
  for (double t = 0.0; t <= end + 1e-12; t += step) {
    LedgerRow r;
    r.t = t;
    r.centers.resize(2);
    r.centers[0].h32_sq = value;
    r.centers[1].h32_sq = value * t;
    r.centers[0].l12_ball_fourth = 0.0;
    r.centers[1].l12_ball_fourth = 1.0;
    l.rows.push_back(r);
  }
  return l;
}
}  // namespace

TEST_CASE("truncated cube") {
  CHECK(psi_n(3.0, 2.0) == doctest::Approx(20.0));
  CHECK(psi_n(-3.0, 2.0) == doctest::Approx(-20.0));
  CHECK(psi_n(1.5, 2.0) == doctest::Approx(3.375));
  CHECK(psi_n(7.0, kNoTruncation) == doctest::Approx(343.0));
  for (double r : {-4.0, -2.0, -0.5, 0.3, 2.0, 5.0}) {
    const double h = 1e-6;
    CHECK(psi_n_derivative(r, 2.0) == doctest::Approx((psi_n(r + h, 2.0) - psi_n(r - h, 2.0)) / (2 * h)).epsilon(1e-6));
    CHECK(Psi_n_derivative(r, 2.0) == doctest::Approx((Psi_n(r + h, 2.0) - Psi_n(r - h, 2.0)) / (2 * h)).epsilon(1e-6));
    CHECK(std::pow(Psi_n_derivative(r, 2.0), 2) == doctest::Approx(psi_n_derivative(r, 2.0)));
  }
}

TEST_CASE("delta limits") {
  Physics p;
  p.gamma = 0.4;
  p.lambda0 = 2.0;
  CHECK(max_delta(p) == doctest::Approx(0.04));
  CHECK(default_delta(p) == doctest::Approx(0.02));
  p.gamma = 50.0;
  p.lambda0 = 50.0;
  CHECK(max_delta(p) == 0.5);
}

TEST_CASE("weight mass bound dominates the integral of phi^2") {
  const BoxDomain wide{1, 1000.0, 8, 2};
  for (double eps : {0.05, 0.1, 0.2}) {
    const double bound = weight_mass_bound(wide, eps);
    const double exact = oracle::weight_square_integral(eps);
    CHECK(bound >= exact);
    CHECK(bound <= 1.5 * exact);
  }
  CHECK(weight_mass_bound(BoxDomain{1, 3.0, 8, 2}, 0.1) == doctest::Approx(3.0));
  CHECK(weight_mass_bound(BoxDomain{1, 3.0, 8, 2}, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("modified energy controls half the weighted energy norm") {
  const BoxDomain d{1, 20.0, 96, 3};
  Physics p = quintic_physics();
  p.source = random_state(d, 0.5, 2).u;
  const WeightSpec w = WeightSpec::smooth(0.1, {7.0, 0, 0});
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const State s = random_state(d, 0.5 * seed, seed);
    const double e = modified_energy(s, w, default_delta(p), p);
    const double norm = energy_norm(s.u, s.v, w, p.lambda0).total();
    CHECK(e >= 0.5 * norm);
  }
  CHECK_THROWS(modified_energy(random_state(d, 1.0, 1), w, 0.2, p));
  CHECK_THROWS(modified_energy(random_state(d, 1.0, 1), w, -0.01, p));
}

TEST_CASE("modified energy of the zero state is the constant term") {
  const BoxDomain d{1, 20.0, 32, 3};
  const Physics p = quintic_physics();
  const State zero{SpectralField(d), SpectralField(d), 0.0};
  const WeightSpec w = WeightSpec::smooth(0.1, {5.0, 0, 0});
  CHECK(modified_energy(zero, w, 0.05, p) == doctest::Approx(modified_energy_constant(d, p, 0.1)));
  CHECK(modified_energy_constant(d, p, 0.1) >= 8.0 / p.lambda0);
}

TEST_CASE("lyapunov functional with large truncation equals the cubic one") {
  const BoxDomain d{1, 20.0, 64, 3};
  const Physics p = quintic_physics();
  const State s = random_state(d, 1.0, 4);
  const WeightSpec w = WeightSpec::smooth(0.1, {10.0, 0, 0});
  CHECK(lyapunov_psi(s, w, 1e6, p) == doctest::Approx(lyapunov_psi(s, w, kNoTruncation, p)));
  CHECK(std::abs(lyapunov_psi(s, w, 0.01, p)) < std::abs(lyapunov_psi(s, w, kNoTruncation, p)));
  CHECK_THROWS(lyapunov_psi(s, w, 0.0, p));
}

TEST_CASE("ledger evaluation") {
  const BoxDomain d{1, 20.0, 64, 3};
  const Physics p = quintic_physics();
  LedgerSettings settings;
  settings.centers = {{5.0, 0, 0}, {10.0, 0, 0}};
  LedgerEvaluator eval(d, p, settings);
  const State s = random_state(d, 1.0, 6);
  const LedgerRow row = eval.evaluate(s);
  REQUIRE(row.centers.size() == 2);
  const double norm = energy_norm(s.u, s.v, WeightSpec::smooth(0.1, settings.centers[1]), p.lambda0).total();
  CHECK(row.centers[1].energy_norm_sq == doctest::Approx(norm));
  CHECK(row.centers[1].modified_energy ==
        doctest::Approx(modified_energy(s, WeightSpec::smooth(0.1, settings.centers[1]), settings.delta, p)));
  CHECK(row.sup(&CenterQuantities::energy_norm_sq) >= row.centers[0].energy_norm_sq);
  CHECK(row.centers[0].lyapunov_truncated == doctest::Approx(row.centers[0].lyapunov_cubic));
  CHECK(row.energy.total() == doctest::Approx(unweighted_energy(s, p).total()));
}

TEST_CASE("ledger columns, manifest and csv agree") {
  const BoxDomain d{1, 10.0, 32, 3};
  const Physics p = quintic_physics();
  LedgerSettings settings;
  settings.centers = {{5.0, 0, 0}};
  LedgerEvaluator eval(d, p, settings);
  Ledger ledger;
  ledger.settings = settings;
  ledger.rows.push_back(eval.evaluate(random_state(d, 1.0, 1)));
  const auto cols = ledger.columns();
  const auto manifest = ledger.manifest();
  REQUIRE(manifest["columns"].size() == cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) CHECK(manifest["columns"][i]["name"] == cols[i]);

  const auto path = std::filesystem::temp_directory_path() / "fracwave_ledger_test.csv";
  ledger.write_csv(path.string());
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  std::string expect;
  for (std::size_t i = 0; i < cols.size(); ++i) expect += (i ? "," : "") + cols[i];
  CHECK(header == expect);
  std::stringstream ss(line);
  std::string cell;
  std::getline(ss, cell, ',');
  std::getline(ss, cell, ',');
  CHECK(std::stod(cell) == ledger.rows[0].energy.kinetic);
  std::filesystem::remove(path);
  CHECK_THROWS(ledger_quantity("no_such_quantity"));
}

TEST_CASE("window integrals on a synthetic ledger") {
  const Ledger l = synthetic_ledger(2.0, 0.25, 5.0);
  // centre 1 carries 2t: over [3, 4] the integral is 7
  CHECK(window_integral(l, &CenterQuantities::h32_sq, 4.0) == doctest::Approx(7.0));
  CHECK(window_integral(l, &CenterQuantities::h32_sq, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS(window_integral(l, &CenterQuantities::h32_sq, 6.0));
}

TEST_CASE("twin factor integrates both ledgers") {
  const Ledger a = synthetic_ledger(1.0, 0.5, 4.0), b = synthetic_ledger(1.0, 0.5, 4.0);
  // sup over centres of exp(C int (1 + 1 + 1)) on [0, 2]
  CHECK(twin_factor_AT(a, b, 2.0, 0.5) == doctest::Approx(std::exp(0.5 * 3.0 * 2.0)));
  Ledger c = b;
  c.settings.centers.pop_back();
  CHECK_THROWS(twin_factor_AT(a, c, 2.0, 0.5));
  CHECK_THROWS(twin_factor_AT(a, b, 5.0, 0.5));
}
