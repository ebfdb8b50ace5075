#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fracwave/experiments.hpp"
#include "fracwave/fracops.hpp"
#include "oracles.hpp"

using namespace fracwave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
json small(const std::string& kind, double end_time) {
  return {{"domain", {{"modes", 64}}},
          {"time", {{"end_time", end_time}, {"sample_every", 0.05}}},
          {"experiment", {{"kind", kind}}}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracwave_test_" + name);
  fs::remove_all(p);
  return p;
}
}  // namespace

TEST_CASE("decay fit and slowest linear rate") {
  std::vector<double> t, y;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-1.7 * 0.1 * i));
  }
  CHECK(fit_decay_rate(t, y) == doctest::Approx(1.7));
  for (double gamma : {0.3, 1.0, 4.0}) {
    const BoxDomain d{1, 20.0, 32, 3};
    CHECK(slowest_linear_rate(d, gamma, 1.0) == doctest::Approx(oracle::slowest_rate(laplacian_eigenvalues(d), gamma, 1.0)));
  }
}

TEST_CASE("run directory layout") {
  json doc = small("simulate", 0.5);
  doc["time"]["snapshot_every"] = 0.25;
  const RunConfig c = parse_config(doc);
  const fs::path dir = scratch("layout");
  const ExperimentReport r = run_experiment(c, dir.string());
  CHECK(r.passed());
  for (const char* f : {"ledger.csv", "manifest.json", "report.json", "snapshots/state_000000.json", "snapshots/state_000002.txt"})
    CHECK(fs::exists(dir / f));
  std::ifstream m(dir / "manifest.json");
  const json manifest = json::parse(m);
  std::ifstream csv(dir / "ledger.csv");
  std::string header;
  std::getline(csv, header);
  std::string joined;
  for (const auto& col : manifest["columns"]) joined += (joined.empty() ? "" : ",") + col["name"].get<std::string>();
  CHECK(header == joined);
  CHECK(manifest["config_hash"] == r.config_hash);
  std::ifstream rep(dir / "report.json");
  CHECK(json::parse(rep)["kind"] == "simulate");
  fs::remove_all(dir);
}

TEST_CASE("reruns reproduce every fitted number") {
  const RunConfig c = parse_config(small("simulate", 0.5));
  const ExperimentReport a = run_experiment(c, ""), b = run_experiment(c, "");
  CHECK(a.fitted == b.fitted);
  const RunOutput x = run_simulation(c), y = run_simulation(c);
  CHECK(x.final_state.u.coefficients == y.final_state.u.coefficients);
}

TEST_CASE("zero data has zero windows") {
  json doc = small("regularity", 5.0);
  doc["initial_data"] = {{"kind", "zero"}};
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  CHECK(r.passed());
  for (const auto& w : r.fitted["h32_sq"]) CHECK(w.get<double>() == 0.0);
}

TEST_CASE("regularity needs a long enough horizon") {
  CHECK_THROWS_AS(run_experiment(parse_config(small("regularity", 3.0)), ""), ConfigError);
}

TEST_CASE("linear H^{3/2} windows follow the mode closed form") {
  json doc = small("regularity", 5.0);
  doc["domain"] = {{"side_length", std::numbers::pi}, {"modes", 8}};
  doc["physics"] = {{"nonlinearity", {{"kind", "zero"}}}};
  doc["initial_data"] = {{"kind", "mode"}, {"mode", {2}}, {"target_energy", 1.0}};
  doc["weights"] = {{"epsilon", {0.0}}};
  const RunConfig c = parse_config(doc);
  const Physics p = make_physics(c);
  const State s0 = make_initial_state(c, p);
  const ExperimentReport r = run_experiment(c, "");
  const double a = std::sqrt(5.0), b = 5.0;
  // || A^{3/4} c(t) sin(2x) ||^2 = 5^{3/2} (pi / 2) c(t)^2, Simpson over [j, j + 1]
  for (int j = 1; j <= 4; ++j) {
    const int n = 2000;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = j + static_cast<double>(i) / n;
      const double cv = oracle::damped_mode(a, b, 0.0, s0.u[1], s0.v[1], t).c;
      sum += (i == 0 || i == n ? 1.0 : i % 2 ? 4.0 : 2.0) * cv * cv;
    }
    const double exact = std::pow(5.0, 1.5) * std::numbers::pi / 2 * sum / (3.0 * n);
    CHECK(r.fitted["h32_sq"][static_cast<std::size_t>(j - 1)].get<double>() == doctest::Approx(exact).epsilon(0.05));
  }
}

TEST_CASE("twin with a tiny perturbation stays in the linear regime") {
  json doc = small("twin", 2.0);
  doc["experiment"]["options"] = {{"probe_time", 1.0}};
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  CHECK(r.fitted["ratio"].get<double>() == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::isfinite(r.fitted["rho"].get<double>()));
  CHECK(r.fitted["A_T"].get<double>() >= 1.0);
  CHECK(r.error.empty());
}

TEST_CASE("twin probe time must be sampled") {
  json doc = small("twin", 2.0);
  doc["experiment"]["options"] = {{"probe_time", 3.0}};
  CHECK_THROWS_AS(run_experiment(parse_config(doc), ""), ConfigError);
}

TEST_CASE("diverged runs map to exit code 3") {
  json doc = small("simulate", 1.0);
  doc["initial_data"] = {{"target_energy", 1e16}};
  doc["time"]["dt"] = 0.01;
  doc["time"]["sample_every"] = 0.05;
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  CHECK(r.diverged);
  CHECK(r.exit_code() == 3);
  CHECK(r.to_json()["last_good_time"].get<double>() >= 0.0);
}

TEST_CASE("criteria drive the exit code") {
  ExperimentReport r;
  r.add("holds", true, 1.0, "<= 2");
  CHECK(r.exit_code() == 0);
  r.add("breaks", false, 3.0, "<= 2");
  CHECK(r.exit_code() == 1);
  CHECK(r.to_json()["criteria"][1]["tolerance"] == "<= 2");
}

TEST_CASE("seed sweep records every child") {
  json doc = small("sweep", 0.0);
  doc["experiment"]["options"] = {{"axis", "seed"}, {"values", {1, 2}}, {"child", "fracops-verify"}};
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  CHECK(r.fitted["children"].size() == 2);
  CHECK(r.passed());
}

TEST_CASE("unknown sweep axis") {
  json doc = small("sweep", 0.0);
  doc["experiment"]["options"] = {{"axis", "colour"}};
  CHECK_THROWS_AS(run_experiment(parse_config(doc), ""), ConfigError);
}
