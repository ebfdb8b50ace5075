// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "fracwave/experiments.hpp"
#include "fracwave/gronwall.hpp"
#include "oracles.hpp"

using namespace fracwave;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.passed) ++failures;
  std::printf("%s  %-28s %s  [%.1f s]\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const Criterion* find(const ExperimentReport& r, const std::string& prefix) {
  for (const auto& c : r.criteria)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

std::string fmt(const char* f, double x) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// The desk-scale 1D setup: L = 20, N = 256, pad 3, gamma = lambda0 = 1, eps = 0.1, dt = 1e-3.
json base(const std::string& kind, double end_time) {
  return {{"domain", {{"dim", 1}, {"side_length", 20.0}, {"modes", 256}, {"pad_factor", 3}}},
          {"physics", {{"gamma", 1.0}, {"lambda0", 1.0}, {"nonlinearity", {{"kind", "quintic"}}}}},
          {"time", {{"dt", 1e-3}, {"end_time", end_time}, {"sample_every", 0.05}}},
          {"weights", {{"epsilon", {0.1}}}},
          {"experiment", {{"kind", kind}}}};
}

const ExperimentReport& fracops_report() {
  static const ExperimentReport r = [] {
    json doc = base("fracops-verify", 0.0);
    return run_experiment(parse_config(doc), "");
  }();
  return r;
}

Outcome fractional_powers() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport& r = fracops_report();
  const double secs = seconds_since(start);
  bool ok = secs < 10.0;
  double worst = 0.0;
  int decreasing = 0, total = 0;
  for (const auto& c : r.criteria) {
    if (c.name.rfind("quadrature matches", 0) == 0) {
      worst = std::max(worst, c.value);
      ok = ok && c.passed;
    }
    if (c.name.rfind("error decreases", 0) == 0) {
      ++total;
      decreasing += c.passed;
      ok = ok && c.passed;
    }
  }
  return {ok && total == 4, fmt("max rel L2 error %.3g <= 1e-6; ", worst) + std::to_string(decreasing) + "/" +
                                std::to_string(total) + " strictly decreasing over 200/400/800 nodes; " +
                                fmt("%.2f s < 10 s", secs)};
}

Outcome semigroup() {
  const Criterion* c = find(fracops_report(), "power semigroup law");
  return {c && c->passed, fmt("max relative deviation %.3g <= 1e-12 over 20 triples", c ? c->value : NAN)};
}

Outcome heat_contraction() {
  const Criterion* c = find(fracops_report(), "weighted heat contraction");
  return {c && c->passed, fmt("max ratio %.6f, ", c ? c->value : NAN) + (c ? c->tolerance : std::string())};
}

Outcome commutator_scaling() {
  json doc = base("commutator-study", 0.0);
  doc["domain"]["side_length"] = 40.0;
  doc["domain"]["modes"] = 128;
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  const double secs = seconds_since(start);
  const Criterion* s0 = find(r, "slope theta 0.25 s 0");
  const Criterion* s1 = find(r, "slope theta 0.25 s 0.5");
  const Criterion* bump = find(r, "bump ratios bounded");
  const bool ok = s0 && s1 && bump && s0->passed && s1->passed && bump->passed && secs < 60.0;
  return {ok, fmt("slope(s=0) %.3f >= 0.4; ", s0 ? s0->value : NAN) + fmt("slope(s=1/2) %.3f >= 0.65; ", s1 ? s1->value : NAN) +
                  fmt("bump max/min %.3f <= 3; ", bump ? bump->value : NAN) + fmt("%.2f s < 60 s", secs)};
}

Outcome linear_modes() {
  struct Case {
    const char* label;
    double gamma;
    int mode;
  };
  const BoxDomain d{1, std::numbers::pi, 16, 3};
  double worst = 0.0;
  std::string labels;
  for (const Case& c : {Case{"under", 0.5, 3}, Case{"over", 5.0, 1}, Case{"near-critical", std::sqrt(4.0 + 5e-9), 1}}) {
    Physics p;
    p.gamma = c.gamma;
    p.lambda0 = 1.0;
    const double mu = c.mode * c.mode;
    const double a = c.gamma * std::sqrt(1.0 + mu), b = mu + 1.0;
    const double c0 = 0.8, v0 = -0.3;
    State s{single_mode(d, {c.mode, 1, 1}, c0), single_mode(d, {c.mode, 1, 1}, v0), 0.0};
    const Integrator integ(d, p, 1e-3);
    const auto k = static_cast<std::size_t>(c.mode - 1);
    for (int j = 1; j <= 1000; ++j) {
      s = integ.advance_to(s, 0.01 * j);
      const auto ref = oracle::damped_mode(a, b, 0.0, c0, v0, 0.01 * j);
      worst = std::max({worst, std::abs(s.u[k] - ref.c), std::abs(s.v[k] - ref.dc)});
    }
  }
  return {worst <= 1e-10, fmt("max |c - c_exact|, |c' - c'_exact| = %.3g <= 1e-10 on [0, 10], under/over/near-critical", worst)};
}

Outcome energy_law() {
  const RunConfig c = parse_config(base("simulate", 10.0));
  const Physics p = make_physics(c);
  const Integrator integ(c.domain, p, c.time.dt);
  State s = make_initial_state(c, p);
  const double e0 = unweighted_energy(s, p).total();
  double prev = e0, worst = -INFINITY;
  for (int n = 0; n < 10000; ++n) {
    s = integ.step(s);
    const double e = unweighted_energy(s, p).total();
    worst = std::max(worst, e - prev);
    prev = e;
  }
  json sweep = base("sweep", 2.0);
  sweep["experiment"]["options"] = {{"axis", "dt"}, {"values", {4e-3, 2e-3, 1e-3}}};
  sweep["time"]["sample_every"] = 0.1;
  const ExperimentReport r = run_experiment(parse_config(sweep), "");
  const Criterion* order = find(r, "time refinement order");
  const bool ok = worst <= 1e-6 * e0 && order && order->passed;
  return {ok, fmt("max per-step increase %.3g", worst) + fmt(" <= %.3g (1e-6 E(0)); ", 1e-6 * e0) +
                  fmt("refinement order %.3f in [1.7, 2.3]", order ? order->value : NAN)};
}

Outcome dissipative() {
  bool ok = true;
  std::string detail;
  double slowest = 0.0;
  for (const char* kind : {"quintic", "sin5"}) {
    json doc = base("dissipative", 30.0);
    doc["physics"]["nonlinearity"]["kind"] = kind;
    const auto start = std::chrono::steady_clock::now();
    const ExperimentReport r = run_experiment(parse_config(doc), "");
    slowest = std::max(slowest, seconds_since(start) / 3.0);
    double worst = 0.0;
    int decayed = 0;
    for (const auto& c : r.criteria)
      if (c.name.rfind("decay below tolerance", 0) == 0) {
        worst = std::max(worst, c.value);
        decayed += c.passed;
      }
    ok = ok && decayed == 3 && !r.diverged;
    detail += std::string(kind) + fmt(" g=0 max tail/initial %.3g <= 1e-6; ", worst);
  }
  json forced = base("dissipative", 30.0);
  forced["physics"]["source"] = {{"kind", "gaussian"}, {"amplitude", 1.0}, {"width", 1.0}};
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport r = run_experiment(parse_config(forced), "");
  slowest = std::max(slowest, seconds_since(start) / 3.0);
  const Criterion* plateau = find(r, "plateau independent");
  ok = ok && plateau && plateau->passed && slowest < 300.0;
  detail += fmt("g!=0 plateau spread %.3g < 0.1; ", plateau ? plateau->value : NAN) + fmt("slowest run %.1f s < 300 s", slowest);
  return {ok, detail};
}

Outcome regularity() {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"quintic", "sin5"}) {
    json doc = base("regularity", 50.0);
    doc["physics"]["nonlinearity"]["kind"] = kind;
    const ExperimentReport r = run_experiment(parse_config(doc), "");
    double worst = 0.0;
    for (const auto& c : r.criteria) {
      worst = std::max(worst, c.value);
      ok = ok && c.passed;
    }
    ok = ok && r.criteria.size() == 3 && !r.diverged;
    detail += std::string(kind) + fmt(" max window/first %.3f <= 10; ", worst);
  }
  return {ok, detail + "L12, H3/2 and u_tt windows on [1, 50]"};
}

Outcome continuous_dependence() {
  json doc = base("twin", 10.0);
  doc["experiment"]["options"] = {{"perturbations", {1e-6, 5e-7}}, {"probe_time", 5.0}};
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  const Criterion* ratio = find(r, "squared-difference ratio");
  const Criterion* env = find(r, "difference within fitted envelope");
  const bool ok = ratio && env && ratio->passed && env->passed;
  return {ok, fmt("ratio at t=5 %.4f in [3, 5.33]; ", ratio ? ratio->value : NAN) +
                  fmt("max D/envelope %.6f <= 1 ", env ? env->value : NAN) +
                  fmt("(rho %.4f)", r.fitted.value("rho", NAN))};
}

Outcome smoothing() {
  json doc = base("smoothing", 1.0);
  doc["initial_data"] = {{"r_u", 1.01}, {"r_v", 0.51}};
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  const Criterion* c = find(r, "t^2-weighted sequence bounded");
  return {c && c->passed, fmt("max/median %.3f <= 3 over t = 2^-j, j = 0..8", c ? c->value : NAN) +
                              fmt("; norm at t=1 %.4g", r.fitted.value("norm_at_1", NAN))};
}

Outcome gronwall() {
  json doc = base("gronwall", 0.0);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport r = run_experiment(parse_config(doc), "");
  GronwallParams p;
  const double t_star = extinction_time(p);
  const double exact = 2.0 * std::sqrt(p.Y0) / p.kappa;
  const double secs = seconds_since(start);
  double equality = 0.0;
  int w_ok = 0, w_total = 0, dominate_ok = 0, dominate_total = 0;
  for (const auto& c : r.criteria) {
    if (c.name.rfind("window condition equality", 0) == 0) equality = std::max(equality, c.value);
    if (c.name.rfind("W <= M", 0) == 0) {
      ++w_total;
      w_ok += c.passed;
    }
    if (c.name.rfind("bound dominates", 0) == 0) {
      ++dominate_total;
      dominate_ok += c.passed;
    }
  }
  const bool ok = equality <= 1e-12 && w_ok == 6 && w_total == 6 && dominate_ok == 6 && dominate_total == 6 &&
                  std::abs(t_star - 23.852) <= 1e-3 && exact <= t_star && secs < 5.0;
  return {ok, fmt("(i) max |cond - 1/2| %.2g; ", equality) + "(ii) W<=M " + std::to_string(w_ok) + "/6; " +
                  fmt("(iii) exact %.3f <= ", exact) + fmt("T* %.4f (23.852 +- 1e-3); ", t_star) + "(iv) dominance " +
                  std::to_string(dominate_ok) + "/6; " + fmt("%.2f s < 5 s", secs)};
}

}  // namespace

int main() {
  criterion("fractional-power oracle", fractional_powers);
  criterion("power semigroup law", semigroup);
  criterion("weighted heat contraction", heat_contraction);
  criterion("commutator epsilon-scaling", commutator_scaling);
  criterion("linear-mode exactness", linear_modes);
  criterion("energy law", energy_law);
  criterion("dissipative decay", dissipative);
  criterion("extra regularity", regularity);
  criterion("continuous dependence", continuous_dependence);
  criterion("smoothing", smoothing);
  criterion("gronwall module", gronwall);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
