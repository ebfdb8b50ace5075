#include "fracwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "fracwave/commutators.hpp"
#include "fracwave/fracops.hpp"
#include "fracwave/gronwall.hpp"

namespace fracwave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string join(const std::string& dir, const std::string& leaf) {
  return dir.empty() ? std::string() : (fs::path(dir) / leaf).string();
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

ExperimentReport start_report(const RunConfig& config, const std::string& kind) {
  ExperimentReport r;
  r.kind = kind;
  r.config_hash = hash_hex(config_hash(config));
  r.config = to_json(config);
  return r;
}

void write_snapshot(const std::string& dir, const State& s, const std::string& hash, int index) {
  fs::create_directories(dir);
  char stem[32];
  std::snprintf(stem, sizeof stem, "state_%06d", index);
  const std::string txt = (fs::path(dir) / (std::string(stem) + ".txt")).string();
  std::ofstream out(txt);
  char buf[64];
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", s.u[i], s.v[i]);
    out << buf;
  }
  const BoxDomain& d = s.u.domain;
  write_json((fs::path(dir) / (std::string(stem) + ".json")).string(),
             {{"t", s.t},
              {"coefficients", std::string(stem) + ".txt"},
              {"layout", "one line per mode: u v, last axis fastest"},
              {"domain", {{"dim", d.dim}, {"side_length", d.side_length}, {"modes", d.modes}, {"pad_factor", d.pad_factor}}},
              {"config_hash", hash}});
}

double sup_weighted_source(const Physics& physics, const std::vector<GridField>& weights) {
  if (!physics.has_source()) return 0.0;
  const GridField g = to_grid(physics.source);
  double best = 0.0;
  for (const auto& w : weights) {
    const double n = weighted_lp_norm(g, w, 2);
    best = std::max(best, n * n);
  }
  return best;
}

double mean(const std::vector<double>& x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

void ExperimentReport::add(const std::string& name, bool ok, double value, const std::string& tolerance) {
  criteria.push_back({name, ok, value, tolerance});
}

bool ExperimentReport::passed() const {
  if (diverged || !error.empty()) return false;
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

int ExperimentReport::exit_code() const {
  if (diverged) return 3;
  return passed() ? 0 : 1;
}

json ExperimentReport::to_json() const {
  json crit = json::array();
  for (const auto& c : criteria)
    crit.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
  json j{{"kind", kind},     {"config_hash", config_hash}, {"config", config}, {"criteria", crit},
         {"fitted", fitted}, {"ledgers", ledgers},         {"passed", passed()}, {"diverged", diverged}};
  if (diverged) j["last_good_time"] = last_good_time;
  if (!error.empty()) j["error"] = error;
  return j;
}

std::vector<GridField> center_weights(const BoxDomain& domain, double epsilon, const std::vector<Point>& centers) {
  std::vector<GridField> out;
  for (const Point& c : centers) out.push_back(weight_on_grid(WeightSpec::smooth(epsilon, c), domain));
  return out;
}

double sup_energy_norm(const SpectralField& u, const SpectralField& v, const std::vector<GridField>& weights,
                       double lambda0) {
  const GridField ug = to_grid(u);
  const GridField vg = to_grid(v);
  std::vector<GridField> du;
  for (int a = 0; a < u.domain.dim; ++a) du.push_back(derivative_to_grid(u, a));
  const double dv = u.domain.cell_volume();
  double best = 0.0;
  for (const auto& w : weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double g2 = 0.0;
      for (const auto& d : du) g2 += d.values[i] * d.values[i];
      s += w.values[i] * w.values[i] * (g2 + lambda0 * ug.values[i] * ug.values[i] + vg.values[i] * vg.values[i]);
    }
    best = std::max(best, s * dv);
  }
  return best;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> x, ly;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (y[i] > 0.0) {
      x.push_back(t[i]);
      ly.push_back(std::log(y[i]));
    }
  if (x.size() < 2) return 0.0;
  return -least_squares_slope(x, ly);
}

double slowest_linear_rate(const BoxDomain& domain, double gamma, double lambda0) {
  double slowest = INFINITY;
  for (double mu : laplacian_eigenvalues(domain)) {
    const double a = gamma * std::sqrt(1.0 + mu);
    const double b = mu + lambda0;
    const double disc = 0.25 * a * a - b;
    const double rate = disc <= 0.0 ? 0.5 * a : 0.5 * a - std::sqrt(disc);
    slowest = std::min(slowest, rate);
  }
  return 2.0 * slowest;
}

RunOutput run_simulation(const RunConfig& config, const std::string& dir) {
  const Physics physics = make_physics(config);
  physics.validate(config.domain);
  LedgerSettings settings;
  settings.epsilon = config.weights.epsilon.front();
  settings.delta = resolved_delta(config, physics);
  settings.centers = ledger_centers(config);
  settings.ball_radius = config.weights.ball_radius;
  LedgerEvaluator evaluator(config.domain, physics, settings);

  RunOutput out;
  out.ledger.settings = settings;
  out.ledger.energy_constant = evaluator.energy_constant();
  const std::string hash = hash_hex(config_hash(config));
  const double snap = config.time.snapshot_every;
  int snapshots = 0;

  auto flush = [&] {
    if (dir.empty()) return;
    fs::create_directories(dir);
    out.ledger.write_csv(join(dir, "ledger.csv"));
    json manifest = out.ledger.manifest();
    manifest["config_hash"] = hash;
    write_json(join(dir, "manifest.json"), manifest);
  };

  try {
    out.final_state = simulate(make_initial_state(config, physics), physics, time_grid(config), [&](const State& s) {
      out.ledger.rows.push_back(evaluator.evaluate(s));
      if (snap > 0.0 && !dir.empty() && s.t + 1e-9 >= snapshots * snap) {
        write_snapshot(join(dir, "snapshots"), s, hash, snapshots);
        ++snapshots;
      }
    });
  } catch (const DivergedRun&) {
    flush();
    throw;
  }
  flush();
  return out;
}

ExperimentReport run_simulate(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "simulate");
  try {
    const RunOutput run = run_simulation(config, out_dir);
    if (!out_dir.empty()) report.ledgers.push_back(join(out_dir, "ledger.csv"));
    const auto& rows = run.ledger.rows;
    report.fitted["final_time"] = run.final_state.t;
    report.fitted["initial_energy"] = rows.front().energy.total();
    report.fitted["final_energy"] = rows.back().energy.total();
    report.add("state finite", run.final_state.u.is_finite() && run.final_state.v.is_finite(), run.final_state.t,
               "all coefficients finite");
  } catch (const DivergedRun& e) {
    report.diverged = true;
    report.last_good_time = e.last_good_time();
    report.error = e.what();
  }
  return report;
}

ExperimentReport run_dissipative(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "dissipative");
  const json& o = config.options;
  const auto amps = doubles(o["amplitudes"]);
  const double decay_tol = o["decay_tolerance"].get<double>();
  const double plateau_tol = o["plateau_tolerance"].get<double>();
  const double need_fraction = o["inequality_fraction"].get<double>();
  const double tail_fraction = o["tail_fraction"].get<double>();
  if (amps.empty()) throw ConfigError("dissipative: amplitudes must not be empty");

  const Physics physics = make_physics(config);
  const double delta = resolved_delta(config, physics);
  const auto weights = center_weights(config.domain, config.weights.epsilon.front(), ledger_centers(config));
  const double sup_g = sup_weighted_source(physics, weights);
  const double c_eps = modified_energy_constant(config.domain, physics, config.weights.epsilon.front());
  const double kappa = delta / 4.0;
  const double rhs = c_eps * (1.0 + sup_g);
  const double t_end = config.time.end_time;

  std::vector<double> plateaus, tail_maxima;
  std::size_t pairs = 0, satisfied = 0;
  json per_run = json::array();
  double beta = 0.0;
  for (std::size_t a = 0; a < amps.size(); ++a) {
    RunConfig cfg = config;
    cfg.initial.amplitude = amps[a];
    const std::string dir = out_dir.empty() ? "" : a == 0 ? out_dir : join(join(out_dir, "runs"), "amplitude_" + fmt(amps[a]));
    RunOutput run;
    try {
      run = run_simulation(cfg, dir);
    } catch (const DivergedRun& e) {
      report.diverged = true;
      report.last_good_time = e.last_good_time();
      report.error = std::string(e.what()) + " (amplitude " + fmt(amps[a]) + ")";
      return report;
    }
    if (!dir.empty()) report.ledgers.push_back(join(dir, "ledger.csv"));
    const auto& rows = run.ledger.rows;
    std::vector<double> t, norm, tail;
    for (const auto& row : rows) {
      t.push_back(row.t);
      norm.push_back(row.sup(&CenterQuantities::energy_norm_sq));
      if (row.t >= (1.0 - tail_fraction) * t_end - 1e-9) tail.push_back(norm.back());
    }
    const double plateau = mean(tail);
    const double tail_max = tail.empty() ? 0.0 : *std::max_element(tail.begin(), tail.end());
    plateaus.push_back(plateau);
    tail_maxima.push_back(norm.front() > 0.0 ? tail_max / norm.front() : 0.0);

    // transient: distance to the plateau until it first drops below 1e-8 of its start
    std::vector<double> ft, fy;
    const double y0 = std::abs(norm.front() - plateau);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double y = std::abs(norm[i] - plateau);
      if (y < 1e-8 * y0) break;
      ft.push_back(t[i]);
      fy.push_back(y);
    }
    const double run_beta = fit_decay_rate(ft, fy);
    if (a == 0) beta = run_beta;

    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double dt = rows[i + 1].t - rows[i].t;
      for (std::size_t c = 0; c < rows[i].centers.size(); ++c) {
        const auto& q0 = rows[i].centers[c];
        const auto& q1 = rows[i + 1].centers[c];
        const double lhs = (q1.modified_energy - q0.modified_energy) / dt +
                           kappa * 0.5 * (std::cbrt(q0.modified_energy_3eps) + std::cbrt(q1.modified_energy_3eps)) +
                           kappa * 0.5 * (q0.damping + q1.damping);
        ++pairs;
        if (lhs <= rhs) ++satisfied;
      }
    }
    per_run.push_back({{"amplitude", amps[a]}, {"plateau", plateau}, {"tail_ratio", tail_maxima.back()},
                       {"beta", run_beta}, {"initial_norm", norm.front()}});
  }

  if (!physics.has_source()) {
    for (std::size_t a = 0; a < amps.size(); ++a)
      report.add("decay below tolerance, amplitude " + fmt(amps[a]), tail_maxima[a] <= decay_tol, tail_maxima[a],
                 "tail sup energy / initial <= " + fmt(decay_tol));
  } else {
    const double lo = *std::min_element(plateaus.begin(), plateaus.end());
    const double hi = *std::max_element(plateaus.begin(), plateaus.end());
    const double spread = mean(plateaus) > 0.0 ? (hi - lo) / mean(plateaus) : 0.0;
    report.add("plateau independent of amplitude", spread < plateau_tol, spread, "(max - min) / mean < " + fmt(plateau_tol));
  }
  report.add("positive decay rate", beta > 0.0, beta, "> 0");
  if (physics.nonlinearity.kind == NonlinearityKind::zero && !physics.has_source()) {
    const double target = slowest_linear_rate(config.domain, physics.gamma, physics.lambda0);
    const double tol = o["linear_tolerance"].get<double>();
    const double rel = std::abs(beta / target - 1.0);
    report.add("linear decay rate matches slowest mode", rel <= tol, rel, "relative error <= " + fmt(tol));
    report.fitted["linear_rate"] = target;
  }
  const double fraction = pairs ? static_cast<double>(satisfied) / static_cast<double>(pairs) : 1.0;
  report.add("differential inequality", fraction >= need_fraction, fraction, ">= " + fmt(need_fraction) + " of intervals");
  report.fitted["beta"] = beta;
  report.fitted["plateau"] = plateaus.front();
  report.fitted["runs"] = per_run;
  report.fitted["kappa"] = kappa;
  report.fitted["inequality_constant"] = rhs;
  report.fitted["delta"] = delta;
  return report;
}

ExperimentReport run_regularity(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "regularity");
  const json& o = config.options;
  const double window = o["window"].get<double>();
  const double factor = o["growth_factor"].get<double>();
  if (config.time.end_time < o["min_end_time"].get<double>())
    throw ConfigError("regularity: end_time must be at least " + fmt(o["min_end_time"].get<double>()));
  RunOutput run;
  try {
    run = run_simulation(config, out_dir);
  } catch (const DivergedRun& e) {
    report.diverged = true;
    report.last_good_time = e.last_good_time();
    report.error = e.what();
    return report;
  }
  if (!out_dir.empty()) report.ledgers.push_back(join(out_dir, "ledger.csv"));
  // unit windows covering [1, T]
  const int windows = static_cast<int>(std::floor((config.time.end_time - 1.0) / window + 1e-9));
  if (windows < 1) throw ConfigError("regularity: no complete window in [1, end_time]");
  for (const char* name : {"l12_fourth", "h32_sq", "utt_sq"}) {
    const auto& q = ledger_quantity(name);
    std::vector<double> values;
    for (int j = 1; j <= windows; ++j)
      values.push_back(window_integral(run.ledger, q.field, 1.0 + j * window, window));
    const double first = values.front();
    const double sup = *std::max_element(values.begin(), values.end());
    report.add(std::string("no growth of ") + name, sup <= factor * first, first > 0.0 ? sup / first : 0.0,
               "sup window / first window <= " + fmt(factor));
    report.fitted[name] = values;
  }
  return report;
}

ExperimentReport run_twin(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "twin");
  const json& o = config.options;
  const auto scales = doubles(o["perturbations"]);
  const double probe = o["probe_time"].get<double>();
  const auto ratio_range = doubles(o["ratio_range"]);
  const auto nonlinear_range = doubles(o["nonlinear_range"]);
  if (scales.size() != 2) throw ConfigError("twin: exactly two perturbation scales are required");
  if (probe > config.time.end_time) throw ConfigError("twin: probe_time beyond end_time");

  const Physics physics = make_physics(config);
  physics.validate(config.domain);
  const State base = make_initial_state(config, physics);
  const auto seed = o["perturbation_seed"].get<std::uint64_t>();
  SpectralField du = random_field(config.domain, config.initial.r_u, seed);
  SpectralField dv = random_field(config.domain, config.initial.r_v, seed + 1);
  const double norm = std::sqrt(plain_energy_norm_sq(du, dv, physics.lambda0));
  du *= 1.0 / norm;
  dv *= 1.0 / norm;

  std::vector<State> states{base};
  for (double s : scales) {
    State p = base;
    p.u += s * du;
    p.v += s * dv;
    states.push_back(p);
  }

  LedgerSettings settings;
  settings.epsilon = config.weights.epsilon.front();
  settings.delta = resolved_delta(config, physics);
  settings.centers = ledger_centers(config);
  settings.ball_radius = config.weights.ball_radius;
  LedgerEvaluator eval_ref(config.domain, physics, settings);
  LedgerEvaluator eval_pert(config.domain, physics, settings);
  Ledger ledger_ref, ledger_pert;
  ledger_ref.settings = ledger_pert.settings = settings;
  ledger_ref.energy_constant = ledger_pert.energy_constant = eval_ref.energy_constant();
  const auto weights = center_weights(config.domain, settings.epsilon, settings.centers);

  const TimeGrid grid = time_grid(config);
  const Integrator integrator(config.domain, physics, grid.dt);
  std::vector<double> times;
  std::vector<std::vector<double>> diffs(scales.size());
  auto record = [&] {
    times.push_back(states[0].t);
    for (std::size_t j = 0; j < scales.size(); ++j)
      diffs[j].push_back(sup_energy_norm(states[j + 1].u - states[0].u, states[j + 1].v - states[0].v, weights,
                                         physics.lambda0));
    ledger_ref.rows.push_back(eval_ref.evaluate(states[0]));
    ledger_pert.rows.push_back(eval_pert.evaluate(states[1]));
  };
  try {
    record();
    const auto steps = static_cast<long>(std::lround(config.time.end_time / grid.dt));
    for (long n = 1; n <= steps; ++n) {
      for (auto& s : states) s = integrator.step(s);
      if (n % grid.sample_every == 0 || n == steps) record();
    }
  } catch (const DivergedRun& e) {
    report.diverged = true;
    report.last_good_time = e.last_good_time();
    report.error = e.what();
    return report;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    ledger_ref.write_csv(join(out_dir, "ledger.csv"));
    json manifest = ledger_ref.manifest();
    manifest["config_hash"] = report.config_hash;
    write_json(join(out_dir, "manifest.json"), manifest);
    const std::string pdir = join(join(out_dir, "runs"), "perturbed");
    fs::create_directories(pdir);
    ledger_pert.write_csv(join(pdir, "ledger.csv"));
    write_json(join(pdir, "manifest.json"), ledger_pert.manifest());
    report.ledgers = {join(out_dir, "ledger.csv"), join(pdir, "ledger.csv")};
  }

  std::size_t at = times.size();
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - probe) < 1e-6 * grid.dt) at = i;
  if (at == times.size()) throw ConfigError("twin: probe_time is not a sample time");
  const double ratio = diffs[1][at] > 0.0 ? diffs[0][at] / diffs[1][at] : 0.0;
  report.add("squared-difference ratio at probe time", ratio >= ratio_range[0] && ratio <= ratio_range[1], ratio,
             "in [" + fmt(ratio_range[0]) + ", " + fmt(ratio_range[1]) + "]");
  if (ratio < nonlinear_range[0] || ratio > nonlinear_range[1])
    report.error = "perturbation too large: nonlinear regime detected (ratio " + fmt(ratio) + ")";

  // growth rate fitted on the first half of the horizon, then checked on all samples
  const double d0 = diffs[0].front();
  double rho = -INFINITY;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= 0.5 * config.time.end_time + 1e-9 && diffs[0][i] > 0.0)
      rho = std::max(rho, std::log(diffs[0][i] / d0) / times[i]);
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double envelope = d0 * std::exp(rho * times[i]);
    worst = std::max(worst, diffs[0][i] / envelope);
    if (diffs[0][i] > envelope * (1.0 + 1e-9)) ++violations;
  }
  report.add("difference within fitted envelope", violations == 0, worst, "D(t) <= D(0) exp(rho t) at every sample");
  report.fitted["rho"] = rho;
  report.fitted["ratio"] = ratio;
  report.fitted["initial_difference"] = d0;
  report.fitted["A_T"] = twin_factor_AT(ledger_ref, ledger_pert, config.time.end_time, config.weights.at_constant);
  report.fitted["at_constant"] = config.weights.at_constant;
  report.fitted["times"] = times;
  report.fitted["differences"] = diffs;
  return report;
}

ExperimentReport run_smoothing(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "smoothing");
  const json& o = config.options;
  const int levels = o["levels"].get<int>();
  const double limit = o["ratio_limit"].get<double>();
  if (levels < 1) throw ConfigError("smoothing: levels must be >= 1");
  const Physics physics = make_physics(config);
  physics.validate(config.domain);
  const auto weights = center_weights(config.domain, config.weights.epsilon.front(), ledger_centers(config));
  const Integrator integrator(config.domain, physics, config.time.dt);

  auto measure = [&](const State& s) {
    const GridField au = to_grid(apply_spectral(s.u, 1.0));
    const GridField a12v = to_grid(apply_spectral(s.v, 0.5));
    const GridField v = to_grid(s.v);
    const GridField utt = to_grid(pde_residual(s, physics));
    std::vector<GridField> dv;
    for (int a = 0; a < config.domain.dim; ++a) dv.push_back(derivative_to_grid(s.v, a));
    double best = 0.0;
    for (const auto& w : weights) {
      double sum = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        double g2 = 0.0;
        for (const auto& d : dv) g2 += d.values[i] * d.values[i];
        sum += w.values[i] * w.values[i] *
               (au.values[i] * au.values[i] + a12v.values[i] * a12v.values[i] + g2 +
                physics.lambda0 * v.values[i] * v.values[i] + utt.values[i] * utt.values[i]);
      }
      best = std::max(best, sum * config.domain.cell_volume());
    }
    return best;
  };

  std::vector<double> times, raw, weighted;
  State s = make_initial_state(config, physics);
  try {
    for (int j = levels; j >= 0; --j) {
      const double t = std::ldexp(1.0, -j);
      s = integrator.advance_to(s, t);
      times.push_back(t);
      raw.push_back(measure(s));
      weighted.push_back(t * t * raw.back());
    }
  } catch (const DivergedRun& e) {
    report.diverged = true;
    report.last_good_time = e.last_good_time();
    report.error = e.what();
    return report;
  }
  const double med = median(weighted);
  const double peak = *std::max_element(weighted.begin(), weighted.end());
  const double ratio = med > 0.0 ? peak / med : 0.0;
  report.add("t^2-weighted sequence bounded", ratio <= limit, ratio, "max / median <= " + fmt(limit));
  report.add("unweighted norm grows as t -> 0", raw.front() > raw.back(), raw.front() / raw.back(),
             "S(2^-levels) > S(1)");
  report.fitted["times"] = times;
  report.fitted["norm"] = raw;
  report.fitted["weighted"] = weighted;
  report.fitted["norm_at_1"] = raw.back();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(join(out_dir, "smoothing.csv"));
    csv << "t,norm,weighted\n";
    char buf[96];
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", times[i], raw[i], weighted[i]);
      csv << buf;
    }
  }
  return report;
}

ExperimentReport run_fracops_verify(const RunConfig& config, const std::string&) {
  ExperimentReport report = start_report(config, "fracops-verify");
  const json& o = config.options;
  BoxDomain d = config.domain;
  d.dim = 1;
  d.modes = o["modes"].get<int>();
  const auto seed = o["seed"].get<std::uint64_t>();
  const int fields = o["fields"].get<int>();
  const double tol = o["tolerance"].get<double>();
  QuadratureSpec quad{o["nodes"].get<int>(), o["lambda_min"].get<double>(), o["lambda_max"].get<double>()};

  std::vector<SpectralField> ensemble;
  for (int i = 0; i < fields; ++i) ensemble.push_back(random_field(d, 1.0, seed + static_cast<std::uint64_t>(i)));

  auto rel_error = [&](double theta, const QuadratureSpec& q) {
    double worst = 0.0;
    for (const auto& u : ensemble) {
      const SpectralField exact = apply_spectral(u, theta);
      worst = std::max(worst, l2_norm(apply_quadrature(u, theta, q) - exact) / l2_norm(exact));
    }
    return worst;
  };
  json errors = json::object();
  for (double theta : doubles(o["thetas"])) {
    const double e = rel_error(theta, quad);
    report.add("quadrature matches spectral, theta " + fmt(theta), e <= tol, e, "relative L2 <= " + fmt(tol));
    QuadratureSpec half = quad, twice = quad;
    half.nodes = quad.nodes / 2;
    twice.nodes = quad.nodes * 2;
    const double eh = rel_error(theta, half), et = rel_error(theta, twice);
    report.add("error decreases with doubled nodes, theta " + fmt(theta), eh > e && e > et, e / et,
               "strict decrease " + std::to_string(half.nodes) + " -> " + std::to_string(quad.nodes) + " -> " +
                   std::to_string(twice.nodes));
    errors[fmt(theta)] = {eh, e, et};
  }
  report.fitted["errors"] = errors;

  std::mt19937_64 rng(seed * 7919 + 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double law = 0.0;
  for (int i = 0; i < o["triples"].get<int>(); ++i) {
    double a = unit(rng), b = unit(rng);
    if (std::abs(a + b) > 1.0) b = std::copysign(1.0, a + b) - a;
    const SpectralField& u = ensemble[static_cast<std::size_t>(i) % ensemble.size()];
    const SpectralField lhs = apply_spectral(apply_spectral(u, a), b);
    const SpectralField rhs = apply_spectral(u, a + b);
    law = std::max(law, l2_norm(lhs - rhs) / l2_norm(rhs));
  }
  report.add("power semigroup law", law <= 1e-12, law, "relative <= 1e-12");

  Point center{};
  center[0] = 0.5 * d.side_length;
  std::size_t violations = 0, checks = 0;
  double worst = 0.0;
  for (int i = 0; i < o["contraction_fields"].get<int>(); ++i) {
    const SpectralField u = random_field(d, 1.0, seed + 1000 + static_cast<std::uint64_t>(i));
    for (double eps : doubles(o["contraction_epsilons"])) {
      const GridField w = weight_on_grid(WeightSpec::smooth(eps, center), d);
      const double base = weighted_lp_norm(to_grid(u), w, 2);
      for (double lam : doubles(o["contraction_lambdas"])) {
        const double lhs = weighted_lp_norm(to_grid(heat_semigroup(u, lam)), w, 2);
        const double ratio = lhs / (std::exp(-0.5 * lam) * base);
        worst = std::max(worst, ratio);
        ++checks;
        if (ratio > 1.0) ++violations;
      }
    }
  }
  report.add("weighted heat contraction", violations == 0, worst, "zero violations of ratio <= 1 over " +
                                                                     std::to_string(checks) + " checks");
  return report;
}

ExperimentReport run_commutator_study(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "commutator-study");
  const json& o = config.options;
  const double theta = o["theta"].get<double>();
  const auto eps = doubles(o["epsilon"]);
  const double tol = o["slope_tolerance"].get<double>();
  const auto ensemble = decaying_ensemble(config.domain, o["ensemble"].get<int>(), o["decay"].get<double>(),
                                          o["seed"].get<std::uint64_t>());
  ScalingStudyOptions opts;
  for (int a = 0; a < config.domain.dim; ++a) opts.center[static_cast<std::size_t>(a)] = 0.5 * config.domain.side_length;
  opts.check_resolution = true;
  json reports = json::array();
  bool first = true;
  for (double s : doubles(o["s"])) {
    opts.with_bump = first;
    const CommutatorReport r = scaling_study(theta, s, ensemble, eps, opts);
    const double need = 0.5 * (1.0 + s) - tol;
    report.add("slope theta " + fmt(theta) + " s " + fmt(s), r.slope >= need, r.slope, ">= " + fmt(need));
    const double res_tol = o["resolution_tolerance"].get<double>();
    report.add("resolution stable, s " + fmt(s), r.resolution_change < res_tol, r.resolution_change,
               "relative change on doubling modes < " + fmt(res_tol));
    if (first) {
      const auto [lo, hi] = std::minmax_element(r.bump_ratio_list.begin(), r.bump_ratio_list.end());
      const double spread = *hi / *lo;
      const double limit = o["bump_ratio_limit"].get<double>();
      report.add("bump ratios bounded", spread <= limit, spread, "max / min <= " + fmt(limit));
    }
    reports.push_back(r.to_json());
    first = false;
  }
  report.fitted["studies"] = reports;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json(join(out_dir, "commutator.json"), reports);
  }
  return report;
}

ExperimentReport run_gronwall(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "gronwall");
  const json& o = config.options;
  const int k_max = o["k_max"].get<int>();
  const int samples = o["samples"].get<int>();
  json traces = json::array();
  for (double p : doubles(o["p"])) {
    for (double h : doubles(o["H"])) {
      GronwallParams params;
      params.p = p;
      params.H = h;
      params.kappa = o["kappa"].get<double>();
      params.Y0 = o["Y0"].get<double>();
      params.L = o["L"].get<double>();
      params.lambda = o["lambda"].get<double>();
      params.Lambda = std::max(params.lambda, 1.0);
      GronwallTrace trace;
      const GronwallVerification v = verify_against_ode(params, k_max, samples, &trace);
      const std::string tag = "p " + fmt(p) + " H " + fmt(h);
      double dev = 0.0;
      for (int k = 1; k <= k_max; ++k) dev = std::max(dev, std::abs(window_condition(trace, params, k) - 0.5));
      report.add("window condition equality, " + tag, dev <= 1e-12, dev, "|value - 1/2| <= 1e-12");
      report.add("W <= M, " + tag, v.w_below_m, 0.0, "all k");
      report.add("bound dominates ODE, " + tag, v.violations == 0, v.worst_ratio,
                 "Y(t) <= bound at " + std::to_string(v.samples) + " samples");
      if (v.exact_extinction >= 0.0)
        report.add("extinction before T*, " + tag, v.exact_extinction <= v.extinction_bound, v.extinction_bound,
                   ">= exact extinction " + fmt(v.exact_extinction));
      json entry = trace.to_json();
      entry["p"] = p;
      entry["H"] = h;
      entry["verification"] = v.to_json();
      traces.push_back(entry);
    }
  }
  // empirical exponent of T*(Y0) for each p > 1
  json exponents = json::object();
  for (double p : doubles(o["p"])) {
    if (p <= 1.0) continue;
    GronwallParams a;
    a.p = p;
    a.kappa = o["kappa"].get<double>();
    a.Y0 = 1.0;
    GronwallParams b = a;
    b.Y0 = 16.0;
    exponents[fmt(p)] = std::log(extinction_time(b) / extinction_time(a)) / std::log(16.0);
  }
  report.fitted["extinction_exponent"] = exponents;
  report.fitted["traces"] = traces;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json(join(out_dir, "gronwall.json"), traces);
  }
  return report;
}

ExperimentReport run_sweep(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report = start_report(config, "sweep");
  const json& o = config.options;
  const std::string axis = o["axis"].get<std::string>();
  const auto values = doubles(o["values"]);
  const std::string child = o["child"].get<std::string>();
  if (values.empty()) throw ConfigError("sweep: values must not be empty");

  if (axis == "epsilon") {
    RunConfig c = config;
    c.experiment = "commutator-study";
    c.options = parse_config({{"experiment", {{"kind", "commutator-study"}}}}).options;
    c.options["epsilon"] = values;
    const ExperimentReport r = run_commutator_study(c, join(out_dir, "commutator"));
    report.criteria = r.criteria;
    report.fitted = r.fitted;
    return report;
  }

  if (axis == "dt" || axis == "N") {
    if (values.size() < 3) throw ConfigError("sweep: refinement axes need at least three values");
    std::vector<State> finals;
    for (double v : values) {
      RunConfig c = config;
      if (axis == "dt") {
        c.time.dt = v;
        c.time.sample_every = std::max(c.time.sample_every, v);
      } else {
        c.domain.modes = static_cast<int>(v);
      }
      const Physics physics = make_physics(c);
      try {
        finals.push_back(simulate(make_initial_state(c, physics), physics, time_grid(c), nullptr));
      } catch (const DivergedRun& e) {
        report.diverged = true;
        report.last_good_time = e.last_good_time();
        report.error = std::string(e.what()) + " (" + axis + " " + fmt(v) + ")";
        return report;
      }
    }
    if (axis == "dt") {
      const auto order_range = doubles(o["order_range"]);
      const double lambda0 = config.lambda0;
      std::vector<double> orders;
      for (std::size_t i = 0; i + 2 < finals.size(); ++i) {
        const double e1 = std::sqrt(plain_energy_norm_sq(finals[i].u - finals[i + 1].u, finals[i].v - finals[i + 1].v, lambda0));
        const double e2 = std::sqrt(
            plain_energy_norm_sq(finals[i + 1].u - finals[i + 2].u, finals[i + 1].v - finals[i + 2].v, lambda0));
        const double order = std::log(e1 / e2) / std::log(values[i] / values[i + 1]);
        orders.push_back(order);
        report.add("time refinement order " + fmt(values[i]) + "/" + fmt(values[i + 1]) + "/" + fmt(values[i + 2]),
                   order >= order_range[0] && order <= order_range[1], order,
                   "in [" + fmt(order_range[0]) + ", " + fmt(order_range[1]) + "]");
      }
      report.fitted["orders"] = orders;
    } else {
      // compare every run with the finest on the coarsest common modes
      std::size_t finest = 0;
      for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[finest]) finest = i;
      const int common = static_cast<int>(*std::min_element(values.begin(), values.end()));
      auto restrict_to = [&](const SpectralField& f) {
        BoxDomain d = f.domain;
        d.modes = common;
        SpectralField out(d);
        for (std::size_t i = 0; i < out.size(); ++i) {
          const auto k = d.mode_index(i);
          std::size_t flat = 0;
          for (int a = 0; a < d.dim; ++a)
            flat = flat * static_cast<std::size_t>(f.domain.modes) + static_cast<std::size_t>(k[static_cast<std::size_t>(a)] - 1);
          out[i] = f[flat];
        }
        return out;
      };
      std::vector<std::pair<double, double>> errs;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i == finest) continue;
        const double e = std::sqrt(plain_energy_norm_sq(restrict_to(finals[i].u) - restrict_to(finals[finest].u),
                                                        restrict_to(finals[i].v) - restrict_to(finals[finest].v),
                                                        config.lambda0));
        errs.emplace_back(values[i], e);
      }
      std::sort(errs.begin(), errs.end());
      bool decreasing = true;
      for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i].second < errs[i - 1].second;
      report.add("spatial refinement converges", decreasing, errs.back().second, "error decreases with N");
      json e = json::array();
      for (const auto& [n, err] : errs) e.push_back({n, err});
      report.fitted["errors"] = e;
    }
    return report;
  }

  if (axis != "gamma" && axis != "seed") throw ConfigError("sweep: unknown axis '" + axis + "'");
  json children = json::array();
  std::vector<bool> outcomes;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig c = config;
    c.experiment = child;
    c.options = parse_config({{"experiment", {{"kind", child}}}}).options;
    if (axis == "gamma") c.gamma = values[i];
    else c.initial.seed = static_cast<std::uint64_t>(values[i]);
    ExperimentReport r;
    try {
      r = run_experiment(c, join(out_dir, axis + "_" + fmt(values[i])));
    } catch (const std::exception& e) {
      r = start_report(c, child);
      r.error = e.what();
    }
    outcomes.push_back(r.passed());
    children.push_back({{"value", values[i]}, {"passed", r.passed()}, {"report", r.to_json()}});
  }
  if (axis == "seed") {
    const bool same = std::all_of(outcomes.begin(), outcomes.end(), [&](bool b) { return b == outcomes.front(); });
    report.add("outcome identical across seeds", same, static_cast<double>(outcomes.size()), "all children agree");
  }
  report.fitted["children"] = children;
  return report;
}

ExperimentReport run_experiment(const RunConfig& config, const std::string& out_dir) {
  ExperimentReport report;
  const std::string& k = config.experiment;
  if (k == "simulate") report = run_simulate(config, out_dir);
  else if (k == "dissipative") report = run_dissipative(config, out_dir);
  else if (k == "regularity") report = run_regularity(config, out_dir);
  else if (k == "twin") report = run_twin(config, out_dir);
  else if (k == "smoothing") report = run_smoothing(config, out_dir);
  else if (k == "fracops-verify") report = run_fracops_verify(config, out_dir);
  else if (k == "commutator-study") report = run_commutator_study(config, out_dir);
  else if (k == "gronwall") report = run_gronwall(config, out_dir);
  else if (k == "sweep") report = run_sweep(config, out_dir);
  else throw ConfigError("unknown experiment kind '" + k + "'");
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json(join(out_dir, "report.json"), report.to_json());
  }
  return report;
}

}  // namespace fracwave
