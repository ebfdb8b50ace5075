#include "fracwave/config.hpp"

#include "fracwave/functionals.hpp"
#include "fracwave/weights.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

namespace fracwave {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Point read_point(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty() || value.size() > 3) throw ConfigError(where + ": expected 1 to 3 coordinates");
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) throw ConfigError(where + ": coordinates must be numbers");
    p[i] = value[i].get<double>();
  }
  return p;
}

json default_options(const std::string& kind) {
  if (kind == "dissipative")
    return {{"amplitudes", {1.0, 2.0, 4.0}}, {"decay_tolerance", 1e-6}, {"plateau_tolerance", 0.1},
            {"inequality_fraction", 0.99},   {"tail_fraction", 0.2},    {"linear_tolerance", 0.2}};
  if (kind == "regularity") return {{"window", 1.0}, {"growth_factor", 10.0}, {"min_end_time", 5.0}};
  if (kind == "twin")
    return {{"perturbations", {1e-6, 5e-7}}, {"probe_time", 5.0},          {"ratio_range", {3.0, 5.33}},
            {"nonlinear_range", {2.0, 8.0}}, {"perturbation_seed", 99}};
  if (kind == "smoothing") return {{"levels", 8}, {"ratio_limit", 3.0}};
  if (kind == "fracops-verify")
    return {{"thetas", {0.1, 0.25, 0.5, 0.75}},
            {"modes", 64},
            {"fields", 5},
            {"nodes", 400},
            {"lambda_min", 1e-8},
            {"lambda_max", 50.0},
            {"tolerance", 1e-6},
            {"seed", 11},
            {"triples", 20},
            {"contraction_epsilons", {0.2, 0.1, 0.05}},
            {"contraction_lambdas", {0.1, 1.0, 5.0}},
            {"contraction_fields", 20}};
  if (kind == "commutator-study")
    return {{"theta", 0.25},        {"s", {0.0, 0.5}}, {"epsilon", {0.2, 0.1, 0.05, 0.025}}, {"ensemble", 10},
            {"decay", 1.5},         {"seed", 7},       {"slope_tolerance", 0.1},            {"bump_ratio_limit", 3.0},
            {"resolution_tolerance", 0.02}};
  if (kind == "gronwall")
    return {{"p", {1.5, 2.0, 3.0}}, {"H", {0.0, 1.0}}, {"kappa", 1.0}, {"Y0", 1.0},
            {"L", 0.0},              {"lambda", 1.0},   {"k_max", 30},   {"samples", 100}};
  if (kind == "sweep")
    return {{"axis", "dt"}, {"values", {4e-3, 2e-3, 1e-3}}, {"child", "simulate"}, {"order_range", {1.7, 2.3}}};
  return json::object();
}

bool same_shape(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"simulate",       "dissipative",      "regularity",
                                                 "twin",           "smoothing",        "fracops-verify",
                                                 "commutator-study", "gronwall",       "sweep"};
  return kinds;
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  reject_unknown(doc, "config", {"domain", "physics", "initial_data", "time", "weights", "experiment"});

  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    reject_unknown(d, "domain", {"dim", "side_length", "modes", "pad_factor"});
    read(d, "dim", c.domain.dim, "domain");
    read(d, "side_length", c.domain.side_length, "domain");
    read(d, "modes", c.domain.modes, "domain");
    read(d, "pad_factor", c.domain.pad_factor, "domain");
  }
  try {
    c.domain.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }

  if (doc.contains("physics")) {
    const json& p = doc["physics"];
    reject_unknown(p, "physics", {"gamma", "lambda0", "nonlinearity", "source"});
    read(p, "gamma", c.gamma, "physics");
    read(p, "lambda0", c.lambda0, "physics");
    if (p.contains("nonlinearity")) {
      const json& n = p["nonlinearity"];
      reject_unknown(n, "physics.nonlinearity", {"kind", "cubic", "linear"});
      std::string kind = c.nonlinearity.name();
      read(n, "kind", kind, "physics.nonlinearity");
      try {
        c.nonlinearity.kind = parse_nonlinearity_kind(kind);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("physics.nonlinearity: ") + e.what());
      }
      read(n, "cubic", c.nonlinearity.cubic, "physics.nonlinearity");
      read(n, "linear", c.nonlinearity.linear, "physics.nonlinearity");
    }
    if (p.contains("source")) {
      const json& s = p["source"];
      reject_unknown(s, "physics.source", {"kind", "amplitude", "width", "center"});
      read(s, "kind", c.source.kind, "physics.source");
      read(s, "amplitude", c.source.amplitude, "physics.source");
      read(s, "width", c.source.width, "physics.source");
      if (s.contains("center") && !s["center"].is_null()) c.source.center = read_point(s["center"], "physics.source.center");
    }
  }
  if (!(c.gamma > 0.0)) throw ConfigError("physics.gamma must be positive");
  if (!(c.lambda0 > 0.0)) throw ConfigError("physics.lambda0 must be positive");
  if (c.source.kind != "none" && c.source.kind != "gaussian") throw ConfigError("physics.source.kind must be none or gaussian");
  if (!(c.source.width > 0.0)) throw ConfigError("physics.source.width must be positive");
  if (c.nonlinearity.kind != NonlinearityKind::quintic && (c.nonlinearity.cubic != 0.0 || c.nonlinearity.linear != 0.0))
    throw ConfigError("physics.nonlinearity: coefficients apply to the quintic kind only");

  if (doc.contains("initial_data")) {
    const json& i = doc["initial_data"];
    reject_unknown(i, "initial_data", {"kind", "seed", "r_u", "r_v", "target_energy", "amplitude", "mode"});
    read(i, "kind", c.initial.kind, "initial_data");
    read(i, "seed", c.initial.seed, "initial_data");
    read(i, "r_u", c.initial.r_u, "initial_data");
    read(i, "r_v", c.initial.r_v, "initial_data");
    read(i, "target_energy", c.initial.target_energy, "initial_data");
    read(i, "amplitude", c.initial.amplitude, "initial_data");
    if (i.contains("mode")) {
      const json& m = i["mode"];
      if (!m.is_array() || m.empty() || m.size() > 3) throw ConfigError("initial_data.mode: expected 1 to 3 integers");
      c.initial.mode = {1, 1, 1};
      for (std::size_t a = 0; a < m.size(); ++a) c.initial.mode[a] = m[a].get<int>();
    }
  }
  if (c.initial.kind != "random" && c.initial.kind != "zero" && c.initial.kind != "mode")
    throw ConfigError("initial_data.kind must be random, zero or mode");
  if (!(c.initial.target_energy >= 0.0)) throw ConfigError("initial_data.target_energy must be >= 0");
  for (int a = 0; a < c.domain.dim; ++a)
    if (c.initial.mode[static_cast<std::size_t>(a)] < 1 || c.initial.mode[static_cast<std::size_t>(a)] > c.domain.modes)
      throw ConfigError("initial_data.mode out of range");

  if (doc.contains("time")) {
    const json& t = doc["time"];
    reject_unknown(t, "time", {"dt", "end_time", "sample_every", "snapshot_every"});
    read(t, "dt", c.time.dt, "time");
    read(t, "end_time", c.time.end_time, "time");
    read(t, "sample_every", c.time.sample_every, "time");
    read(t, "snapshot_every", c.time.snapshot_every, "time");
  }
  if (!(c.time.dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(c.time.end_time >= 0.0)) throw ConfigError("time.end_time must be >= 0");
  if (!(c.time.sample_every >= c.time.dt)) throw ConfigError("time.sample_every must be >= dt");
  if (!(c.time.snapshot_every >= 0.0)) throw ConfigError("time.snapshot_every must be >= 0");

  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    reject_unknown(w, "weights", {"epsilon", "center_spacing", "delta", "at_constant", "ball_radius"});
    read(w, "epsilon", c.weights.epsilon, "weights");
    read(w, "center_spacing", c.weights.center_spacing, "weights");
    if (w.contains("delta") && !w["delta"].is_null()) read(w, "delta", c.weights.delta, "weights");
    read(w, "at_constant", c.weights.at_constant, "weights");
    read(w, "ball_radius", c.weights.ball_radius, "weights");
  }
  if (c.weights.epsilon.empty()) throw ConfigError("weights.epsilon must not be empty");
  for (double e : c.weights.epsilon)
    if (!(e >= 0.0)) throw ConfigError("weights.epsilon entries must be >= 0");
  if (!(c.weights.center_spacing > 0.0)) throw ConfigError("weights.center_spacing must be positive");
  if (c.weights.delta >= 0.0 && c.weights.delta > std::min(0.5, std::min(c.gamma, c.lambda0) / 10.0) * (1.0 + 1e-12))
    throw ConfigError("weights.delta exceeds min(gamma, lambda0)/10");

  if (doc.contains("experiment")) {
    const json& e = doc["experiment"];
    reject_unknown(e, "experiment", {"kind", "options"});
    read(e, "kind", c.experiment, "experiment");
    bool known = false;
    for (const auto& k : experiment_kinds()) known = known || k == c.experiment;
    if (!known) throw ConfigError("experiment.kind: unknown kind '" + c.experiment + "'");
    c.options = default_options(c.experiment);
    if (e.contains("options")) {
      const json& o = e["options"];
      if (!o.is_object()) throw ConfigError("experiment.options: expected an object");
      for (const auto& [key, value] : o.items()) {
        if (!c.options.contains(key)) throw ConfigError("experiment.options: unknown key '" + key + "'");
        if (!same_shape(c.options[key], value)) throw ConfigError("experiment.options." + key + ": wrong type");
        c.options[key] = value;
      }
    }
  } else {
    c.options = default_options(c.experiment);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json source{{"kind", c.source.kind}, {"amplitude", c.source.amplitude}, {"width", c.source.width}};
  source["center"] = c.source.center ? json(*c.source.center) : json(nullptr);
  return {
      {"domain",
       {{"dim", c.domain.dim}, {"side_length", c.domain.side_length}, {"modes", c.domain.modes}, {"pad_factor", c.domain.pad_factor}}},
      {"physics",
       {{"gamma", c.gamma},
        {"lambda0", c.lambda0},
        {"nonlinearity", {{"kind", c.nonlinearity.name()}, {"cubic", c.nonlinearity.cubic}, {"linear", c.nonlinearity.linear}}},
        {"source", source}}},
      {"initial_data",
       {{"kind", c.initial.kind},
        {"seed", c.initial.seed},
        {"r_u", c.initial.r_u},
        {"r_v", c.initial.r_v},
        {"target_energy", c.initial.target_energy},
        {"amplitude", c.initial.amplitude},
        {"mode", c.initial.mode}}},
      {"time",
       {{"dt", c.time.dt}, {"end_time", c.time.end_time}, {"sample_every", c.time.sample_every}, {"snapshot_every", c.time.snapshot_every}}},
      {"weights",
       {{"epsilon", c.weights.epsilon},
        {"center_spacing", c.weights.center_spacing},
        {"delta", c.weights.delta >= 0.0 ? json(c.weights.delta) : json(nullptr)},
        {"at_constant", c.weights.at_constant},
        {"ball_radius", c.weights.ball_radius}}},
      {"experiment", {{"kind", c.experiment}, {"options", c.options}}},
  };
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SpectralField random_field(const BoxDomain& domain, double decay, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(domain);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = domain.mode_index(i);
    double k2 = 0.0;
    for (int a = 0; a < domain.dim; ++a) k2 += static_cast<double>(k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)]);
    f[i] = std::pow(k2, -0.5 * decay) * normal(rng);
  }
  return f;
}

double plain_energy_norm_sq(const SpectralField& u, const SpectralField& v, double lambda0) {
  const auto mu = laplacian_eigenvalues(u.domain);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += (mu[i] + lambda0) * u[i] * u[i] + v[i] * v[i];
  return s * std::pow(0.5 * u.domain.side_length, u.domain.dim);
}

SpectralField make_source(const RunConfig& c) {
  if (c.source.kind == "none") return {};
  Point center{};
  for (int a = 0; a < c.domain.dim; ++a) center[static_cast<std::size_t>(a)] = 0.5 * c.domain.side_length;
  if (c.source.center) center = *c.source.center;
  GridField g(c.domain);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = c.domain.grid_point(i);
    double r2 = 0.0;
    for (int a = 0; a < c.domain.dim; ++a) {
      const double d = p[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
      r2 += d * d;
    }
    g.values[i] = c.source.amplitude * std::exp(-0.5 * r2 / (c.source.width * c.source.width));
  }
  return from_grid(g);
}

Physics make_physics(const RunConfig& c) {
  Physics p;
  p.gamma = c.gamma;
  p.lambda0 = c.lambda0;
  p.nonlinearity = c.nonlinearity;
  p.source = make_source(c);
  return p;
}

State make_initial_state(const RunConfig& c, const Physics& physics) {
  State s{SpectralField(c.domain), SpectralField(c.domain), 0.0};
  if (c.initial.kind == "zero") return s;
  if (c.initial.kind == "mode") {
    s.u = single_mode(c.domain, c.initial.mode, c.initial.amplitude);
    return s;
  }
  s.u = random_field(c.domain, c.initial.r_u, c.initial.seed);
  s.v = random_field(c.domain, c.initial.r_v, c.initial.seed ^ 0x9e3779b97f4a7c15ULL);
  const double e = plain_energy_norm_sq(s.u, s.v, physics.lambda0);
  const double scale = e > 0.0 ? c.initial.amplitude * std::sqrt(c.initial.target_energy / e) : 0.0;
  s.u *= scale;
  s.v *= scale;
  return s;
}

std::vector<Point> ledger_centers(const RunConfig& c) { return center_lattice(c.domain, c.weights.center_spacing); }

double resolved_delta(const RunConfig& c, const Physics& physics) {
  return c.weights.delta >= 0.0 ? c.weights.delta : default_delta(physics);
}

TimeGrid time_grid(const RunConfig& c) {
  TimeGrid g;
  g.dt = c.time.dt;
  g.end_time = c.time.end_time;
  g.sample_every = std::max(1, static_cast<int>(std::lround(c.time.sample_every / c.time.dt)));
  return g;
}

}  // namespace fracwave
