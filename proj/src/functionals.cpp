#include "fracwave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "fracwave/fracops.hpp"

namespace fracwave {

double psi_n(double r, double n) noexcept {
  if (std::abs(r) <= n) return r * r * r;
  return r > 0.0 ? 3.0 * n * n * r - 2.0 * n * n * n : 3.0 * n * n * r + 2.0 * n * n * n;
}

double psi_n_derivative(double r, double n) noexcept {
  return std::abs(r) <= n ? 3.0 * r * r : 3.0 * n * n;
}

double Psi_n(double r, double n) noexcept {
  const double s3 = std::numbers::sqrt3;
  const double a = std::abs(r);
  return a <= n ? 0.5 * s3 * r * r : s3 * n * a - 0.5 * s3 * n * n;
}

double Psi_n_derivative(double r, double n) noexcept {
  const double s3 = std::numbers::sqrt3;
  if (std::abs(r) <= n) return s3 * r;
  return r > 0.0 ? s3 * n : -s3 * n;
}

namespace {

double cube_or_psi(double u, double n) { return std::isinf(n) ? u * u * u : psi_n(u, n); }

// Grid views shared by every centre of one ledger row.
struct RowFields {
  GridField u, v, a14u, a12u, a34u, a14v, primitive, residual;
  std::vector<GridField> du;
  GridField source;
  bool has_source = false;
};

RowFields row_fields(const State& s, const Physics& physics, bool need_residual) {
  RowFields r;
  r.u = to_grid(s.u);
  r.v = to_grid(s.v);
  r.a14u = to_grid(apply_spectral(s.u, 0.25));
  r.a12u = to_grid(apply_spectral(s.u, 0.5));
  r.a34u = to_grid(apply_spectral(s.u, 0.75));
  r.a14v = to_grid(apply_spectral(s.v, 0.25));
  r.primitive = r.u;
  for (double& x : r.primitive.values) x = physics.nonlinearity.primitive(x);
  for (int a = 0; a < s.u.domain.dim; ++a) r.du.push_back(derivative_to_grid(s.u, a));
  if (need_residual) r.residual = to_grid(pde_residual(s, physics));
  r.has_source = physics.has_source();
  if (r.has_source) r.source = to_grid(physics.source);
  return r;
}

struct EnergySums {
  double gradient = 0.0, mass = 0.0, kinetic = 0.0;
  double primitive = 0.0, source_u = 0.0, v_u = 0.0, a14u = 0.0, source_sq = 0.0;
};

EnergySums energy_sums(const RowFields& r, const GridField& phi) {
  EnergySums s;
  const double dv = phi.domain.cell_volume();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double w2 = phi.values[i] * phi.values[i];
    double g2 = 0.0;
    for (const auto& d : r.du) g2 += d.values[i] * d.values[i];
    s.gradient += w2 * g2;
    s.mass += w2 * r.u.values[i] * r.u.values[i];
    s.kinetic += w2 * r.v.values[i] * r.v.values[i];
    s.primitive += w2 * r.primitive.values[i];
    s.v_u += w2 * r.v.values[i] * r.u.values[i];
    s.a14u += w2 * r.a14u.values[i] * r.a14u.values[i];
    if (r.has_source) {
      s.source_u += w2 * r.source.values[i] * r.u.values[i];
      s.source_sq += w2 * r.source.values[i] * r.source.values[i];
    }
  }
  for (double* x : {&s.gradient, &s.mass, &s.kinetic, &s.primitive, &s.source_u, &s.v_u, &s.a14u, &s.source_sq})
    *x *= dv;
  return s;
}

double energy_norm_from(const EnergySums& s, double lambda0) { return s.gradient + lambda0 * s.mass + s.kinetic; }

double modified_from(const EnergySums& s, const Physics& physics, double delta, double constant) {
  return energy_norm_from(s, physics.lambda0) + 2.0 * s.primitive - 2.0 * s.source_u + 2.0 * delta * s.v_u +
         delta * physics.gamma * s.a14u + constant * (1.0 + s.source_sq);
}

void check_delta(double delta, const Physics& physics) {
  if (!(delta >= 0.0 && delta <= max_delta(physics) * (1.0 + 1e-12)))
    throw std::invalid_argument("modified energy: delta must lie in [0, min(gamma, lambda0)/10]");
}

}  // namespace

double lyapunov_psi(const State& state, const WeightSpec& spec, double n, const Physics& physics) {
  if (!(n > 0.0)) throw std::invalid_argument("lyapunov_psi: n must be positive");
  const GridField phi = weight_on_grid(spec, state.u.domain);
  const GridField u = to_grid(state.u);
  const GridField v = to_grid(state.v);
  const GridField a12u = to_grid(apply_spectral(state.u, 0.5));
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w2 = phi.values[i] * phi.values[i];
    sum += w2 * w2 * cube_or_psi(u.values[i], n) * (v.values[i] + physics.gamma * a12u.values[i]);
  }
  return sum * state.u.domain.cell_volume();
}

double weight_mass_bound(const BoxDomain& domain, double epsilon) {
  const double box = domain.volume();
  if (!(epsilon > 0.0)) return box;
  double whole = 0.0;
  switch (domain.dim) {
    case 1:
      whole = 1.0 / epsilon;
      break;
    case 2:
      whole = std::numbers::pi / (2.0 * epsilon * epsilon);
      break;
    default:
      whole = std::numbers::pi / (epsilon * epsilon * epsilon);
      break;
  }
  return std::min(box, whole);
}

double modified_energy_constant(const BoxDomain& domain, const Physics& physics, double epsilon) {
  const double cf = physics.nonlinearity.primitive_lower_constant(physics.lambda0);
  return std::max(2.0 * cf * weight_mass_bound(domain, epsilon), 8.0 / physics.lambda0);
}

double max_delta(const Physics& physics) noexcept {
  return std::min(0.5, std::min(physics.gamma, physics.lambda0) / 10.0);
}

double default_delta(const Physics& physics) noexcept {
  return std::min(physics.gamma, physics.lambda0) / 20.0;
}

double modified_energy(const State& state, const WeightSpec& spec, double delta, const Physics& physics) {
  check_delta(delta, physics);
  const RowFields r = row_fields(state, physics, false);
  const EnergySums s = energy_sums(r, weight_on_grid(spec, state.u.domain));
  return modified_from(s, physics, delta, modified_energy_constant(state.u.domain, physics, spec.epsilon));
}

double LedgerRow::sup(double CenterQuantities::*field) const {
  double best = 0.0;
  for (const auto& c : centers) best = std::max(best, c.*field);
  return best;
}

const std::vector<QuantityInfo>& ledger_quantities() {
  static const std::vector<QuantityInfo> list = {
      {"energy_norm_sq", &CenterQuantities::energy_norm_sq, "energy", "weighted energy norm squared"},
      {"modified_energy", &CenterQuantities::modified_energy, "energy", "modified energy at epsilon"},
      {"modified_energy_3eps", &CenterQuantities::modified_energy_3eps, "energy", "modified energy at 3 epsilon"},
      {"damping", &CenterQuantities::damping, "energy", "weighted ||A^(1/4) u_t||^2"},
      {"l12_fourth", &CenterQuantities::l12_fourth, "length^(1/3)", "weighted ||u||_L12^4"},
      {"h32_sq", &CenterQuantities::h32_sq, "energy", "weighted ||A^(3/4) u||^2"},
      {"utt_sq", &CenterQuantities::utt_sq, "energy", "||A^(-1/4)(phi u_tt)||^2"},
      {"l10", &CenterQuantities::l10, "length^(1/10)", "weighted ||u||_L10"},
      {"l6", &CenterQuantities::l6, "length^(1/6)", "weighted ||u||_L6"},
      {"l12_ball_fourth", &CenterQuantities::l12_ball_fourth, "length^(1/3)", "||u||_L12(B2)^4"},
      {"lyapunov_cubic", &CenterQuantities::lyapunov_cubic, "energy", "multiplier functional with u^3"},
      {"lyapunov_truncated", &CenterQuantities::lyapunov_truncated, "energy",
       "multiplier functional with psi_n, n = 10 max|u|"},
  };
  return list;
}

const QuantityInfo& ledger_quantity(const std::string& name) {
  for (const auto& q : ledger_quantities())
    if (name == q.name) return q;
  throw std::invalid_argument("unknown ledger quantity: " + name);
}

LedgerEvaluator::LedgerEvaluator(const BoxDomain& domain, const Physics& physics, LedgerSettings settings)
    : domain_(domain), physics_(&physics), settings_(std::move(settings)) {
  if (settings_.centers.empty()) throw std::invalid_argument("ledger: no centres");
  check_delta(settings_.delta, physics);
  c_eps_ = modified_energy_constant(domain, physics, settings_.epsilon);
  c_3eps_ = modified_energy_constant(domain, physics, 3.0 * settings_.epsilon);
  const auto dim = static_cast<std::size_t>(domain.dim);
  for (const Point& c : settings_.centers) {
    phi_.push_back(weight_on_grid(WeightSpec::smooth(settings_.epsilon, c), domain));
    phi3_.push_back(weight_on_grid(WeightSpec::smooth(3.0 * settings_.epsilon, c), domain));
    std::vector<unsigned char> inside(domain.grid_count(), 0);
    for (std::size_t i = 0; i < inside.size(); ++i) {
      const Point p = domain.grid_point(i);
      double r2 = 0.0;
      for (std::size_t a = 0; a < dim; ++a) r2 += (p[a] - c[a]) * (p[a] - c[a]);
      inside[i] = r2 <= settings_.ball_radius * settings_.ball_radius;
    }
    ball_.push_back(std::move(inside));
  }
}

LedgerRow LedgerEvaluator::evaluate(const State& state) {
  const Physics& physics = *physics_;
  const RowFields r = row_fields(state, physics, true);
  running_max_ = std::max(running_max_, r.u.max_abs());
  const double n = running_max_ > 0.0 ? 10.0 * running_max_ : 1.0;
  const double dv = domain_.cell_volume();

  LedgerRow row;
  row.t = state.t;
  row.energy = unweighted_energy(state, physics);
  for (std::size_t c = 0; c < phi_.size(); ++c) {
    const GridField& phi = phi_[c];
    CenterQuantities q;
    const EnergySums s = energy_sums(r, phi);
    q.energy_norm_sq = energy_norm_from(s, physics.lambda0);
    q.modified_energy = modified_from(s, physics, settings_.delta, c_eps_);
    q.modified_energy_3eps = modified_from(energy_sums(r, phi3_[c]), physics, settings_.delta, c_3eps_);

    double damping = 0.0, h32 = 0.0, p12 = 0.0, p10 = 0.0, p6 = 0.0, ball = 0.0, cubic = 0.0, trunc = 0.0;
    GridField weighted_utt(domain_);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double w = phi.values[i];
      const double w2 = w * w;
      const double u = r.u.values[i];
      damping += w2 * r.a14v.values[i] * r.a14v.values[i];
      h32 += w2 * r.a34u.values[i] * r.a34u.values[i];
      const double wu2 = w2 * u * u;
      const double wu6 = wu2 * wu2 * wu2;
      p6 += wu6;
      p10 += wu6 * wu2 * wu2;
      p12 += wu6 * wu6;
      if (ball_[c][i]) {
        const double u6 = u * u * u * u * u * u;
        ball += u6 * u6;
      }
      const double drive = r.v.values[i] + physics.gamma * r.a12u.values[i];
      cubic += w2 * w2 * u * u * u * drive;
      trunc += w2 * w2 * psi_n(u, n) * drive;
      weighted_utt.values[i] = w * r.residual.values[i];
    }
    q.damping = damping * dv;
    q.h32_sq = h32 * dv;
    q.l12_fourth = std::pow(p12 * dv, 1.0 / 3.0);
    q.l10 = std::pow(p10 * dv, 0.1);
    q.l6 = std::pow(p6 * dv, 1.0 / 6.0);
    q.l12_ball_fourth = std::pow(ball * dv, 1.0 / 3.0);
    q.lyapunov_cubic = cubic * dv;
    q.lyapunov_truncated = trunc * dv;
    const double utt = l2_norm(apply_spectral(from_grid(weighted_utt), -0.25));
    q.utt_sq = utt * utt;
    row.centers.push_back(q);
  }
  return row;
}

std::vector<std::string> Ledger::columns() const {
  std::vector<std::string> cols = {"t", "kinetic", "gradient", "mass", "potential", "energy"};
  for (const auto& q : ledger_quantities()) cols.push_back(std::string("sup_") + q.name);
  for (std::size_t c = 0; c < settings.centers.size(); ++c)
    for (const auto& q : ledger_quantities()) cols.push_back(std::string(q.name) + "@" + std::to_string(c));
  return cols;
}

nlohmann::json Ledger::manifest() const {
  nlohmann::json cols = nlohmann::json::array();
  auto add = [&](const std::string& name, const std::string& unit, const std::string& desc) {
    cols.push_back({{"name", name}, {"unit", unit}, {"description", desc}});
  };
  add("t", "time", "sample time");
  add("kinetic", "energy", "1/2 ||u_t||^2");
  add("gradient", "energy", "1/2 ||grad u||^2");
  add("mass", "energy", "1/2 lambda0 ||u||^2");
  add("potential", "energy", "int F(u)");
  add("energy", "energy", "unweighted energy");
  for (const auto& q : ledger_quantities())
    add(std::string("sup_") + q.name, q.unit, std::string("sup over centres of ") + q.description);
  for (std::size_t c = 0; c < settings.centers.size(); ++c)
    for (const auto& q : ledger_quantities())
      add(std::string(q.name) + "@" + std::to_string(c), q.unit,
          std::string(q.description) + " at centre " + std::to_string(c));
  nlohmann::json centers = nlohmann::json::array();
  for (const Point& p : settings.centers) centers.push_back(p);
  return {{"columns", cols},
          {"centers", centers},
          {"epsilon", settings.epsilon},
          {"delta", settings.delta},
          {"ball_radius", settings.ball_radius},
          {"energy_constant", energy_constant},
          {"rows", rows.size()}};
}

void Ledger::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  char buf[40];
  auto put = [&](double x, bool first = false) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!first) out << ',';
    out << buf;
  };
  for (const auto& row : rows) {
    put(row.t, true);
    put(row.energy.kinetic);
    put(row.energy.gradient);
    put(row.energy.mass);
    put(row.energy.potential);
    put(row.energy.total());
    for (const auto& q : ledger_quantities()) put(row.sup(q.field));
    for (const auto& c : row.centers)
      for (const auto& q : ledger_quantities()) put(c.*q.field);
    out << '\n';
  }
}

double window_integral(const Ledger& ledger, double CenterQuantities::*field, double t, double window) {
  const double lo = std::max(0.0, t - window);
  const auto& rows = ledger.rows;
  const double tol = 1e-9;
  if (rows.empty() || rows.front().t > lo + tol || rows.back().t < t - tol)
    throw std::invalid_argument("window_integral: ledger does not cover the window");
  const std::size_t ncent = rows.front().centers.size();
  double best = 0.0;
  for (std::size_t c = 0; c < ncent; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double t0 = rows[i].t, t1 = rows[i + 1].t;
      const double a = std::max(t0, lo), b = std::min(t1, t);
      if (b <= a) continue;
      const double y0 = rows[i].centers[c].*field, y1 = rows[i + 1].centers[c].*field;
      auto at = [&](double s) { return y0 + (y1 - y0) * (s - t0) / (t1 - t0); };
      total += 0.5 * (b - a) * (at(a) + at(b));
    }
    best = std::max(best, total);
  }
  return best;
}

double twin_factor_AT(const Ledger& first, const Ledger& second, double horizon, double constant) {
  if (first.settings.centers != second.settings.centers)
    throw std::invalid_argument("twin_factor_AT: ledgers use different centres");
  if (first.rows.size() != second.rows.size())
    throw std::invalid_argument("twin_factor_AT: ledgers sampled differently");
  const double tol = 1e-9;
  if (first.rows.empty() || first.rows.front().t > tol || first.rows.back().t < horizon - tol)
    throw std::invalid_argument("twin_factor_AT: ledgers do not cover [0, T]");
  double best = 1.0;
  for (std::size_t c = 0; c < first.settings.centers.size(); ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < first.rows.size(); ++i) {
      const double t0 = first.rows[i].t, t1 = first.rows[i + 1].t;
      const double b = std::min(t1, horizon);
      if (b <= t0) break;
      auto y = [&](std::size_t j) {
        return 1.0 + first.rows[j].centers[c].l12_ball_fourth + second.rows[j].centers[c].l12_ball_fourth;
      };
      const double y0 = y(i), y1 = y(i + 1);
      const double yb = y0 + (y1 - y0) * (b - t0) / (t1 - t0);
      total += 0.5 * (b - t0) * (y0 + yb);
    }
    best = std::max(best, std::exp(constant * total));
  }
  return best;
}

}  // namespace fracwave
