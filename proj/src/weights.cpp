#include "fracwave/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracwave {

namespace {

double distance_sq(const Point& c, std::span<const double> x) {
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - c[a];
    r2 += d * d;
  }
  return r2;
}

// exp(-1/t) for t > 0, else 0.
double mollifier_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double bump_profile(double r) {
  const double a = mollifier_tail(2.0 - r);
  const double b = mollifier_tail(r - 1.0);
  return a / (a + b);
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

double weight_eval(const WeightSpec& spec, std::span<const double> x) {
  const double r2 = distance_sq(spec.center, x);
  if (spec.kind == WeightKind::bump) return bump_profile(std::sqrt(r2));
  return std::exp(-spec.epsilon * std::sqrt(1.0 + r2));
}

GridField weight_on_grid(const WeightSpec& spec, const BoxDomain& domain) {
  GridField w(domain);
  const auto dim = static_cast<std::size_t>(domain.dim);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Point p = domain.grid_point(i);
    w.values[i] = weight_eval(spec, std::span<const double>(p.data(), dim));
  }
  return w;
}

Point weight_gradient(const WeightSpec& spec, std::span<const double> x) {
  if (spec.kind != WeightKind::smooth_exp)
    throw std::invalid_argument("weight_gradient: smooth_exp weights only");
  const double rho = std::sqrt(1.0 + distance_sq(spec.center, x));
  const double phi = std::exp(-spec.epsilon * rho);
  Point g{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < x.size(); ++a) g[a] = -spec.epsilon * phi * (x[a] - spec.center[a]) / rho;
  return g;
}

double weight_laplacian(const WeightSpec& spec, std::span<const double> x) {
  if (spec.kind != WeightKind::smooth_exp)
    throw std::invalid_argument("weight_laplacian: smooth_exp weights only");
  const double r2 = distance_sq(spec.center, x);
  const double rho = std::sqrt(1.0 + r2);
  const double phi = std::exp(-spec.epsilon * rho);
  const double eps = spec.epsilon;
  const auto d = static_cast<double>(x.size());
  // grad rho = (x - x0)/rho, lap rho = d/rho - r^2/rho^3
  const double grad_rho_sq = r2 / (rho * rho);
  const double lap_rho = d / rho - r2 / (rho * rho * rho);
  return phi * (eps * eps * grad_rho_sq - eps * lap_rho);
}

bool supported_exponent(int p) noexcept {
  return p == 2 || p == 3 || p == 4 || p == 6 || p == 10 || p == 12;
}

double weighted_lp_norm(const GridField& values, const GridField& weight, int p) {
  if (!supported_exponent(p)) throw std::invalid_argument("weighted_lp_norm: unsupported exponent");
  if (values.size() != weight.size()) throw std::invalid_argument("weighted_lp_norm: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += ipow(std::abs(weight.values[i] * values.values[i]), p);
  return std::pow(s * values.domain.cell_volume(), 1.0 / p);
}

double weighted_lp_norm(const SpectralField& field, const WeightSpec& spec, int p) {
  return weighted_lp_norm(to_grid(field), weight_on_grid(spec, field.domain), p);
}

std::vector<Point> center_lattice(const BoxDomain& domain, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("center_lattice: spacing must be positive");
  const int per_axis = std::max(1, static_cast<int>(std::floor(domain.side_length / spacing + 1e-12)));
  const double offset = 0.5 * (domain.side_length - (per_axis - 1) * spacing);
  std::size_t total = 1;
  for (int a = 0; a < domain.dim; ++a) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> centers(total, Point{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t flat = i;
    for (int a = domain.dim - 1; a >= 0; --a) {
      centers[i][static_cast<std::size_t>(a)] = offset + static_cast<double>(flat % per_axis) * spacing;
      flat /= static_cast<std::size_t>(per_axis);
    }
  }
  return centers;
}

double uniformly_local_norm(const SpectralField& field, double epsilon, int p,
                            std::span<const Point> centers) {
  if (centers.empty()) throw std::invalid_argument("uniformly_local_norm: no centres");
  const GridField u = to_grid(field);
  double best = 0.0;
  for (const Point& c : centers)
    best = std::max(best, weighted_lp_norm(u, weight_on_grid(WeightSpec::smooth(epsilon, c), field.domain), p));
  return best;
}

EnergyNorms energy_norm(const SpectralField& xi1, const SpectralField& xi2,
                        const WeightSpec& spec, double lambda0) {
  const BoxDomain& d = xi1.domain;
  const GridField w = weight_on_grid(spec, d);
  const GridField u = to_grid(xi1);
  const GridField v = to_grid(xi2);
  EnergyNorms out;
  for (int a = 0; a < d.dim; ++a) {
    const GridField du = derivative_to_grid(xi1, a);
    double s = 0.0;
    for (std::size_t i = 0; i < du.size(); ++i) {
      const double t = w.values[i] * du.values[i];
      s += t * t;
    }
    out.gradient += s * d.cell_volume();
  }
  double su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double wu = w.values[i] * u.values[i];
    const double wv = w.values[i] * v.values[i];
    su += wu * wu;
    sv += wv * wv;
  }
  out.mass = lambda0 * su * d.cell_volume();
  out.kinetic = sv * d.cell_volume();
  return out;
}

GrowthAxiomReport check_growth_axiom(const WeightSpec& spec, double mu, int dim,
                                     std::span<const std::pair<Point, Point>> pairs,
                                     bool inverse) {
  if (spec.kind != WeightKind::smooth_exp)
    throw std::invalid_argument("check_growth_axiom: smooth_exp weights only");
  const auto n = static_cast<std::size_t>(dim);
  GrowthAxiomReport report;
  for (const auto& [x, y] : pairs) {
    Point xy{x[0] + y[0], x[1] + y[1], x[2] + y[2]};
    double phi_xy = weight_eval(spec, std::span<const double>(xy.data(), n));
    double phi_x = weight_eval(spec, std::span<const double>(x.data(), n));
    if (inverse) {
      phi_xy = 1.0 / phi_xy;
      phi_x = 1.0 / phi_x;
    }
    double ynorm = 0.0;
    for (std::size_t a = 0; a < n; ++a) ynorm += y[a] * y[a];
    ynorm = std::sqrt(ynorm);
    report.max_ratio = std::max(report.max_ratio, phi_xy / (std::exp(mu * ynorm) * phi_x));
    ++report.pairs;
  }
  report.passed = report.max_ratio <= 1.0 + 1e-12;
  return report;
}

double ball_averaged_norm_sq(const SpectralField& field, const WeightSpec& spec, double radius) {
  const BoxDomain& d = field.domain;
  const GridField u = to_grid(field);
  const GridField w = weight_on_grid(spec, d);
  const int m = d.grid_points();
  const double h = d.spacing();
  const int reach = static_cast<int>(std::floor(radius / h));
  const auto dim = static_cast<std::size_t>(d.dim);

  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w.values[i] * w.values[i];

  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::array<int, 3> idx{0, 0, 0};
    std::size_t flat = i;
    for (int a = d.dim - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(m));
      flat /= static_cast<std::size_t>(m);
    }
    // K(x): sum of phi^2 over grid points within the ball
    double kernel = 0.0;
    std::array<int, 3> off{};
    const std::array<int, 3> hi{reach, dim > 1 ? reach : 0, dim > 2 ? reach : 0};
    for (off[2] = dim > 2 ? -reach : 0; off[2] <= hi[2]; ++off[2]) {
      for (off[1] = dim > 1 ? -reach : 0; off[1] <= hi[1]; ++off[1]) {
        for (off[0] = -reach; off[0] <= hi[0]; ++off[0]) {
          double r2 = 0.0;
          std::size_t j = 0;
          bool inside = true;
          for (std::size_t a = 0; a < dim; ++a) {
            const int q = idx[a] + off[a];
            if (q < 0 || q >= m) {
              inside = false;
              break;
            }
            j = j * static_cast<std::size_t>(m) + static_cast<std::size_t>(q);
            r2 += static_cast<double>(off[a]) * off[a] * h * h;
          }
          if (inside && r2 < radius * radius) kernel += w2[j];
        }
      }
    }
    total += u.values[i] * u.values[i] * kernel * d.cell_volume();
  }
  return total * d.cell_volume();
}

}  // namespace fracwave
