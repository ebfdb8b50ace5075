#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fracwave/grid.hpp"

namespace fracwave {

enum class WeightKind { smooth_exp, bump };

// smooth_exp: phi(x) = exp(-epsilon sqrt(1 + |x - x0|^2)), a weight of
// exponential growth epsilon with C_phi = 1.
// bump: C-infinity cutoff, 1 on the unit ball around x0, 0 outside radius 2.
struct WeightSpec {
  WeightKind kind = WeightKind::smooth_exp;
  double epsilon = 0.0;
  Point center{0.0, 0.0, 0.0};

  static WeightSpec smooth(double epsilon, const Point& center) {
    return {WeightKind::smooth_exp, epsilon, center};
  }
  static WeightSpec bump_at(const Point& center) { return {WeightKind::bump, 0.0, center}; }
};

double weight_eval(const WeightSpec& spec, std::span<const double> x);
GridField weight_on_grid(const WeightSpec& spec, const BoxDomain& domain);

// Closed-form derivatives of the smooth_exp weight.
Point weight_gradient(const WeightSpec& spec, std::span<const double> x);
double weight_laplacian(const WeightSpec& spec, std::span<const double> x);

bool supported_exponent(int p) noexcept;

/// (int phi^p |u|^p)^(1/p) on the padded grid, p in {2,3,4,6,10,12}.
double weighted_lp_norm(const SpectralField& field, const WeightSpec& spec, int p);
double weighted_lp_norm(const GridField& values, const GridField& weight, int p);

// Lattice of centres (j + 1/2) * spacing along every axis inside the box.
std::vector<Point> center_lattice(const BoxDomain& domain, double spacing);

/// max over centres of weighted_lp_norm(field, phi_{epsilon,x0}, p).
double uniformly_local_norm(const SpectralField& field, double epsilon, int p,
                            std::span<const Point> centers);

// Components of the weighted energy norm of xi = (xi1, xi2).
struct EnergyNorms {
  double gradient = 0.0;  // ||phi grad xi1||^2
  double mass = 0.0;      // lambda0 ||phi xi1||^2
  double kinetic = 0.0;   // ||phi xi2||^2

  double total() const noexcept { return gradient + mass + kinetic; }
};

EnergyNorms energy_norm(const SpectralField& xi1, const SpectralField& xi2,
                        const WeightSpec& spec, double lambda0);

struct GrowthAxiomReport {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  bool passed = false;
};

// max over pairs (x, y) of phi(x + y) / (e^{mu |y|} phi(x)); with
// `inverse` the check runs on 1/phi. Passes iff max_ratio <= 1 + 1e-12.
GrowthAxiomReport check_growth_axiom(const WeightSpec& spec, double mu, int dim,
                                     std::span<const std::pair<Point, Point>> pairs,
                                     bool inverse = false);

// int_Omega phi^2(x0) ||u||^2_{L2(B^R_{x0} cap Omega)} dx0, evaluated on the
// grid as int |u(x)|^2 K(x) dx with K(x) = int_{B^R_x cap Omega} phi^2.
double ball_averaged_norm_sq(const SpectralField& field, const WeightSpec& spec, double radius);

}  // namespace fracwave
