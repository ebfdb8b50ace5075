#pragma once

#include "fracwave/grid.hpp"

namespace fracwave {

// A = -Laplacian + 1 with Dirichlet data. Two independent routes to A^theta:
// the diagonal symbol (1 + mu_k)^theta and the heat-semigroup integral
//   A^theta u = 1/Gamma(-theta) int_0^inf s^(-theta-1) (e^{-A s} - 1) u ds.

/// c_k -> (1 + mu_k)^theta c_k, |theta| <= 1.
SpectralField apply_spectral(const SpectralField& field, double theta);

/// c_k -> exp(-(1 + mu_k) lambda) c_k, lambda >= 0.
SpectralField heat_semigroup(const SpectralField& field, double lambda);

struct QuadratureSpec {
  int nodes = 400;
  double lambda_min = 1e-8;
  double lambda_max = 50.0;

  void validate() const;
};

/// 1 / Gamma(-theta) for theta in (0, 1), via Gamma(-theta) = Gamma(1-theta)/(-theta).
double gamma_reciprocal(double theta);

// Quadrature approximation of a^theta (a >= 1) from the semigroup integral.
// Nodes are log-uniform on [lambda_min, lambda_max]; the trapezoid sum in
// s = log(lambda) carries the first Euler-Maclaurin endpoint correction, the
// piece below lambda_min is summed from the Taylor series of e^{-a s} - 1 and
// the piece above lambda_max is integrated in closed form (up to a term of
// size e^{-a lambda_max}).
double quadrature_symbol(double a, double theta, const QuadratureSpec& quad);

/// theta in (0, 1) only.
SpectralField apply_quadrature(const SpectralField& field, double theta,
                               const QuadratureSpec& quad = {});

}  // namespace fracwave
