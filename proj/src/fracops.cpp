#include "fracwave/fracops.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwave {

SpectralField apply_spectral(const SpectralField& field, double theta) {
  if (!(std::abs(theta) <= 1.0)) throw std::invalid_argument("apply_spectral: |theta| must be <= 1");
  if (theta == 0.0) return field;
  return apply_symbol(field, [theta](double mu) { return std::pow(1.0 + mu, theta); });
}

SpectralField heat_semigroup(const SpectralField& field, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("heat_semigroup: lambda must be >= 0");
  return apply_symbol(field, [lambda](double mu) { return std::exp(-(1.0 + mu) * lambda); });
}

void QuadratureSpec::validate() const {
  if (nodes < 2) throw std::invalid_argument("quadrature: need at least 2 nodes");
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || !std::isfinite(lambda_max))
    throw std::invalid_argument("quadrature: need 0 < lambda_min < lambda_max");
}

double gamma_reciprocal(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("gamma_reciprocal: theta must lie in (0, 1)");
  return -theta / std::tgamma(1.0 - theta);
}

double quadrature_symbol(double a, double theta, const QuadratureSpec& quad) {
  const double s0 = std::log(quad.lambda_min);
  const double s1 = std::log(quad.lambda_max);
  const double h = (s1 - s0) / (quad.nodes - 1);

  // integrand in s = log(lambda): lambda^-theta * (e^{-a lambda} - 1)
  auto f = [&](double s) {
    const double lam = std::exp(s);
    return std::exp(-theta * s) * std::expm1(-a * lam);
  };
  auto df = [&](double s) {
    const double lam = std::exp(s);
    return -theta * f(s) - std::exp(-theta * s) * a * lam * std::exp(-a * lam);
  };

  double sum = 0.0;
  for (int i = 1; i + 1 < quad.nodes; ++i) sum += f(s0 + i * h);
  sum += 0.5 * (f(s0) + f(s1));
  double integral = h * sum - h * h / 12.0 * (df(s1) - df(s0));

  // (0, lambda_min): sum_n (-a)^n lambda_min^(n-theta) / (n! (n-theta))
  {
    const double x = -a * quad.lambda_min;
    double power = std::pow(quad.lambda_min, -theta);  // lambda_min^-theta x^n / n!
    double tail = 0.0;
    for (int n = 1; n < 400; ++n) {
      power *= x / n;
      const double term = power / (n - theta);
      tail += term;
      if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
    }
    integral += tail;
  }
  // (lambda_max, inf): -lambda_max^-theta / theta + O(e^{-a lambda_max})
  integral += -std::pow(quad.lambda_max, -theta) / theta +
              std::exp(-a * quad.lambda_max) * std::pow(quad.lambda_max, -theta - 1.0) / a;

  return gamma_reciprocal(theta) * integral;
}

SpectralField apply_quadrature(const SpectralField& field, double theta,
                               const QuadratureSpec& quad) {
  quad.validate();
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("apply_quadrature: theta must lie in (0, 1)");
  return apply_symbol(field, [&](double mu) { return quadrature_symbol(1.0 + mu, theta, quad); });
}

}  // namespace fracwave
