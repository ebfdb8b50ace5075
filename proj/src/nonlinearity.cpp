#include "fracwave/nonlinearity.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracwave {

namespace {

// sup of |Si(x)| / 5 over the reals, attained at x = pi; rounded up.
constexpr double kSin5PrimitiveBound = 0.3704;

double pow5(double u) {
  const double u2 = u * u;
  return u2 * u2 * u;
}

// min over w >= 0 of c3 w^3 + c2 w^2 + c1 w (value 0 at w = 0).
double cubic_min_nonneg(double c3, double c2, double c1) {
  auto p = [&](double w) { return ((c3 * w + c2) * w + c1) * w; };
  double best = 0.0;
  // p'(w) = 3 c3 w^2 + 2 c2 w + c1
  const double qa = 3.0 * c3, qb = 2.0 * c2, qc = c1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double w : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)})
      if (w > 0.0) best = std::min(best, p(w));
  }
  return best;
}

}  // namespace

double NonlinearitySpec::value(double u) const noexcept {
  switch (kind) {
    case NonlinearityKind::quintic: {
      const double u2 = u * u;
      return u * ((u2 + cubic) * u2 + linear);
    }
    case NonlinearityKind::sin5:
      return u == 0.0 ? 0.0 : std::sin(pow5(u)) / u;
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

double NonlinearitySpec::derivative(double u) const noexcept {
  switch (kind) {
    case NonlinearityKind::quintic: {
      const double u2 = u * u;
      return 5.0 * u2 * u2 + 3.0 * cubic * u2 + linear;
    }
    case NonlinearityKind::sin5: {
      if (u == 0.0) return 0.0;
      const double x = pow5(u);
      // 5 u^3 cos(u^5) - sin(u^5) / u^2
      return 5.0 * u * u * u * std::cos(x) - std::sin(x) / (u * u);
    }
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

double NonlinearitySpec::primitive(double u) const noexcept {
  switch (kind) {
    case NonlinearityKind::quintic: {
      const double u2 = u * u;
      return u2 * (u2 * u2 / 6.0 + cubic * u2 / 4.0 + linear / 2.0);
    }
    case NonlinearityKind::sin5:
      return gsl_sf_Si(pow5(u)) / 5.0;
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

double NonlinearitySpec::dissipativity_bound() const {
  switch (kind) {
    case NonlinearityKind::quintic:
      // f(s) s = w^3 + cubic w^2 + linear w with w = s^2
      return -cubic_min_nonneg(1.0, cubic, linear);
    case NonlinearityKind::sin5:
      return 1.0;
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

double NonlinearitySpec::growth_constant() const noexcept {
  switch (kind) {
    case NonlinearityKind::quintic:
      return 5.0 + 3.0 * std::abs(cubic) + std::abs(linear);
    case NonlinearityKind::sin5:
      return 6.0;
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

double NonlinearitySpec::primitive_lower_constant(double lambda0) const {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("primitive_lower_constant: lambda0 must be positive");
  switch (kind) {
    case NonlinearityKind::quintic:
      // F(u) + lambda0 u^2 / 8 = w^3/6 + cubic w^2/4 + (linear/2 + lambda0/8) w
      return -cubic_min_nonneg(1.0 / 6.0, cubic / 4.0, linear / 2.0 + lambda0 / 8.0);
    case NonlinearityKind::sin5: {
      // beyond u_guard the quadratic term alone dominates |F|
      const double guard = std::sqrt(8.0 * kSin5PrimitiveBound / lambda0);
      const int samples = 200000;
      const double h = guard / samples;
      double lowest = 0.0;
      for (int i = 0; i <= samples; ++i) {
        const double u = -guard + 2.0 * i * h;
        lowest = std::min(lowest, primitive(u) + lambda0 * u * u / 8.0);
      }
      // |f(u)| <= 1, so the sampled function has slope <= 1 + lambda0 guard / 4
      const double slope = 1.0 + lambda0 * guard / 4.0;
      return lowest < 0.0 ? -lowest + slope * h : 0.0;
    }
    case NonlinearityKind::zero:
      break;
  }
  return 0.0;
}

std::string NonlinearitySpec::name() const {
  switch (kind) {
    case NonlinearityKind::quintic:
      return "quintic";
    case NonlinearityKind::sin5:
      return "sin5";
    case NonlinearityKind::zero:
      break;
  }
  return "zero";
}

NonlinearityKind parse_nonlinearity_kind(const std::string& name) {
  if (name == "zero") return NonlinearityKind::zero;
  if (name == "quintic") return NonlinearityKind::quintic;
  if (name == "sin5") return NonlinearityKind::sin5;
  throw std::invalid_argument("unknown nonlinearity kind: " + name);
}

}  // namespace fracwave
