#pragma once

#include <string>

namespace fracwave {

enum class NonlinearityKind { zero, quintic, sin5 };

// quintic: f(u) = u^5 + cubic u^3 + linear u
// sin5:    f(u) = sin(u^5) / u, f(0) = 0
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::zero;
  double cubic = 0.0;
  double linear = 0.0;

  static NonlinearitySpec zero() { return {}; }
  static NonlinearitySpec quintic(double cubic = 0.0, double linear = 0.0) {
    return {NonlinearityKind::quintic, cubic, linear};
  }
  static NonlinearitySpec sin5() { return {NonlinearityKind::sin5, 0.0, 0.0}; }

  double value(double u) const noexcept;
  double derivative(double u) const noexcept;
  /// F(u) = int_0^u f.
  double primitive(double u) const noexcept;

  // M with f(s) s >= -M for all s.
  double dissipativity_bound() const;
  // C with |f'(s)| <= C (1 + s^4).
  double growth_constant() const noexcept;
  // Smallest C >= 0 with F(u) >= -(lambda0 / 8) u^2 - C for all u.
  double primitive_lower_constant(double lambda0) const;

  std::string name() const;
};

NonlinearityKind parse_nonlinearity_kind(const std::string& name);

}  // namespace fracwave
