#pragma once

#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "fracwave/dynamics.hpp"
#include "fracwave/weights.hpp"

namespace fracwave {

// C^1 truncation of r^3: r^3 for |r| <= n, continued linearly beyond.
double psi_n(double r, double n) noexcept;
double psi_n_derivative(double r, double n) noexcept;
// Even companion with Psi_n'(r)^2 = psi_n'(r).
double Psi_n(double r, double n) noexcept;
double Psi_n_derivative(double r, double n) noexcept;

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

/// (phi v, phi^3 psi_n(u)) + gamma (phi A^{1/2} u, phi^3 psi_n(u)); n = infinity uses u^3.
double lyapunov_psi(const State& state, const WeightSpec& spec, double n, const Physics& physics);

// Upper bound for int phi_eps^2 over the box that does not depend on the centre.
double weight_mass_bound(const BoxDomain& domain, double epsilon);

// C_eps large enough that the modified energy dominates half the weighted energy norm:
// max(2 C_F min(|box|, int_{R^d} phi^2), 8 / lambda0).
double modified_energy_constant(const BoxDomain& domain, const Physics& physics, double epsilon);

// Largest admissible delta: min(gamma, lambda0) / 10, never above 1/2.
double max_delta(const Physics& physics) noexcept;
double default_delta(const Physics& physics) noexcept;

/// ||xi||^2 + 2(phi^2, F(u)) - 2(phi g, phi u) + 2 delta (phi v, phi u)
///   + delta gamma ||phi A^{1/4} u||^2 + C_eps (1 + ||phi g||^2).
double modified_energy(const State& state, const WeightSpec& spec, double delta, const Physics& physics);

struct CenterQuantities {
  double energy_norm_sq = 0.0;
  double modified_energy = 0.0;
  double modified_energy_3eps = 0.0;
  double damping = 0.0;          // ||phi A^{1/4} v||^2
  double l12_fourth = 0.0;       // ||phi u||_{L12}^4
  double h32_sq = 0.0;           // ||phi A^{3/4} u||^2
  double utt_sq = 0.0;           // ||A^{-1/4} P(phi u_tt)||^2
  double l10 = 0.0;
  double l6 = 0.0;
  double l12_ball_fourth = 0.0;  // ||u||_{L12(B^2_{x0})}^4
  double lyapunov_cubic = 0.0;
  double lyapunov_truncated = 0.0;
};

struct LedgerRow {
  double t = 0.0;
  UnweightedEnergy energy;
  std::vector<CenterQuantities> centers;

  double sup(double CenterQuantities::*field) const;
};

struct QuantityInfo {
  const char* name;
  double CenterQuantities::*field;
  const char* unit;
  const char* description;
};

const std::vector<QuantityInfo>& ledger_quantities();
const QuantityInfo& ledger_quantity(const std::string& name);

struct LedgerSettings {
  double epsilon = 0.1;
  double delta = 0.05;
  std::vector<Point> centers;
  double ball_radius = 2.0;
};

class LedgerEvaluator {
 public:
  LedgerEvaluator(const BoxDomain& domain, const Physics& physics, LedgerSettings settings);

  // Not const: tracks the running max of |u| that sets the truncation level.
  LedgerRow evaluate(const State& state);

  const LedgerSettings& settings() const noexcept { return settings_; }
  double energy_constant() const noexcept { return c_eps_; }
  double energy_constant_3eps() const noexcept { return c_3eps_; }

 private:
  BoxDomain domain_;
  const Physics* physics_;
  LedgerSettings settings_;
  double c_eps_ = 0.0;
  double c_3eps_ = 0.0;
  double running_max_ = 0.0;
  std::vector<GridField> phi_, phi3_;
  std::vector<std::vector<unsigned char>> ball_;
  GridField source_;
};

struct Ledger {
  LedgerSettings settings;
  double energy_constant = 0.0;
  std::vector<LedgerRow> rows;

  std::vector<std::string> columns() const;
  nlohmann::json manifest() const;
  void write_csv(const std::string& path) const;
};

/// Trapezoid integral of a per-centre quantity over [max(0, t - window), t], sup over centres.
double window_integral(const Ledger& ledger, double CenterQuantities::*field, double t,
                       double window = 1.0);

/// sup over centres of exp(C int_0^T (1 + ||u1||^4_{L12(B2)} + ||u2||^4_{L12(B2)})).
double twin_factor_AT(const Ledger& first, const Ledger& second, double horizon, double constant);

}  // namespace fracwave
