#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "fracwave/grid.hpp"
#include "fracwave/nonlinearity.hpp"

namespace fracwave {

// u_tt + gamma A^{1/2} u_t - Laplacian u + lambda0 u + f(u) = g, A = -Laplacian + 1.
struct Physics {
  double gamma = 1.0;
  double lambda0 = 1.0;
  NonlinearitySpec nonlinearity;
  // Empty coefficients mean g = 0.
  SpectralField source;

  bool has_source() const noexcept { return !source.coefficients.empty(); }
  void validate(const BoxDomain& domain) const;
};

struct State {
  SpectralField u;
  SpectralField v;
  double t = 0.0;
};

class DivergedRun : public std::runtime_error {
 public:
  DivergedRun(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

// Grid values of |u| above this abort the run.
inline constexpr double kDivergenceThreshold = 1e6;

// Exact flow over time tau of the linear part: per mode k,
// c'' + a c' + b c = g_k with a = gamma sqrt(1 + mu_k), b = mu_k + lambda0.
class LinearPropagator {
 public:
  LinearPropagator(const BoxDomain& domain, const Physics& physics, double tau);

  State apply(const State& state) const;
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
  std::vector<double> uu_, uv_, vu_, vv_;
  std::vector<double> rest_;  // g_k / b
};

State linear_halfstep(const State& state, double half_dt, const Physics& physics);

/// v <- v - dt P f(u) on the padded grid; throws DivergedRun on overflow.
State nonlinear_kick(const State& state, double dt, const Physics& physics);

/// Strang splitting: half linear step, kick, half linear step.
State step(const State& state, double dt, const Physics& physics);

// Caches the half-step propagator for repeated steps of one size.
class Integrator {
 public:
  Integrator(const BoxDomain& domain, const Physics& physics, double dt);

  State step(const State& state) const;
  // Steps of size dt, then one shorter step to land exactly on t_end.
  State advance_to(State state, double t_end) const;
  double dt() const noexcept { return dt_; }

 private:
  const Physics* physics_;
  BoxDomain domain_;
  double dt_;
  LinearPropagator half_;
};

/// u_tt recovered from the equation: g - gamma A^{1/2} v + Laplacian u - lambda0 u - P f(u).
SpectralField pde_residual(const State& state, const Physics& physics);

struct UnweightedEnergy {
  double kinetic = 0.0;    // 1/2 ||v||^2
  double gradient = 0.0;   // 1/2 ||grad u||^2
  double mass = 0.0;       // 1/2 lambda0 ||u||^2
  double potential = 0.0;  // int F(u)

  double total() const noexcept { return kinetic + gradient + mass + potential; }
};

UnweightedEnergy unweighted_energy(const State& state, const Physics& physics);

/// gamma ||A^{1/4} v||^2, the instantaneous dissipation rate when g = 0.
double dissipation_rate(const State& state, const Physics& physics);

struct TimeGrid {
  double dt = 1e-3;
  double end_time = 1.0;
  int sample_every = 50;  // steps between observer calls
};

// Calls observer at t = 0 and after every sample_every steps; the last
// sample lands on end_time. Returns the final state.
State simulate(const State& initial, const Physics& physics, const TimeGrid& time,
               const std::function<void(const State&)>& observer);

}  // namespace fracwave
