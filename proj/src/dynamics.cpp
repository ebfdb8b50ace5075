#include "fracwave/dynamics.hpp"

#include <cmath>
#include <string>

#include "fracwave/fracops.hpp"

namespace fracwave {

namespace {

struct ModeMatrix {
  double uu, uv, vu, vv;
};

// exp(tau [[0, 1], [-b, -a]]) with alpha = a/2 and omega^2 = |alpha^2 - b|.
ModeMatrix mode_flow(double a, double b, double tau) {
  const double alpha = 0.5 * a;
  const double disc = alpha * alpha - b;
  double ec = 0.0;  // e^{-alpha tau} cos(omega tau) or cosh
  double es = 0.0;  // e^{-alpha tau} sin(omega tau) / omega or sinh / omega
  if (std::abs(a * a - 4.0 * b) < 1e-12) {
    const double e = std::exp(-alpha * tau);
    ec = e;
    es = e * tau;
  } else if (disc < 0.0) {
    const double omega = std::sqrt(-disc);
    const double e = std::exp(-alpha * tau);
    ec = e * std::cos(omega * tau);
    es = e * std::sin(omega * tau) / omega;
  } else {
    const double omega = std::sqrt(disc);
    if (omega * tau < 20.0) {
      const double e = std::exp(-alpha * tau);
      ec = e * std::cosh(omega * tau);
      es = e * std::sinh(omega * tau) / omega;
    } else {
      const double slow = std::exp((-alpha + omega) * tau);
      const double fast = std::exp((-alpha - omega) * tau);
      ec = 0.5 * (slow + fast);
      es = 0.5 * (slow - fast) / omega;
    }
  }
  return {ec + alpha * es, es, -b * es, ec - alpha * es};
}

}  // namespace

void Physics::validate(const BoxDomain& domain) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("physics: gamma must be positive");
  if (!(lambda0 > 0.0)) throw std::invalid_argument("physics: lambda0 must be positive");
  if (has_source()) {
    if (!(source.domain == domain)) throw std::invalid_argument("physics: source lives on a different domain");
    if (!source.is_finite()) throw std::invalid_argument("physics: source must be finite");
  }
}

LinearPropagator::LinearPropagator(const BoxDomain& domain, const Physics& physics, double tau)
    : tau_(tau) {
  const auto mu = laplacian_eigenvalues(domain);
  const std::size_t n = mu.size();
  uu_.resize(n);
  uv_.resize(n);
  vu_.resize(n);
  vv_.resize(n);
  rest_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = physics.gamma * std::sqrt(1.0 + mu[i]);
    const double b = mu[i] + physics.lambda0;
    const ModeMatrix m = mode_flow(a, b, tau);
    uu_[i] = m.uu;
    uv_[i] = m.uv;
    vu_[i] = m.vu;
    vv_[i] = m.vv;
    if (physics.has_source()) rest_[i] = physics.source[i] / b;
  }
}

State LinearPropagator::apply(const State& state) const {
  State out = state;
  for (std::size_t i = 0; i < uu_.size(); ++i) {
    const double y = state.u[i] - rest_[i];
    const double w = state.v[i];
    out.u[i] = rest_[i] + uu_[i] * y + uv_[i] * w;
    out.v[i] = vu_[i] * y + vv_[i] * w;
  }
  out.t = state.t + tau_;
  return out;
}

State linear_halfstep(const State& state, double half_dt, const Physics& physics) {
  if (half_dt == 0.0) return state;
  return LinearPropagator(state.u.domain, physics, half_dt).apply(state);
}

State nonlinear_kick(const State& state, double dt, const Physics& physics) {
  if (physics.nonlinearity.kind == NonlinearityKind::zero) return state;
  GridField g = to_grid(state.u);
  for (double& x : g.values) {
    if (!std::isfinite(x) || std::abs(x) > kDivergenceThreshold)
      throw DivergedRun("diverged: |u| exceeded " + std::to_string(kDivergenceThreshold), state.t);
    x = physics.nonlinearity.value(x);
  }
  const SpectralField force = from_grid(g);
  State out = state;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= dt * force[i];
  return out;
}

State step(const State& state, double dt, const Physics& physics) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const LinearPropagator half(state.u.domain, physics, 0.5 * dt);
  return half.apply(nonlinear_kick(half.apply(state), dt, physics));
}

Integrator::Integrator(const BoxDomain& domain, const Physics& physics, double dt)
    : physics_(&physics), domain_(domain), dt_(dt), half_(domain, physics, 0.5 * dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
  physics.validate(domain);
}

State Integrator::step(const State& state) const {
  State mid = half_.apply(state);
  mid = nonlinear_kick(mid, dt_, *physics_);
  State out = half_.apply(mid);
  out.t = state.t + dt_;
  return out;
}

State Integrator::advance_to(State state, double t_end) const {
  const double slack = 1e-9 * dt_;
  while (state.t + dt_ <= t_end + slack) state = step(state);
  const double rest = t_end - state.t;
  if (rest > slack) {
    state = fracwave::step(state, rest, *physics_);
  }
  state.t = t_end;
  return state;
}

SpectralField pde_residual(const State& state, const Physics& physics) {
  const auto mu = laplacian_eigenvalues(state.u.domain);
  SpectralField out(state.u.domain);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = -physics.gamma * std::sqrt(1.0 + mu[i]) * state.v[i] - (mu[i] + physics.lambda0) * state.u[i];
  if (physics.has_source()) out += physics.source;
  if (physics.nonlinearity.kind != NonlinearityKind::zero) {
    GridField g = to_grid(state.u);
    for (double& x : g.values) x = physics.nonlinearity.value(x);
    out -= from_grid(g);
  }
  return out;
}

UnweightedEnergy unweighted_energy(const State& state, const Physics& physics) {
  const auto mu = laplacian_eigenvalues(state.u.domain);
  const double scale = std::pow(0.5 * state.u.domain.side_length, state.u.domain.dim);
  UnweightedEnergy e;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    e.kinetic += state.v[i] * state.v[i];
    e.gradient += mu[i] * state.u[i] * state.u[i];
    e.mass += state.u[i] * state.u[i];
  }
  e.kinetic *= 0.5 * scale;
  e.gradient *= 0.5 * scale;
  e.mass *= 0.5 * physics.lambda0 * scale;
  if (physics.nonlinearity.kind != NonlinearityKind::zero) {
    GridField g = to_grid(state.u);
    for (double& x : g.values) x = physics.nonlinearity.primitive(x);
    e.potential = grid_integral(g);
  }
  return e;
}

double dissipation_rate(const State& state, const Physics& physics) {
  const double n = l2_norm(apply_spectral(state.v, 0.25));
  return physics.gamma * n * n;
}

State simulate(const State& initial, const Physics& physics, const TimeGrid& time,
               const std::function<void(const State&)>& observer) {
  if (!(time.dt > 0.0) || !(time.end_time >= 0.0) || time.sample_every < 1)
    throw std::invalid_argument("simulate: invalid time grid");
  const Integrator integrator(initial.u.domain, physics, time.dt);
  State state = initial;
  if (observer) observer(state);
  const double slack = 1e-9 * time.dt;
  int since_sample = 0;
  while (state.t + time.dt <= time.end_time + slack) {
    state = integrator.step(state);
    if (++since_sample == time.sample_every) {
      since_sample = 0;
      if (observer) observer(state);
    }
  }
  if (time.end_time - state.t > slack) {
    state = integrator.advance_to(state, time.end_time);
    if (observer) observer(state);
  } else if (since_sample != 0 && observer) {
    observer(state);
  }
  return state;
}

}  // namespace fracwave
