#include "fracwave/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracwave {

namespace {

double root(double y, double p) {
  if (y <= 0.0) return 0.0;
  if (p == 1.0) return y;
  if (p == 2.0) return std::sqrt(y);
  if (p == 3.0) return std::cbrt(y);
  if (p == 1.5) {
    const double c = std::cbrt(y);
    return c * c;
  }
  return std::pow(y, 1.0 / p);
}

// Integration horizon beyond which an unsettled ODE is reported as an error.
constexpr double kMaxOdeHorizon = 1e4;
// Relative change per stored interval below which Y is taken to be at rest.
constexpr double kRestTolerance = 1e-10;

}  // namespace

double GronwallParams::window_constant() const noexcept {
  return L > 0.0 ? L : std::pow(2.0, p * (p - 1.0)) + 1.0;
}

void GronwallParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("gronwall: kappa must be positive");
  if (!(H >= 0.0)) throw std::invalid_argument("gronwall: H must be >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("gronwall: p must be >= 1");
  if (!(lambda > 0.0 && lambda <= Lambda)) throw std::invalid_argument("gronwall: need 0 < lambda <= Lambda");
  if (!(window_constant() >= 1.0)) throw std::invalid_argument("gronwall: L must be >= 1");
  if (!(Y0 >= 0.0)) throw std::invalid_argument("gronwall: Y0 must be >= 0");
}

GronwallTrace build_trace(const GronwallParams& params, int k_max) {
  params.validate();
  if (k_max < 1) throw std::invalid_argument("build_trace: k_max must be >= 1");
  const double p = params.p;
  const double lk = params.lambda * params.kappa;
  const double L = params.window_constant();
  const double c = std::pow(4.0, p) * L / lk;  // T_k - T_{k-1} = c M(k-1)^{p(p-1)}
  const double source = 4.0 * std::pow(params.H * (L + 1.0) / lk, 1.0 / p);
  const double head = 2.0 * std::pow(params.Y0, 1.0 / p);

  double m0 = 0.0;
  if (p == 1.0) {
    m0 = head / std::pow(lk * c, 1.0 / p) + 2.0 * source;
  } else if (params.H == 0.0) {
    if (params.Y0 == 0.0) throw std::invalid_argument("build_trace: Y0 = 0 with H = 0 has no windows");
    m0 = std::pow(head / std::pow(lk * c, 1.0 / p), 1.0 / p);
  } else {
    // M - head (lk c M^{p(p-1)})^{-1/p} - 2 source is increasing in M
    auto g = [&](double m) { return m - head * std::pow(lk * c, -1.0 / p) * std::pow(m, -(p - 1.0)) - 2.0 * source; };
    double lo = 2.0 * source, hi = std::max(1.0, 2.0 * lo);
    if (params.Y0 == 0.0) {
      m0 = lo;
    } else {
      while (g(hi) < 0.0) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("build_trace: bootstrap did not bracket");
      }
      for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
      }
      m0 = 0.5 * (lo + hi);
    }
  }

  GronwallTrace trace;
  trace.T.push_back(0.0);
  trace.dT.push_back(0.0);
  trace.M.push_back(m0);
  for (int k = 1; k <= k_max; ++k) {
    const double inc = c * std::pow(trace.M[static_cast<std::size_t>(k - 1)], p * (p - 1.0));
    trace.dT.push_back(inc);
    trace.T.push_back(trace.T.back() + inc);
    trace.M.push_back(0.5 * trace.M.back() + source);
  }
  return trace;
}

double window_condition(const GronwallTrace& trace, const GronwallParams& params, int k) {
  const auto i = static_cast<std::size_t>(k);
  if (k < 1 || i >= trace.dT.size()) throw std::out_of_range("window_condition: k outside trace");
  const double lk = params.lambda * params.kappa;
  return 2.0 * std::pow(params.window_constant() / lk, 1.0 / params.p) * std::pow(trace.dT[i], -1.0 / params.p) *
         std::pow(trace.M[i - 1], params.p - 1.0);
}

double decay_bound(const GronwallTrace& trace, const GronwallParams& params, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("decay_bound: t must be >= 0");
  if (t > trace.T.back()) throw std::out_of_range("decay_bound: t beyond trace coverage");
  const double p = params.p;
  const double h = params.H;
  if (t <= trace.T[1]) {
    const double r = 2.0 * root(params.Y0, p) + 2.0 * std::pow(h * t, 1.0 / p);
    return std::pow(r, p);
  }
  // t in [T_k, T_{k+1}], k >= 1
  const auto it = std::upper_bound(trace.T.begin(), trace.T.end(), t);
  const auto k = static_cast<std::size_t>(std::distance(trace.T.begin(), it)) - 1;
  const double r = 2.0 * std::pow(trace.M[k - 1], p) + 2.0 * std::pow(h * (t - trace.T[k - 1]), 1.0 / p);
  return std::pow(r, p);
}

double extinction_time(const GronwallParams& params) {
  params.validate();
  if (!(params.p > 1.0)) throw std::invalid_argument("extinction_time: requires p > 1");
  if (params.H != 0.0) throw std::invalid_argument("extinction_time: requires H = 0");
  if (params.Y0 == 0.0) return 0.0;
  const GronwallTrace trace = build_trace(params, 1);
  // increments shrink by 2^{-p(p-1)} per step
  return trace.dT[1] / (1.0 - std::pow(2.0, -params.p * (params.p - 1.0)));
}

OdeSolution::OdeSolution(const GronwallParams& params, double t_end, double dt, double store_every)
    : t_end_(t_end), spacing_(store_every), settle_time_(t_end) {
  params.validate();
  if (!(dt > 0.0 && store_every >= dt)) throw std::invalid_argument("ode: bad step sizes");
  const double p = params.p, kappa = params.kappa, h = params.H;
  const int sub = static_cast<int>(std::lround(store_every / dt));
  const double step = store_every / sub;

  double y = params.Y0, z = 0.0, t = 0.0;
  y_.push_back(y);
  z_.push_back(z);
  while (t < t_end) {
    const double y_prev = y;
    for (int s = 0; s < sub; ++s) {
      const double r1 = root(y, p);
      const double k1 = h - kappa * r1;
      const double y2 = std::max(0.0, y + 0.5 * step * k1);
      const double r2 = root(y2, p);
      const double k2 = h - kappa * r2;
      const double y3 = std::max(0.0, y + 0.5 * step * k2);
      const double r3 = root(y3, p);
      const double k3 = h - kappa * r3;
      const double y4 = std::max(0.0, y + step * k3);
      const double r4 = root(y4, p);
      const double k4 = h - kappa * r4;
      z += step / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
      y = std::max(0.0, y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    t = spacing_ * static_cast<double>(y_.size());
    y_.push_back(y);
    z_.push_back(z);
    const bool resting = (y == 0.0 && h == 0.0) || (y > 0.0 && std::abs(y - y_prev) <= kRestTolerance * y);
    if (resting) {
      settle_time_ = t;
      rest_value_ = y;
      rest_root_ = root(y, p);
      return;
    }
    if (t > kMaxOdeHorizon) throw std::runtime_error("ode: did not settle within the horizon");
  }
  settle_time_ = t;
  rest_value_ = y;
  rest_root_ = root(y, p);
}

double OdeSolution::value(double t) const {
  if (t >= settle_time_) return rest_value_;
  const double x = t / spacing_;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= y_.size()) return y_.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * y_[i] + w * y_[i + 1];
}

double OdeSolution::root_integral(double t) const {
  if (t >= settle_time_) return z_.back() + rest_root_ * (t - settle_time_);
  const double x = t / spacing_;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= z_.size()) return z_.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * z_[i] + w * z_[i + 1];
}

void measure_trace(GronwallTrace& trace, const GronwallParams& params, std::span<const OdeSolution> family) {
  (void)params;
  trace.V.clear();
  trace.W.clear();
  for (std::size_t k = 0; k + 1 < trace.T.size(); ++k) {
    double v = 0.0;
    for (const auto& sol : family)
      v = std::max(v, sol.root_integral(trace.T[k + 1]) - sol.root_integral(trace.T[k]));
    trace.V.push_back(v);
    trace.W.push_back(trace.dT[k + 1] > 0.0 ? std::pow(v / trace.dT[k + 1], 1.0 / params.p) : 0.0);
  }
}

GronwallVerification verify_against_ode(const GronwallParams& params, int k_max, int samples,
                                        GronwallTrace* trace_out) {
  GronwallTrace trace = build_trace(params, k_max);
  const double horizon = trace.T.back();

  std::vector<OdeSolution> family;
  for (double scale : {1.0, 0.5, 0.25}) {
    GronwallParams member = params;
    member.Y0 = params.Y0 * scale;
    family.emplace_back(member, horizon);
  }
  measure_trace(trace, params, family);

  GronwallVerification report;
  // t = 0, then log-spaced from T_1 / 1000 to the end of the trace
  std::vector<double> times{0.0};
  const double first = trace.T[1] * 1e-3;
  for (int i = 0; i + 1 < samples; ++i) {
    const double s = samples > 2 ? static_cast<double>(i) / (samples - 2) : 1.0;
    times.push_back(std::min(horizon, first * std::pow(horizon / first, s)));
  }
  for (double t : times) {
    double y = 0.0;
    for (const auto& sol : family) y = std::max(y, sol.value(t));
    const double bound = decay_bound(trace, params, t);
    const double ratio = bound > 0.0 ? y / bound : (y > 0.0 ? INFINITY : 0.0);
    if (ratio > report.worst_ratio) report.worst_ratio = ratio;
    if (y > bound) {
      if (report.violations == 0) report.counterexample_t = t;
      ++report.violations;
    }
    ++report.samples;
  }
  for (std::size_t k = 0; k < trace.W.size(); ++k)
    if (trace.W[k] > trace.M[k] * (1.0 + 1e-12)) report.w_below_m = false;

  bool extinction_ok = true;
  if (params.H == 0.0 && params.p > 1.0) {
    report.exact_extinction =
        params.p / (params.kappa * (params.p - 1.0)) * std::pow(params.Y0, (params.p - 1.0) / params.p);
    report.extinction_bound = extinction_time(params);
    extinction_ok = report.exact_extinction <= report.extinction_bound;
  }
  report.passed = report.violations == 0 && report.w_below_m && extinction_ok;
  if (trace_out) *trace_out = std::move(trace);
  return report;
}

nlohmann::json GronwallTrace::to_json() const {
  nlohmann::json j{{"T", T}, {"dT", dT}, {"M", M}};
  if (!V.empty()) j["V"] = V;
  if (!W.empty()) j["W"] = W;
  return j;
}

nlohmann::json GronwallVerification::to_json() const {
  nlohmann::json j{{"samples", samples},   {"violations", violations}, {"worst_ratio", worst_ratio},
                   {"w_below_m", w_below_m}, {"passed", passed}};
  if (counterexample_t >= 0.0) j["counterexample_t"] = counterexample_t;
  if (exact_extinction >= 0.0) {
    j["exact_extinction"] = exact_extinction;
    j["extinction_bound"] = extinction_bound;
  }
  return j;
}

}  // namespace fracwave
