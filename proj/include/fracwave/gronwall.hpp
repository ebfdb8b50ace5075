#pragma once

#include <json.hpp>
#include <span>
#include <vector>

namespace fracwave {

// Y' + kappa y^{1/p} <= H with lambda Y <= y <= Lambda Y (sup over a family).
struct GronwallParams {
  double kappa = 1.0;
  double H = 0.0;
  double p = 2.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double L = 0.0;  // <= 0 selects 2^{p(p-1)} + 1
  double Y0 = 1.0;

  double window_constant() const noexcept;
  void validate() const;
};

struct GronwallTrace {
  std::vector<double> T;   // T_0 = 0, ..., T_kmax
  std::vector<double> dT;  // dT[k] = T_k - T_{k-1}, dT[0] = 0; kept apart from T to avoid cancellation
  std::vector<double> M;   // M(0), ..., M(kmax)
  std::vector<double> V;   // measured, optional
  std::vector<double> W;

  nlohmann::json to_json() const;
};

// The k = 1 step couples M(0) and T_1; it is solved exactly for H = 0 and by
// bisection otherwise.
GronwallTrace build_trace(const GronwallParams& params, int k_max);

// 2 (L / (lambda kappa))^{1/p} dT_k^{-1/p} M(k-1)^{p-1}, equal to 1/2 by construction.
double window_condition(const GronwallTrace& trace, const GronwallParams& params, int k);

/// Pointwise envelope for sup Y(t) on [0, T_kmax]; throws beyond.
double decay_bound(const GronwallTrace& trace, const GronwallParams& params, double t);

/// lim T_k for H = 0, p > 1.
double extinction_time(const GronwallParams& params);

// Y' = -kappa max(Y, 0)^{1/p} + H, RK4, with the running integral of Y^{1/p}.
class OdeSolution {
 public:
  OdeSolution(const GronwallParams& params, double t_end, double dt = 1e-5, double store_every = 1e-3);

  double value(double t) const;
  /// int_0^t Y^{1/p}.
  double root_integral(double t) const;
  double end_time() const noexcept { return t_end_; }

 private:
  double t_end_;
  double spacing_;
  std::vector<double> y_, z_;
  // After settling Y stays at rest_value_ from settle_time_ on.
  double settle_time_;
  double rest_value_ = 0.0;
  double rest_root_ = 0.0;
};

/// Fills V(k), W(k) for k < kmax as the sup over the family.
void measure_trace(GronwallTrace& trace, const GronwallParams& params, std::span<const OdeSolution> family);

struct GronwallVerification {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max Y / bound
  double counterexample_t = -1.0;
  bool w_below_m = true;
  double exact_extinction = -1.0;  // H = 0, p > 1 only
  double extinction_bound = -1.0;
  bool passed = false;

  nlohmann::json to_json() const;
};

// Checks Y(t) <= decay_bound at `samples` times and W(k) <= M(k) on the
// family of initial values Y0, Y0/2, Y0/4.
GronwallVerification verify_against_ode(const GronwallParams& params, int k_max, int samples = 100,
                                        GronwallTrace* trace_out = nullptr);

}  // namespace fracwave
