#pragma once

#include <json.hpp>
#include <span>
#include <vector>

#include "fracwave/grid.hpp"
#include "fracwave/weights.hpp"

namespace fracwave {

/// [A^theta, phi] u = A^theta (phi u) - phi A^theta u, both products projected
/// back onto the sine basis through the padded grid.
SpectralField commutator_apply(const WeightSpec& spec, double theta, const SpectralField& field);

/// [phi, A^theta] u = phi A^theta u - A^theta (phi u).
SpectralField commutator_weight_first(const WeightSpec& spec, double theta,
                                      const SpectralField& field);

// eps^((1+s)/2) 2^((1+s)/2 - theta) Gamma((1+s)/2 - theta) / |Gamma(-theta)|,
// requires 0 < theta < (1+s)/2 and 0 <= s < 1.
double bound_constant(double theta, double s, double epsilon);

struct CommutatorReport {
  double theta = 0.0;
  double s = 0.0;
  std::vector<double> epsilon_list;
  std::vector<double> ratio_list;
  double slope = 0.0;
  // per-epsilon ratio with the weight replaced by the bump psi_{x0}
  // (numerator independent of epsilon); empty unless requested.
  std::vector<double> bump_ratio_list;
  // max relative change of ratio_list when the modes are doubled; < 0 if not run.
  double resolution_change = -1.0;

  nlohmann::json to_json() const;
};

struct ScalingStudyOptions {
  Point center{0.0, 0.0, 0.0};
  bool with_bump = false;
  bool check_resolution = false;
};

// Per epsilon: max over the ensemble of ||[A^theta, phi_eps] u|| / ||phi_eps A^{s/2} u||,
// then the least-squares slope of log(ratio) against log(eps).
CommutatorReport scaling_study(double theta, double s, std::span<const SpectralField> ensemble,
                               std::span<const double> epsilon_list,
                               const ScalingStudyOptions& options);

// Fields with c_k = |k|^(-decay) * N(0,1), fixed seed.
std::vector<SpectralField> decaying_ensemble(const BoxDomain& domain, int count, double decay,
                                             unsigned long long seed);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fracwave
