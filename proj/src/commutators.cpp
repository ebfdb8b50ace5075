#include "fracwave/commutators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fracwave/fracops.hpp"

namespace fracwave {

namespace {

SpectralField multiply(const GridField& weight, const SpectralField& field) {
  GridField g = to_grid(field);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] *= weight.values[i];
  return from_grid(g);
}

SpectralField commutator_with(const GridField& weight, double theta, const SpectralField& field) {
  SpectralField out = apply_spectral(multiply(weight, field), theta);
  out -= multiply(weight, apply_spectral(field, theta));
  return out;
}

SpectralField refine(const SpectralField& f, int modes) {
  BoxDomain d = f.domain;
  d.modes = modes;
  SpectralField out(d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = f.domain.mode_index(i);
    std::size_t flat = 0;
    for (int a = 0; a < d.dim; ++a)
      flat = flat * static_cast<std::size_t>(modes) + static_cast<std::size_t>(k[static_cast<std::size_t>(a)] - 1);
    out[flat] = f[i];
  }
  return out;
}

std::vector<double> ratios_for(double theta, double s, std::span<const SpectralField> ensemble,
                               std::span<const double> epsilon_list, const Point& center) {
  std::vector<double> ratios;
  for (double eps : epsilon_list) {
    const GridField w = weight_on_grid(WeightSpec::smooth(eps, center), ensemble.front().domain);
    double best = 0.0;
    for (const auto& u : ensemble) {
      const double num = l2_norm(commutator_with(w, theta, u));
      const GridField den_field = to_grid(s > 0.0 ? apply_spectral(u, 0.5 * s) : u);
      double den = 0.0;
      for (std::size_t i = 0; i < den_field.size(); ++i) {
        const double t = w.values[i] * den_field.values[i];
        den += t * t;
      }
      den = std::sqrt(den * den_field.domain.cell_volume());
      if (den > 0.0) best = std::max(best, num / den);
    }
    ratios.push_back(best);
  }
  return ratios;
}

}  // namespace

SpectralField commutator_apply(const WeightSpec& spec, double theta, const SpectralField& field) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("commutator_apply: theta must lie in (0, 1)");
  return commutator_with(weight_on_grid(spec, field.domain), theta, field);
}

SpectralField commutator_weight_first(const WeightSpec& spec, double theta,
                                      const SpectralField& field) {
  SpectralField out = commutator_apply(spec, theta, field);
  out *= -1.0;
  return out;
}

double bound_constant(double theta, double s, double epsilon) {
  const double half = 0.5 * (1.0 + s);
  if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("bound_constant: s must lie in [0, 1)");
  if (!(theta > 0.0 && theta < half))
    throw std::invalid_argument("bound_constant: theta must lie in (0, (1+s)/2)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("bound_constant: epsilon must be positive");
  const double inv_gamma = std::abs(-theta / std::tgamma(1.0 - theta));
  return std::pow(epsilon, half) * std::pow(2.0, half - theta) * std::tgamma(half - theta) * inv_gamma;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

CommutatorReport scaling_study(double theta, double s, std::span<const SpectralField> ensemble,
                               std::span<const double> epsilon_list,
                               const ScalingStudyOptions& options) {
  if (ensemble.empty()) throw std::invalid_argument("scaling_study: empty ensemble");
  if (std::all_of(ensemble.begin(), ensemble.end(), [](const SpectralField& u) {
        return std::all_of(u.coefficients.begin(), u.coefficients.end(), [](double c) { return c == 0.0; });
      }))
    throw std::invalid_argument("scaling_study: degenerate ensemble (all fields zero)");
  if (epsilon_list.size() < 2) throw std::invalid_argument("scaling_study: need at least two epsilons");
  for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
    if (!(epsilon_list[i] > 0.0 && epsilon_list[i] <= 0.2))
      throw std::invalid_argument("scaling_study: epsilon must lie in (0, 0.2]");
    if (i > 0 && !(epsilon_list[i] < epsilon_list[i - 1]))
      throw std::invalid_argument("scaling_study: epsilon list must be strictly decreasing");
  }
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("scaling_study: theta must lie in (0, 1)");

  CommutatorReport report;
  report.theta = theta;
  report.s = s;
  report.epsilon_list.assign(epsilon_list.begin(), epsilon_list.end());
  report.ratio_list = ratios_for(theta, s, ensemble, epsilon_list, options.center);

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
    lx.push_back(std::log(epsilon_list[i]));
    ly.push_back(std::log(report.ratio_list[i]));
  }
  report.slope = least_squares_slope(lx, ly);

  if (options.with_bump) {
    const GridField psi = weight_on_grid(WeightSpec::bump_at(options.center), ensemble.front().domain);
    for (double eps : epsilon_list) {
      const GridField phi = weight_on_grid(WeightSpec::smooth(eps, options.center), ensemble.front().domain);
      double best = 0.0;
      for (const auto& u : ensemble) {
        const double num = l2_norm(commutator_with(psi, theta, u));
        const double den = weighted_lp_norm(to_grid(u), phi, 2);
        if (den > 0.0) best = std::max(best, num / den);
      }
      report.bump_ratio_list.push_back(best);
    }
  }

  if (options.check_resolution) {
    std::vector<SpectralField> fine;
    for (const auto& u : ensemble) fine.push_back(refine(u, 2 * u.domain.modes));
    const auto fine_ratios = ratios_for(theta, s, fine, epsilon_list, options.center);
    double worst = 0.0;
    for (std::size_t i = 0; i < fine_ratios.size(); ++i)
      worst = std::max(worst, std::abs(fine_ratios[i] / report.ratio_list[i] - 1.0));
    report.resolution_change = worst;
  }
  return report;
}

std::vector<SpectralField> decaying_ensemble(const BoxDomain& domain, int count, double decay,
                                             unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpectralField> out;
  for (int n = 0; n < count; ++n) {
    SpectralField f(domain);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto k = domain.mode_index(i);
      double k2 = 0.0;
      for (int a = 0; a < domain.dim; ++a) k2 += static_cast<double>(k[static_cast<std::size_t>(a)]) * k[static_cast<std::size_t>(a)];
      f[i] = std::pow(k2, -0.5 * decay) * normal(rng);
    }
    out.push_back(std::move(f));
  }
  return out;
}

nlohmann::json CommutatorReport::to_json() const {
  nlohmann::json j;
  j["theta"] = theta;
  j["s"] = s;
  j["epsilon_list"] = epsilon_list;
  j["ratio_list"] = ratio_list;
  j["slope"] = slope;
  if (!bump_ratio_list.empty()) j["bump_ratio_list"] = bump_ratio_list;
  if (resolution_change >= 0.0) j["resolution_change"] = resolution_change;
  return j;
}

}  // namespace fracwave
