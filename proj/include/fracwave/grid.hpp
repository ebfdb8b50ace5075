#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fracwave {

using Point = std::array<double, 3>;

// A cube (0,L)^dim with homogeneous Dirichlet data. Fields are expanded in
// the sine basis prod_i sin(k_i pi x_i / L), 1 <= k_i <= modes, and sampled
// on the M = pad_factor * modes interior points x_j = (j + 1) L / (M + 1).
struct BoxDomain {
  int dim = 1;
  double side_length = 1.0;
  int modes = 16;
  int pad_factor = 3;

  int grid_points() const noexcept { return pad_factor * modes; }
  std::size_t mode_count() const noexcept;
  std::size_t grid_count() const noexcept;
  double spacing() const noexcept { return side_length / (grid_points() + 1); }
  double cell_volume() const noexcept;
  double volume() const noexcept;
  double coordinate(int j) const noexcept { return (j + 1) * spacing(); }

  Point grid_point(std::size_t flat) const noexcept;
  // 1-based multi-index of a flat coefficient index (unused axes are 0).
  std::array<int, 3> mode_index(std::size_t flat) const noexcept;

  void validate() const;
  bool operator==(const BoxDomain&) const = default;
};

struct SpectralField {
  BoxDomain domain;
  std::vector<double> coefficients;

  SpectralField() = default;
  explicit SpectralField(const BoxDomain& d);
  SpectralField(const BoxDomain& d, std::vector<double> c);

  std::size_t size() const noexcept { return coefficients.size(); }
  double& operator[](std::size_t i) { return coefficients[i]; }
  double operator[](std::size_t i) const { return coefficients[i]; }
  bool is_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// Pointwise values on the physical grid, row-major with the last axis fastest.
struct GridField {
  BoxDomain domain;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const BoxDomain& d);
  GridField(const BoxDomain& d, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double max_abs() const noexcept;
};

GridField to_grid(const SpectralField& field);
SpectralField from_grid(const GridField& grid);

// Values of d/dx_axis of the field on the physical grid (cosine synthesis
// along `axis`, sine synthesis along the others).
GridField derivative_to_grid(const SpectralField& field, int axis);

std::vector<double> laplacian_eigenvalues(const BoxDomain& domain);

// c_k -> symbol(mu_k) c_k.
template <class Symbol>
SpectralField apply_symbol(const SpectralField& field, Symbol&& symbol) {
  const auto mu = laplacian_eigenvalues(field.domain);
  SpectralField out = field;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= symbol(mu[i]);
  return out;
}

SpectralField single_mode(const BoxDomain& domain, std::array<int, 3> k,
                          double amplitude = 1.0);

// Exact L2(Omega) inner product / norm from coefficients (Parseval).
double inner_product(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& field);

// Uniform interior-grid quadrature; exact for products of band-limited
// fields whose total bandwidth stays below 2(M+1).
double grid_integral(const GridField& grid);
double grid_l2_norm(const GridField& grid);

}  // namespace fracwave
