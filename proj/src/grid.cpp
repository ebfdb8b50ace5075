#include "fracwave/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace fracwave {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (kind, size) and reused.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(fftw_r2r_kind kind, int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(static_cast<int>(kind), n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    double* out = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_plan plan =
        fftw_plan_r2r_1d(n, in, out, kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

enum class LineOp { sine_synthesis, sine_analysis, cosine_synthesis };

// Applies a 1D transform to every line along `axis`. `shape[axis]` is the
// input line length; the output has `n_out` entries along that axis.
std::vector<double> transform_axis(const std::vector<double>& in,
                                   std::array<int, 3>& shape, int dim,
                                   int axis, int n_out, LineOp op) {
  const int n_in = shape[axis];
  std::size_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[a]);
  for (int a = axis + 1; a < dim; ++a) inner *= static_cast<std::size_t>(shape[a]);

  const int m = std::max(n_in, n_out);  // sine lengths: grid size
  const int fft_len = (op == LineOp::cosine_synthesis) ? n_out + 2 : m;
  const fftw_r2r_kind kind =
      (op == LineOp::cosine_synthesis) ? FFTW_REDFT00 : FFTW_RODFT00;
  fftw_plan plan = plan_cache().get(kind, fft_len);

  std::vector<double> out(outer * static_cast<std::size_t>(n_out) * inner);
  std::vector<double> buf_in(static_cast<std::size_t>(fft_len));
  std::vector<double> buf_out(static_cast<std::size_t>(fft_len));

  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      std::fill(buf_in.begin(), buf_in.end(), 0.0);
      const std::size_t base_in = o * static_cast<std::size_t>(n_in) * inner + i;
      const std::size_t base_out = o * static_cast<std::size_t>(n_out) * inner + i;
      const std::size_t offset = (op == LineOp::cosine_synthesis) ? 1 : 0;
      for (int j = 0; j < n_in; ++j)
        buf_in[offset + static_cast<std::size_t>(j)] = in[base_in + static_cast<std::size_t>(j) * inner];
      fftw_execute_r2r(plan, buf_in.data(), buf_out.data());
      switch (op) {
        case LineOp::sine_synthesis:
          for (int j = 0; j < n_out; ++j)
            out[base_out + static_cast<std::size_t>(j) * inner] = 0.5 * buf_out[static_cast<std::size_t>(j)];
          break;
        case LineOp::sine_analysis: {
          const double scale = 1.0 / (n_in + 1);
          for (int j = 0; j < n_out; ++j)
            out[base_out + static_cast<std::size_t>(j) * inner] = scale * buf_out[static_cast<std::size_t>(j)];
          break;
        }
        case LineOp::cosine_synthesis:
          for (int j = 0; j < n_out; ++j)
            out[base_out + static_cast<std::size_t>(j) * inner] = 0.5 * buf_out[static_cast<std::size_t>(j) + 1];
          break;
      }
    }
  }
  shape[axis] = n_out;
  return out;
}

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

void require_same_domain(const SpectralField& a, const SpectralField& b) {
  if (!(a.domain == b.domain) || a.size() != b.size())
    throw std::invalid_argument("spectral fields live on different domains");
}

}  // namespace

std::size_t BoxDomain::mode_count() const noexcept { return ipow(modes, dim); }
std::size_t BoxDomain::grid_count() const noexcept { return ipow(grid_points(), dim); }

double BoxDomain::cell_volume() const noexcept { return std::pow(spacing(), dim); }
double BoxDomain::volume() const noexcept { return std::pow(side_length, dim); }

Point BoxDomain::grid_point(std::size_t flat) const noexcept {
  Point p{0.0, 0.0, 0.0};
  const auto m = static_cast<std::size_t>(grid_points());
  for (int a = dim - 1; a >= 0; --a) {
    p[static_cast<std::size_t>(a)] = coordinate(static_cast<int>(flat % m));
    flat /= m;
  }
  return p;
}

std::array<int, 3> BoxDomain::mode_index(std::size_t flat) const noexcept {
  std::array<int, 3> k{0, 0, 0};
  const auto n = static_cast<std::size_t>(modes);
  for (int a = dim - 1; a >= 0; --a) {
    k[static_cast<std::size_t>(a)] = static_cast<int>(flat % n) + 1;
    flat /= n;
  }
  return k;
}

void BoxDomain::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("domain: dim must be 1, 2 or 3");
  if (!(side_length > 0.0) || !std::isfinite(side_length))
    throw std::invalid_argument("domain: side_length must be positive");
  if (modes < 1) throw std::invalid_argument("domain: modes must be positive");
  if (pad_factor < 1) throw std::invalid_argument("domain: pad_factor must be >= 1");
}

SpectralField::SpectralField(const BoxDomain& d)
    : domain(d), coefficients(d.mode_count(), 0.0) {}

SpectralField::SpectralField(const BoxDomain& d, std::vector<double> c)
    : domain(d), coefficients(std::move(c)) {
  if (coefficients.size() != d.mode_count())
    throw std::invalid_argument("spectral field: coefficient count != modes^dim");
}

bool SpectralField::is_finite() const noexcept {
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [](double c) { return std::isfinite(c); });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_domain(*this, other);
  for (std::size_t i = 0; i < size(); ++i) coefficients[i] += other.coefficients[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_domain(*this, other);
  for (std::size_t i = 0; i < size(); ++i) coefficients[i] -= other.coefficients[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (auto& c : coefficients) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

GridField::GridField(const BoxDomain& d) : domain(d), values(d.grid_count(), 0.0) {}

GridField::GridField(const BoxDomain& d, std::vector<double> v)
    : domain(d), values(std::move(v)) {
  if (values.size() != d.grid_count())
    throw std::invalid_argument("grid field: value count != grid_points^dim");
}

double GridField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridField to_grid(const SpectralField& field) {
  const BoxDomain& d = field.domain;
  std::array<int, 3> shape{d.modes, d.modes, d.modes};
  std::vector<double> data = field.coefficients;
  for (int a = 0; a < d.dim; ++a)
    data = transform_axis(data, shape, d.dim, a, d.grid_points(), LineOp::sine_synthesis);
  return GridField(d, std::move(data));
}

SpectralField from_grid(const GridField& grid) {
  const BoxDomain& d = grid.domain;
  if (grid.values.size() != d.grid_count())
    throw std::invalid_argument("from_grid: grid size does not match domain");
  const int m = d.grid_points();
  std::array<int, 3> shape{m, m, m};
  std::vector<double> data = grid.values;
  for (int a = 0; a < d.dim; ++a)
    data = transform_axis(data, shape, d.dim, a, d.modes, LineOp::sine_analysis);
  return SpectralField(d, std::move(data));
}

GridField derivative_to_grid(const SpectralField& field, int axis) {
  const BoxDomain& d = field.domain;
  if (axis < 0 || axis >= d.dim) throw std::invalid_argument("derivative_to_grid: bad axis");
  // d/dx sin(k pi x / L) = (k pi / L) cos(k pi x / L)
  std::vector<double> data = field.coefficients;
  const double base = std::numbers::pi / d.side_length;
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] *= base * d.mode_index(i)[static_cast<std::size_t>(axis)];
  std::array<int, 3> shape{d.modes, d.modes, d.modes};
  for (int a = 0; a < d.dim; ++a) {
    const LineOp op = (a == axis) ? LineOp::cosine_synthesis : LineOp::sine_synthesis;
    data = transform_axis(data, shape, d.dim, a, d.grid_points(), op);
  }
  return GridField(d, std::move(data));
}

std::vector<double> laplacian_eigenvalues(const BoxDomain& domain) {
  std::vector<double> mu(domain.mode_count());
  const double base = std::numbers::pi / domain.side_length;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto k = domain.mode_index(i);
    double s = 0.0;
    for (int a = 0; a < domain.dim; ++a) {
      const double w = base * k[static_cast<std::size_t>(a)];
      s += w * w;
    }
    mu[i] = s;
  }
  return mu;
}

SpectralField single_mode(const BoxDomain& domain, std::array<int, 3> k, double amplitude) {
  SpectralField f(domain);
  std::size_t flat = 0;
  for (int a = 0; a < domain.dim; ++a) {
    const int ka = k[static_cast<std::size_t>(a)];
    if (ka < 1 || ka > domain.modes) throw std::invalid_argument("single_mode: index out of range");
    flat = flat * static_cast<std::size_t>(domain.modes) + static_cast<std::size_t>(ka - 1);
  }
  f[flat] = amplitude;
  return f;
}

double inner_product(const SpectralField& a, const SpectralField& b) {
  require_same_domain(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * std::pow(0.5 * a.domain.side_length, a.domain.dim);
}

double l2_norm(const SpectralField& field) { return std::sqrt(inner_product(field, field)); }

double grid_integral(const GridField& grid) {
  double s = 0.0;
  for (double v : grid.values) s += v;
  return s * grid.domain.cell_volume();
}

double grid_l2_norm(const GridField& grid) {
  double s = 0.0;
  for (double v : grid.values) s += v * v;
  return std::sqrt(s * grid.domain.cell_volume());
}

}  // namespace fracwave
