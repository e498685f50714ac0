#include "gkdv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gkdv/errors.hpp"

namespace gkdv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::domain_too_small: return "domain-too-small";
    case ErrorCode::singular_system: return "singular-system";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::state_invalid: return "state-invalid";
    case ErrorCode::integration_halted: return "integration-halted";
    case ErrorCode::fit_refused: return "fit-refused";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::blow_up_detected: return "blow-up-detected";
    case ErrorCode::measurement_refused: return "measurement-refused";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::interpolation_range: return "interpolation-out-of-range";
    case ErrorCode::orthogonality: return "orthogonality-violation";
    case ErrorCode::decomposition_failed: return "decomposition-failed";
    case ErrorCode::degenerate_configuration: return "degenerate-configuration";
    case ErrorCode::search_failed: return "search-failed";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

GridSpec GridSpec::with_spacing(double lo, double hi, double h) {
  require(hi > lo && h > 0.0, ErrorCode::invalid_argument, "with_spacing: need lo < hi and h > 0");
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
  return {lo, hi, std::max<std::size_t>(cells + 1, min_nodes)};
}

bool GridSpec::is_symmetric() const {
  return std::abs(y_min + y_max) <= 1e-12 * std::max(1.0, std::abs(y_max));
}

void GridSpec::validate() const {
  require(std::isfinite(y_min) && std::isfinite(y_max) && y_min < y_max, ErrorCode::invalid_argument,
          "GridSpec: need finite y_min < y_max");
  require(n >= min_nodes, ErrorCode::invalid_argument,
          "GridSpec: need at least " + std::to_string(min_nodes) + " nodes");
}

GridFunction::GridFunction(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == grid_.n, ErrorCode::invalid_argument,
          "GridFunction: value count does not match grid");
  for (double v : values_) {
    require(std::isfinite(v), ErrorCode::invalid_argument, "GridFunction: non-finite sample");
  }
}

GridFunction GridFunction::zeros(const GridSpec& grid) {
  return {grid, std::vector<double>(grid.n, 0.0)};
}

GridFunction GridFunction::sample(const GridSpec& grid, const std::function<double(double)>& f) {
  grid.validate();
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = f(grid.node(i));
  return {grid, std::move(v)};
}

GridFunction GridFunction::map(const std::function<double(double, double)>& f) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid_.node(i), values_[i]);
  return {grid_, std::move(v)};
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::sup_norm_on(double lo, double hi) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double y = grid_.node(i);
    if (y >= lo && y <= hi) m = std::max(m, std::abs(values_[i]));
  }
  return m;
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  require(a.grid() == b.grid(), ErrorCode::grid_mismatch, "grid functions live on different grids");
}

namespace {

template <typename Op>
GridFunction zip(const GridFunction& a, const GridFunction& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
  return {a.grid(), std::move(v)};
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}
GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
GridFunction operator*(double s, const GridFunction& a) {
  return a.map([s](double, double v) { return s * v; });
}

double integrate(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  require(n >= 4, ErrorCode::invalid_argument, "integrate: need at least 4 samples");
  // Simpson over an odd number of nodes, 3/8 rule on the last three cells otherwise.
  const std::size_t simpson_end = (n % 2 == 1) ? n : n - 3;
  double sum = f[0] + f[simpson_end - 1];
  for (std::size_t i = 1; i + 1 < simpson_end; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  double total = sum * h / 3.0;
  if (simpson_end != n) {
    const std::size_t k = n - 4;
    total += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
  }
  return total;
}

double integrate(const GridFunction& f) { return integrate(f.values(), f.grid().spacing()); }

double inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * g[i];
  return integrate(prod, f.grid().spacing());
}

GridFunction derivative(const GridFunction& f) {
  const std::size_t n = f.size();
  const double c = 1.0 / (12.0 * f.grid().spacing());
  const auto v = f.values();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = c * (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]);
  d[0] = c * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
  d[1] = c * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
  const std::size_t m = n - 1;
  d[m] = -c * (-25.0 * v[m] + 48.0 * v[m - 1] - 36.0 * v[m - 2] + 16.0 * v[m - 3] - 3.0 * v[m - 4]);
  d[m - 1] = -c * (-3.0 * v[m] - 10.0 * v[m - 1] + 18.0 * v[m - 2] - 6.0 * v[m - 3] + v[m - 4]);
  return {f.grid(), std::move(d)};
}

GridFunction second_derivative(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const double c = 1.0 / (12.0 * h * h);
  const auto v = f.values();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = c * (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]);
  }
  d[0] = c * (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5]);
  d[1] = c * (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]);
  const std::size_t m = n - 1;
  d[m] = c * (45.0 * v[m] - 154.0 * v[m - 1] + 214.0 * v[m - 2] - 156.0 * v[m - 3] + 61.0 * v[m - 4] -
              10.0 * v[m - 5]);
  d[m - 1] = c * (10.0 * v[m] - 15.0 * v[m - 1] - 4.0 * v[m - 2] + 14.0 * v[m - 3] - 6.0 * v[m - 4] +
                  v[m - 5]);
  return {f.grid(), std::move(d)};
}

GridFunction cumulative_from_top(const GridFunction& f) {
  const std::size_t n = f.size();
  const double w = f.grid().spacing() / 24.0;
  const auto v = f.values();
  std::vector<double> r(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    double panel = 0.0;  // integral over [y_k, y_{k+1}]
    if (k == 0) {
      panel = w * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]);
    } else if (k + 2 >= n) {
      panel = w * (9.0 * v[k + 1] + 19.0 * v[k] - 5.0 * v[k - 1] + v[k - 2]);
    } else {
      panel = w * (-v[k - 1] + 13.0 * v[k] + 13.0 * v[k + 1] - v[k + 2]);
    }
    r[k] = r[k + 1] + panel;
  }
  return {f.grid(), std::move(r)};
}

double interpolate(std::span<const double> values, double x_min, double h, double x) {
  const std::size_t n = values.size();
  require(n >= 6, ErrorCode::invalid_argument, "interpolate: need at least 6 samples");
  const double t = (x - x_min) / h;
  const double last = static_cast<double>(n - 1);
  require(t >= -1e-9 && t <= last + 1e-9, ErrorCode::interpolation_range,
          "interpolate: abscissa outside the sampled range");
  const double tr = std::round(t);
  if (std::abs(t - tr) < 1e-12) return values[static_cast<std::size_t>(std::clamp(tr, 0.0, last))];

  const auto base = static_cast<std::ptrdiff_t>(std::floor(t)) - 2;
  const std::size_t i0 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 6));
  double result = 0.0;
  for (std::size_t j = 0; j < 6; ++j) {
    double lj = 1.0;
    const double tj = static_cast<double>(i0 + j);
    for (std::size_t m = 0; m < 6; ++m) {
      if (m == j) continue;
      const double tm = static_cast<double>(i0 + m);
      lj *= (t - tm) / (tj - tm);
    }
    result += lj * values[i0 + j];
  }
  return result;
}

double interpolate(const GridFunction& f, double y) {
  return interpolate(f.values(), f.grid().y_min, f.grid().spacing(), y);
}

}  // namespace gkdv
