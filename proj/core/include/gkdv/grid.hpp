#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gkdv {

/// Uniform grid on [y_min, y_max] with n nodes (endpoints included).
struct GridSpec {
  double y_min = -25.0;
  double y_max = 25.0;
  std::size_t n = 5001;

  static constexpr std::size_t min_nodes = 16;

  /// Reference profile grid: [-25, 25], h = 0.01.
  static GridSpec reference() { return {-25.0, 25.0, 5001}; }

  /// Grid on [lo, hi] with spacing as close to h as possible (never coarser).
  static GridSpec with_spacing(double lo, double hi, double h);

  double spacing() const { return (y_max - y_min) / static_cast<double>(n - 1); }
  double node(std::size_t i) const { return y_min + spacing() * static_cast<double>(i); }
  bool is_symmetric() const;
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Samples of a real function on a GridSpec. Immutable once built.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridSpec grid, std::vector<double> values);

  static GridFunction zeros(const GridSpec& grid);
  static GridFunction sample(const GridSpec& grid, const std::function<double(double)>& f);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double y(std::size_t i) const { return grid_.node(i); }

  /// Pointwise map producing a new function on the same grid.
  GridFunction map(const std::function<double(double, double)>& f) const;

  double sup_norm() const;
  double sup_norm_on(double lo, double hi) const;

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator*(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator*(double s, const GridFunction& a);

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b);

// Composite Simpson quadrature (3/8 rule closes an even node count).
double integrate(std::span<const double> f, double h);
double integrate(const GridFunction& f);

/// (f, g) = integral of f*g over the grid.
double inner(const GridFunction& f, const GridFunction& g);

// Fourth-order finite differences: five-point central stencils in the
// interior, six-point one-sided stencils in the two layers next to each end.
GridFunction derivative(const GridFunction& f);
GridFunction second_derivative(const GridFunction& f);

/// R(y_i) = integral of f over [y_i, y_max], fourth-order panel rule.
GridFunction cumulative_from_top(const GridFunction& f);

/// Six-point Lagrange interpolation; exact at nodes. Throws interpolation_range
/// outside [y_min, y_max].
double interpolate(const GridFunction& f, double y);
double interpolate(std::span<const double> values, double x_min, double h, double x);

}  // namespace gkdv
