#pragma once

#include <functional>
#include <vector>

namespace gkdv {

// C-infinity transition built from exp(-1/t): 0 for t <= 0, 1 for t >= 1,
// strictly increasing in between, all derivatives vanish at both ends.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// Plateau bump on [0, 1]: 0 outside, 1 on [w, 1 - w], C-infinity.
double plateau_bump(double t, double w = 0.2);

/// Monotone C-infinity connection on [a, c] between a left branch (used for
/// y <= a) and a right branch (used for y >= c). The derivative on [a, c] is
///   ((1 - S) A' + S B') * (1 - kappa * bump)
/// with kappa fixed so the integral of the derivative matches B(c) - A(a).
/// Positivity of the derivative is preserved whenever kappa <= 1.
class TransitionBlend {
 public:
  struct Branch {
    std::function<double(double)> value;
    std::function<double(double)> slope;
  };

  TransitionBlend(double a, double c, Branch left, Branch right);

  double value(double y) const;
  double slope(double y) const;
  double kappa() const { return kappa_; }
  double a() const { return a_; }
  double c() const { return c_; }

 private:
  double blend_slope(double y) const;

  double a_, c_;
  Branch left_, right_;
  double kappa_ = 0.0;
  // Cumulative integral of the slope on a fine uniform table over [a, c].
  std::vector<double> table_;
  double table_h_ = 0.0;
};

}  // namespace gkdv
