#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/full_model.hpp"
#include "gkdv/profiles.hpp"
#include "gkdv/reduced.hpp"

namespace gkdv::shooting {

/// Sub-rectangle of D = {|lambda - s0^{-beta}| <= s0^{-beta-1/10}, |b - beta/s0| <= s0^{-1-1/10}}.
struct ShootRectangle {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;

  static ShootRectangle full_domain(const reduced::RegimeParams& params);
  bool contains(double lambda, double b) const;
  /// Throws geometry unless this lies inside D (relative slack 1e-12).
  void validate(const reduced::RegimeParams& params) const;
  double lambda_mid() const { return 0.5 * (lambda_lo + lambda_hi); }
  double b_mid() const { return 0.5 * (b_lo + b_hi); }
};

enum class Model { reduced, full_pde };
std::string_view to_string(Model model);

enum class ExitStatus { exited, reached_s_max, truncated };
std::string_view to_string(ExitStatus status);

struct ExitRecord {
  double lambda0 = 0.0;
  double b0 = 0.0;
  /// Infinity when the run reached s_max without leaving the unit disk.
  double s_star = std::numeric_limits<double>::infinity();
  double exit_F = 0.0;
  double exit_G = 0.0;
  double exit_angle = 0.0;  // atan2(G, F); NaN for truncated runs
  double H_prime = std::numeric_limits<double>::quiet_NaN();
  ExitStatus status = ExitStatus::reached_s_max;
  std::string reason;
};

struct ShootContext {
  reduced::RegimeParams params;
  Model model = Model::reduced;
  /// Defaults to 100 s0 (reduced) or 5 s0 (full PDE) when not set.
  std::optional<double> s_max;
  double tol = 1e-12;
  /// Used by the full-PDE model only; beta, s0, lambda0, b0, s_max and
  /// stop_at_exit are overwritten per run.
  full::FullConfig full_config{};
  const profiles::ProfileSet* profiles = nullptr;
  std::size_t workers = 1;

  double effective_s_max() const;
};

/// Exact inverse of (lambda0, b0) -> (F, G) at s0 with x0 on the threshold.
std::pair<double, double> chart(double F0, double G0, const reduced::RegimeParams& params);

ExitRecord simulate_until_exit(double lambda0, double b0, const ShootContext& ctx);

struct RefineResult {
  ExitRecord best;
  std::vector<ExitRecord> history;   // probe order
  std::vector<double> best_so_far;   // best s* after each probe
  ShootRectangle final_bracket;
};

/// 3x3 probe of the rectangle, then one probe per iteration at the centre of
/// the current bracket: the b-bracket follows the sign of the exit G, the
/// lambda-bracket the sign of the exit F (only when |F| >= |G|, where the F
/// sign is not masked by the b-direction drift). Throws search_failed when
/// the probe shows no sign change of G across b or of F across lambda.
RefineResult refine(const ShootRectangle& rect, const ShootContext& ctx, std::size_t budget);

/// grid_n x grid_n sweep, lambda varying fastest.
std::vector<ExitRecord> exit_map(const ShootRectangle& rect, const ShootContext& ctx, std::size_t grid_n);

struct WindingReport {
  double winding = 0.0;  // sum of wrapped angle increments / 2 pi
  std::vector<ExitRecord> boundary;  // counterclockwise in the (lambda, b) plane
  double max_jump = 0.0;             // largest |wrapped increment|
};

/// Exit angles along the rectangle boundary, per_side samples on each side.
WindingReport boundary_winding(const ShootRectangle& rect, const ShootContext& ctx, std::size_t per_side);

}  // namespace gkdv::shooting
