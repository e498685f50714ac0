#include "gkdv/profiles.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/smooth.hpp"

namespace gkdv::profiles {

namespace {

const double q_amplitude = std::pow(3.0, 0.25);

// 1 / sqrt(cosh z) without overflow for large |z|.
double inv_sqrt_cosh(double z) {
  const double e = std::exp(-2.0 * std::abs(z));
  return std::sqrt(2.0 * std::exp(-std::abs(z)) / (1.0 + e));
}

double pow4(double v) {
  const double v2 = v * v;
  return v2 * v2;
}

void require_wide(const GridSpec& grid, const char* who) {
  grid.validate();
  require(grid.y_min <= -15.0 && grid.y_max >= 15.0, ErrorCode::domain_too_small,
          std::string(who) + ": grid must extend to |y| >= 15 on both sides");
}

enum class LeftBoundary { dirichlet, neumann };

// Discrete L with fourth-order interior stencils, shifted one-sided stencils
// on the second and penultimate rows, and boundary rows set by the caller.
Eigen::SparseMatrix<double> assemble_L(const GridSpec& grid, LeftBoundary left) {
  const std::size_t n = grid.n;
  const double h = grid.spacing();
  const double c = 1.0 / (12.0 * h * h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(6 * n);
  auto add = [&](std::size_t r, std::size_t col, double v) {
    t.emplace_back(static_cast<int>(r), static_cast<int>(col), v);
  };
  auto potential = [&](std::size_t i) { return 1.0 - 5.0 * pow4(q_value(grid.node(i))); };

  if (left == LeftBoundary::dirichlet) {
    add(0, 0, 1.0);
  } else {
    const double d = 1.0 / (12.0 * h);
    const double w[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    for (std::size_t j = 0; j < 5; ++j) add(0, j, d * w[j]);
  }
  {
    const double w[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    for (std::size_t j = 0; j < 6; ++j) add(1, j, -c * w[j]);
    add(1, 1, potential(1));
  }
  for (std::size_t i = 2; i + 2 < n; ++i) {
    add(i, i - 2, c);
    add(i, i - 1, -16.0 * c);
    add(i, i, 30.0 * c + potential(i));
    add(i, i + 1, -16.0 * c);
    add(i, i + 2, c);
  }
  {
    const std::size_t m = n - 1;
    const double w[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    for (std::size_t j = 0; j < 6; ++j) add(m - 1, m - j, -c * w[j]);
    add(m - 1, m - 1, potential(m - 1));
    add(m, m, 1.0);
  }
  Eigen::SparseMatrix<double> a(static_cast<int>(n), static_cast<int>(n));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

std::vector<double> sparse_solve(const Eigen::SparseMatrix<double>& a, const std::vector<double>& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  require(lu.info() == Eigen::Success, ErrorCode::singular_system, "L inversion: factorization failed");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = lu.solve(b);
  require(lu.info() == Eigen::Success && x.allFinite(), ErrorCode::singular_system,
          "L inversion: solve failed");
  return {x.data(), x.data() + x.size()};
}

GridFunction project_out(const GridFunction& f, const GridFunction& direction) {
  const double coef = inner(f, direction) / inner(direction, direction);
  return f - coef * direction;
}

// (Q + d)^5 - Q^5 expanded to avoid cancellation when d is small.
double quintic_increment(double q, double d) {
  const double q2 = q * q;
  const double d2 = d * d;
  return d * (5.0 * q2 * q2 + 10.0 * q2 * q * d + 10.0 * q2 * d2 + 5.0 * q * d2 * d + d2 * d2);
}

}  // namespace

double q_value(double y) { return q_amplitude * inv_sqrt_cosh(2.0 * y); }

double q_slope(double y) { return -std::tanh(2.0 * y) * q_value(y); }

double lambda_q_value(double y) { return 0.5 * q_value(y) + y * q_slope(y); }

GridFunction ground_state(const GridSpec& grid) { return GridFunction::sample(grid, q_value); }

GridFunction ground_state_derivative(const GridSpec& grid) {
  return GridFunction::sample(grid, q_slope);
}

GridFunction lambda_q(const GridSpec& grid) { return GridFunction::sample(grid, lambda_q_value); }

GridFunction apply_L(const GridFunction& f) {
  require_wide(f.grid(), "apply_L");
  const GridFunction d2 = second_derivative(f);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = f.y(i);
    out[i] = -d2[i] + f[i] - 5.0 * pow4(q_value(y)) * f[i];
  }
  return {f.grid(), std::move(out)};
}

GridFunction apply_Lambda(const GridFunction& f) {
  const GridFunction d = derivative(f);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * f[i] + f.y(i) * d[i];
  return {f.grid(), std::move(out)};
}

GridFunction solve_Y0(const GridSpec& grid, Symmetrize symmetrize) {
  require_wide(grid, "solve_Y0");
  require(grid.is_symmetric(), ErrorCode::invalid_argument, "solve_Y0: grid must be symmetric about 0");
  const std::size_t n = grid.n;
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = 5.0 * pow4(q_value(grid.node(i)));
  rhs.front() = 0.0;
  rhs.back() = 0.0;
  const auto a = assemble_L(grid, LeftBoundary::dirichlet);
  GridFunction y0{grid, sparse_solve(a, rhs)};
  y0 = project_out(y0, ground_state_derivative(grid));
  if (symmetrize == Symmetrize::no) return y0;

  std::vector<double> even(n);
  for (std::size_t i = 0; i < n; ++i) even[i] = 0.5 * (y0[i] + y0[n - 1 - i]);
  for (std::size_t i = 0; i < n / 2; ++i) even[n - 1 - i] = even[i];
  return {grid, std::move(even)};
}

GridFunction solve_P(const GridSpec& grid) {
  require_wide(grid, "solve_P");
  const std::size_t n = grid.n;
  const GridFunction tail = cumulative_from_top(lambda_q(grid));
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -tail[i];
  rhs.front() = 0.0;  // Neumann row
  rhs.back() = 0.0;   // P(y_max) = 0
  const auto a = assemble_L(grid, LeftBoundary::neumann);
  GridFunction p{grid, sparse_solve(a, rhs)};
  p = project_out(p, ground_state_derivative(grid));

  const double half_int_q = 0.5 * integrate(ground_state(grid));
  const double mismatch = std::abs(p[0] - half_int_q);
  require(mismatch <= 1e-6 * half_int_q, ErrorCode::normalization,
          "solve_P: left limit misses (1/2) int Q by " + std::to_string(mismatch));
  return p;
}

double chi(double z) { return smooth_step(z + 2.0); }

double chi_slope(double z) { return smooth_step_derivative(z + 2.0); }

GridFunction cutoff_chi_b(double b, const GridSpec& grid) {
  if (b == 0.0) return GridFunction::sample(grid, [](double) { return 1.0; });
  const double scale = std::pow(std::abs(b), cutoff_gamma);
  return GridFunction::sample(grid, [scale](double y) { return chi(scale * y); });
}

double ProfileSet::Y0_at(double y) const {
  if (y < grid.y_min) return Y0[0] * std::exp(y - grid.y_min);
  if (y > grid.y_max) return Y0[Y0.size() - 1] * std::exp(grid.y_max - y);
  return interpolate(Y0, y);
}

double ProfileSet::P_at(double y) const {
  if (y < grid.y_min) return P[0];
  if (y > grid.y_max) return 0.0;
  return interpolate(P, y);
}

GridFunction ProfileSet::Y0_on(const GridSpec& g) const {
  if (g == grid) return Y0;
  return GridFunction::sample(g, [this](double y) { return Y0_at(y); });
}

GridFunction ProfileSet::P_on(const GridSpec& g) const {
  if (g == grid) return P;
  return GridFunction::sample(g, [this](double y) { return P_at(y); });
}

ProfileSet build_profile_set(const GridSpec& grid) {
  ProfileSet s;
  s.grid = grid;
  s.Q = ground_state(grid);
  s.dQ = ground_state_derivative(grid);
  s.LambdaQ = lambda_q(grid);
  s.Y0 = solve_Y0(grid);
  s.P = solve_P(grid);
  s.intQ = integrate(s.Q);
  s.intQ2 = inner(s.Q, s.Q);
  return s;
}

GridFunction build_Qb(double b, const GridSpec& grid, const ProfileSet& profiles) {
  grid.validate();
  if (b == 0.0) return ground_state(grid);
  const GridFunction p = profiles.P_on(grid);
  const GridFunction chi_b = cutoff_chi_b(b, grid);
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = q_value(grid.node(i)) + b * chi_b[i] * p[i];
  return {grid, std::move(v)};
}

GridFunction build_Qb(double b, const GridSpec& grid) {
  return build_Qb(b, grid, build_profile_set());
}

double qb_at(double b, double y, const ProfileSet& profiles) {
  if (b == 0.0) return q_value(y);
  const double scale = std::pow(std::abs(b), cutoff_gamma);
  return q_value(y) + b * chi(scale * y) * profiles.P_at(y);
}

PsiB psi_b(double b, const GridSpec& grid, const ProfileSet& profiles) {
  grid.validate();
  if (b == 0.0) return {GridFunction::zeros(grid), 0.0};

  const GridFunction r = cutoff_chi_b(b, grid) * profiles.P_on(grid);
  const GridFunction r1 = derivative(r);
  const GridFunction r2 = second_derivative(r);
  std::vector<double> stationary(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double q = q_value(grid.node(i));
    stationary[i] = b * (r2[i] - r[i]) + quintic_increment(q, b * r[i]);
  }
  const GridFunction flux = derivative(GridFunction{grid, std::move(stationary)});

  const double g = std::pow(std::abs(b), cutoff_gamma);
  std::vector<double> psi(grid.n);
  double ratio = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y = grid.node(i);
    const double lambda_r = 0.5 * r[i] + y * r1[i];
    psi[i] = -flux[i] - b * lambda_q_value(y) - b * b * lambda_r;
    const double z = g * y;
    const double envelope = std::abs(b) * g * ((z >= -2.0 && z <= -1.0) ? 1.0 : 0.0) +
                            b * b * (std::exp(-0.5 * std::abs(y)) + ((z >= -2.0 && z <= 0.0) ? 1.0 : 0.0));
    ratio = std::max(ratio, std::abs(psi[i]) / envelope);
  }
  return {GridFunction{grid, std::move(psi)}, ratio};
}

double energy(const GridFunction& f) {
  const GridFunction d = derivative(f);
  std::vector<double> dens(f.size());
  for (std::size_t i = 0; i < dens.size(); ++i) {
    const double v2 = f[i] * f[i];
    dens[i] = 0.5 * d[i] * d[i] - v2 * v2 * v2 / 6.0;
  }
  return integrate(dens, f.grid().spacing());
}

ProfileIdentities identities(const ProfileSet& s) {
  ProfileIdentities id;
  id.intQ = s.intQ;
  id.intQ2 = s.intQ2;
  id.inner_Q_Y0 = inner(s.Q, s.Y0);
  id.inner_P_Q = inner(s.P, s.Q);
  id.inner_P_Qprime = inner(s.P, s.dQ);
  id.y0_identity_rel = std::abs(id.inner_Q_Y0 + 0.75 * s.intQ) / s.intQ;
  id.p_identity_rel = std::abs(id.inner_P_Q - s.intQ * s.intQ / 16.0) / (s.intQ * s.intQ);
  id.p_qprime_abs = std::abs(id.inner_P_Qprime);

  const GridFunction q2 = second_derivative(s.Q);
  double gs = 0.0;
  for (std::size_t i = 0; i < s.Q.size(); ++i) {
    const double q = s.Q[i];
    gs = std::max(gs, std::abs(q2[i] + q * q * q * q * q - q));
  }
  id.ground_state_residual = gs;

  const GridFunction ly0 = apply_L(s.Y0);
  double ry = 0.0;
  for (std::size_t i = 1; i + 1 < ly0.size(); ++i) {
    ry = std::max(ry, std::abs(ly0[i] - 5.0 * pow4(s.Q[i])));
  }
  id.y0_equation_residual = ry;
  id.p_left_limit_error = std::abs(s.P[0] - 0.5 * s.intQ);
  return id;
}

QbExpansion qb_expansion(double b, const ProfileSet& profiles, double h) {
  require(b != 0.0 && std::abs(b) < 0.1, ErrorCode::invalid_argument, "qb_expansion: need 0 < |b| < 0.1");
  const double left = std::min(-2.0 / std::pow(std::abs(b), cutoff_gamma) - 5.0, profiles.grid.y_min);
  const GridSpec grid = GridSpec::with_spacing(left, profiles.grid.y_max, h);
  const GridFunction q = ground_state(grid);
  const GridFunction qb = build_Qb(b, grid, profiles);
  // Same grid for every term so quadrature error cancels in the differences.
  const double pq = inner(profiles.P_on(grid), q);
  QbExpansion out;
  out.b = b;
  out.nodes = grid.n;
  out.mass_error = inner(qb, qb) - inner(q, q) - 2.0 * b * pq;
  out.energy_error = energy(qb) + b * pq;
  return out;
}

}  // namespace gkdv::profiles
