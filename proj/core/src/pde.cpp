#include "gkdv/pde.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gkdv/smooth.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv::pde {

using spectral::Complex;

namespace {

bool friendly(std::size_t n) {
  for (std::size_t p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Samples of the band-limited interpolant on a grid refined by an integer factor.
std::vector<double> refine(std::span<const double> values, std::size_t factor) {
  const std::size_t n = values.size();
  spectral::RealFft coarse(n);
  std::vector<Complex> spec(coarse.modes());
  coarse.forward(values, spec);
  spec.back() *= 0.5;
  spectral::RealFft fine(n * factor);
  std::vector<Complex> padded(fine.modes(), Complex{});
  for (std::size_t m = 0; m < spec.size(); ++m) padded[m] = spec[m] / static_cast<double>(n);
  std::vector<double> out(n * factor);
  fine.inverse(padded, out);
  return out;
}

}  // namespace

void DomainSpec::validate() const {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min, ErrorCode::geometry,
          "DomainSpec: need finite x_min < x_max");
  require(n >= 16 && n % 2 == 0, ErrorCode::invalid_argument, "DomainSpec: n must be even and at least 16");
  require(friendly(n), ErrorCode::invalid_argument,
          "DomainSpec: n = " + std::to_string(n) + " has a prime factor above 7");
}

Field::Field(double t, DomainSpec domain, std::vector<double> values)
    : t_(t), domain_(domain), values_(std::move(values)) {
  domain_.validate();
  require(values_.size() == domain_.n, ErrorCode::grid_mismatch, "Field: sample count differs from domain size");
  for (double v : values_) require(std::isfinite(v), ErrorCode::state_invalid, "Field: non-finite sample");
}

Field Field::zeros(double t, const DomainSpec& domain) {
  return Field(t, domain, std::vector<double>(domain.n, 0.0));
}

Field Field::sample(double t, const DomainSpec& domain, const std::function<double(double)>& f) {
  std::vector<double> v(domain.n);
  for (std::size_t j = 0; j < domain.n; ++j) v[j] = f(domain.node(j));
  return Field(t, domain, std::move(v));
}

double Field::sup_norm() const { return sup_abs(values_); }

Field Field::negated() const {
  std::vector<double> v(values_);
  for (double& x : v) x = -x;
  return Field(t_, domain_, std::move(v));
}

Field operator-(const Field& a, const Field& b) {
  require(a.domain() == b.domain(), ErrorCode::grid_mismatch, "Field difference on different domains");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] - b[j];
  return Field(a.t(), a.domain(), std::move(v));
}

Field operator+(const Field& a, const Field& b) {
  require(a.domain() == b.domain(), ErrorCode::grid_mismatch, "Field sum on different domains");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + b[j];
  return Field(a.t(), a.domain(), std::move(v));
}

void TailSpec::validate() const {
  require(c0 < 0.0 && std::isfinite(c0), ErrorCode::invalid_argument, "TailSpec: c0 must be negative");
  require(theta > 1.0 && std::isfinite(theta), ErrorCode::invalid_argument, "TailSpec: theta must exceed 1");
  require(x0 > 0.0 && std::isfinite(x0), ErrorCode::invalid_argument, "TailSpec: x0 must be positive");
  require(cutoff_width > 0.0, ErrorCode::invalid_argument, "TailSpec: cutoff width must be positive");
  require(cutoff_start > 0.5 * x0, ErrorCode::geometry, "TailSpec: cutoff must start beyond x0/2");
}

double TailSpec::value(double x) const {
  const double q = 0.25 * x0;
  if (x <= q || x >= cutoff_start + cutoff_width) return 0.0;
  return c0 * std::pow(x, -theta) * smooth_step((x - q) / q) *
         (1.0 - smooth_step((x - cutoff_start) / cutoff_width));
}

Field build_tail(const TailSpec& tail, const DomainSpec& domain, double t) {
  tail.validate();
  domain.validate();
  require(0.25 * tail.x0 > domain.x_min && tail.cutoff_start + tail.cutoff_width < domain.x_max, ErrorCode::geometry,
          fmt::format("build_tail: [x0/4, cutoff end] = [{}, {}] not inside [{}, {})", 0.25 * tail.x0,
                      tail.cutoff_start + tail.cutoff_width, domain.x_min, domain.x_max));
  return Field::sample(t, domain, [&tail](double x) { return tail.value(x); });
}

ConservedPair conserved(const Field& field) {
  const auto u = field.values();
  const double dx = field.domain().dx();
  ConservedPair c;
  for (double v : u) c.mass += v * v;
  c.mass *= dx;
  const auto ux = spectral::derivative(u, field.domain().length());
  double kinetic = 0.0;
  for (double v : ux) kinetic += v * v;
  kinetic *= dx;
  const auto fine = refine(u, 3);
  double sixth = 0.0;
  for (double v : fine) sixth += v * v * v * v * v * v;
  sixth *= dx / 3.0;
  c.kinetic = 0.5 * kinetic;
  c.energy = c.kinetic - sixth / 6.0;
  return c;
}

// ---------------------------------------------------------------------------
// Solver

struct GkdvSolver::Impl {
  struct Coeffs {
    std::vector<Complex> E, E2, Q, f1, f2, f3;
  };

  std::size_t n;
  std::size_t modes;
  spectral::RealFft fft;
  spectral::RealFft fft_pad;
  std::vector<double> k;
  std::vector<double> sponge;  // sigma(x); empty when off
  int contour_points;
  std::map<double, Coeffs> cache;

  std::vector<double> real_buf, pad_real;
  std::vector<Complex> pad_spec;
  double last_sup = 0.0;

  Impl(const DomainSpec& d, const SolverOptions& o)
      : n(d.n),
        modes(d.n / 2 + 1),
        fft(d.n),
        fft_pad(3 * d.n),
        k(spectral::wavenumbers(d.n, d.length())),
        contour_points(o.contour_points),
        real_buf(d.n),
        pad_real(3 * d.n),
        pad_spec(3 * d.n / 2 + 1) {
    if (o.sponge_strength > 0.0) {
      require(o.sponge_width > 0.0 && 2.0 * o.sponge_width < d.length(), ErrorCode::geometry,
              "sponge width must be positive and below half the box");
      sponge.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = d.node(j);
        const double left = 1.0 - smooth_step((x - d.x_min) / o.sponge_width);
        const double right = smooth_step((x - (d.x_max - o.sponge_width)) / o.sponge_width);
        sponge[j] = o.sponge_strength * (left + right);
      }
    }
  }

  const Coeffs& coeffs(double h) {
    if (auto it = cache.find(h); it != cache.end()) return it->second;
    if (cache.size() >= 8) cache.erase(cache.begin());
    Coeffs c;
    c.E.resize(modes);
    c.E2.resize(modes);
    c.Q.resize(modes);
    c.f1.resize(modes);
    c.f2.resize(modes);
    c.f3.resize(modes);
    const int M = contour_points;
    std::vector<Complex> roots(M);
    for (int j = 0; j < M; ++j) roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / M);
    for (std::size_t m = 0; m < modes; ++m) {
      const Complex z(0.0, h * k[m] * k[m] * k[m]);  // h * i k^3
      c.E[m] = std::exp(z);
      c.E2[m] = std::exp(0.5 * z);
      Complex q{}, a{}, b{}, g{};
      for (const Complex& r : roots) {
        const Complex w = z + r;
        const Complex ew = std::exp(w);
        const Complex w2 = w * w, w3 = w2 * w;
        q += (std::exp(0.5 * w) - 1.0) / w;
        a += (-4.0 - w + ew * (4.0 - 3.0 * w + w2)) / w3;
        b += (2.0 + w + ew * (-2.0 + w)) / w3;
        g += (-4.0 - 3.0 * w - w2 + ew * (4.0 - w)) / w3;
      }
      const double s = h / M;
      c.Q[m] = s * q;
      c.f1[m] = s * a;
      c.f2[m] = s * b;
      c.f3[m] = s * g;
    }
    return cache.emplace(h, std::move(c)).first->second;
  }

  // N(v) = -i k FFT(u^5), u^5 formed on the threefold padded grid.
  void nonlinear(const std::vector<Complex>& v, std::vector<Complex>& out) {
    std::fill(pad_spec.begin(), pad_spec.end(), Complex{});
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m + 1 < modes; ++m) pad_spec[m] = v[m] * inv_n;
    fft_pad.inverse(pad_spec, pad_real);
    double sup = 0.0;
    for (double& u : pad_real) {
      sup = std::max(sup, std::abs(u));
      const double u2 = u * u;
      u = u2 * u2 * u;
    }
    last_sup = std::isfinite(sup) ? sup : std::numeric_limits<double>::infinity();
    fft_pad.forward(pad_real, pad_spec);
    for (std::size_t m = 0; m + 1 < modes; ++m) out[m] = Complex(0.0, -k[m]) * (pad_spec[m] / 3.0);
    out[modes - 1] = 0.0;
  }

  void to_spectral(std::span<const double> u, std::vector<Complex>& v) {
    fft.forward(u, v);
    v[modes - 1] = 0.0;
  }

  void to_physical(const std::vector<Complex>& v, std::vector<double>& u) {
    fft.inverse(v, u);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& x : u) x *= inv_n;
  }

  void etdrk4(std::vector<Complex>& v, double h) {
    const Coeffs& c = coeffs(h);
    std::vector<Complex> Nv(modes), Na(modes), Nb(modes), Nc(modes), a(modes), b(modes), cc(modes);
    nonlinear(v, Nv);
    const double sup_start = last_sup;
    for (std::size_t m = 0; m < modes; ++m) a[m] = c.E2[m] * v[m] + c.Q[m] * Nv[m];
    nonlinear(a, Na);
    for (std::size_t m = 0; m < modes; ++m) b[m] = c.E2[m] * v[m] + c.Q[m] * Na[m];
    nonlinear(b, Nb);
    for (std::size_t m = 0; m < modes; ++m) cc[m] = c.E2[m] * a[m] + c.Q[m] * (2.0 * Nb[m] - Nv[m]);
    nonlinear(cc, Nc);
    for (std::size_t m = 0; m < modes; ++m) {
      v[m] = c.E[m] * v[m] + Nv[m] * c.f1[m] + 2.0 * (Na[m] + Nb[m]) * c.f2[m] + Nc[m] * c.f3[m];
    }
    last_sup = sup_start;
  }

  void apply_sponge(std::vector<Complex>& v, double h) {
    if (sponge.empty()) return;
    to_physical(v, real_buf);
    for (std::size_t j = 0; j < n; ++j) real_buf[j] *= std::exp(-sponge[j] * h);
    to_spectral(real_buf, v);
  }
};

GkdvSolver::GkdvSolver(DomainSpec domain, SolverOptions options) : domain_(domain), options_(options) {
  domain_.validate();
  require(options_.dt_max > 0.0 && options_.cfl > 0.0 && options_.dt_min > 0.0, ErrorCode::invalid_argument,
          "SolverOptions: dt_max, cfl and dt_min must be positive");
  require(options_.contour_points >= 8, ErrorCode::invalid_argument, "SolverOptions: need >= 8 contour points");
  require(options_.sponge_strength >= 0.0, ErrorCode::invalid_argument, "SolverOptions: negative sponge strength");
  impl_ = std::make_unique<Impl>(domain_, options_);
}

GkdvSolver::~GkdvSolver() = default;
GkdvSolver::GkdvSolver(GkdvSolver&&) noexcept = default;
GkdvSolver& GkdvSolver::operator=(GkdvSolver&&) noexcept = default;

double GkdvSolver::stable_dt(const Field& field) const {
  const double a = field.sup_norm();
  const double k_max = std::numbers::pi / domain_.dx();
  const double dt = options_.cfl / (k_max * std::max(1.0, 5.0 * a * a * a * a));
  return std::min(options_.dt_max, dt);
}

Field GkdvSolver::step(const Field& field, double dt) {
  require(field.domain() == domain_, ErrorCode::grid_mismatch, "GkdvSolver::step: field on a different domain");
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_argument, "GkdvSolver::step: dt must be positive");
  std::vector<Complex> v(impl_->modes);
  impl_->to_spectral(field.values(), v);
  impl_->etdrk4(v, dt);
  impl_->apply_sponge(v, dt);
  ++steps_;
  std::vector<double> u(domain_.n);
  impl_->to_physical(v, u);
  const double sup = sup_abs(u);
  if (!std::isfinite(sup) || sup > options_.blowup_amplitude) {
    throw BlowUpDetected(fmt::format("solution amplitude {} at t = {}", sup, field.t() + dt), field);
  }
  return Field(field.t() + dt, domain_, std::move(u));
}

Field GkdvSolver::advance(const Field& field, double t_target, double dt_fixed) {
  require(field.domain() == domain_, ErrorCode::grid_mismatch, "GkdvSolver::advance: field on a different domain");
  require(t_target >= field.t(), ErrorCode::invalid_argument, "GkdvSolver::advance: target before field time");
  if (t_target == field.t()) return field;

  double dt_target = dt_fixed > 0.0 ? dt_fixed : stable_dt(field);
  const double k_max = std::numbers::pi / domain_.dx();
  std::vector<Complex> v(impl_->modes), v_prev;
  impl_->to_spectral(field.values(), v);
  double t = field.t();
  const double t0 = field.t();
  double segment_start = t0;
  std::size_t done = 0;
  auto count_for = [&](double from) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil((t_target - from) / dt_target - 1e-9)));
  };
  std::size_t total = count_for(segment_start);
  double dt = (t_target - segment_start) / static_cast<double>(total);

  auto last_valid = [&](const std::vector<Complex>& spec, double time) {
    std::vector<double> u(domain_.n);
    impl_->to_physical(spec, u);
    for (double& x : u) {
      if (!std::isfinite(x)) x = 0.0;
    }
    return Field(time, domain_, std::move(u));
  };

  double t_prev = t;
  while (done < total) {
    v_prev = v;
    impl_->etdrk4(v, dt);
    impl_->apply_sponge(v, dt);
    ++steps_;
    ++done;
    const double sup = impl_->last_sup;
    t_prev = t;
    t = (done == total) ? t_target : segment_start + dt * static_cast<double>(done);
    if (!std::isfinite(sup) || sup > options_.blowup_amplitude) {
      throw BlowUpDetected(fmt::format("solution amplitude {} near t = {}", sup, t), last_valid(v_prev, t_prev));
    }
    if (dt_fixed <= 0.0 && done < total) {
      const double bound = options_.cfl / (k_max * std::max(1.0, 5.0 * std::pow(sup, 4.0)));
      if (bound < dt / 1.5) {
        dt_target = 0.8 * bound;
        if (dt_target < options_.dt_min) {
          throw BlowUpDetected(fmt::format("stable step {} below dt_min near t = {}", dt_target, t),
                               last_valid(v, t));
        }
        segment_start = t;
        total = count_for(segment_start);
        done = 0;
        dt = (t_target - segment_start) / static_cast<double>(total);
      }
    }
  }
  std::vector<double> u(domain_.n);
  impl_->to_physical(v, u);
  const double sup = sup_abs(u);
  if (!std::isfinite(sup) || sup > options_.blowup_amplitude) {
    throw BlowUpDetected(fmt::format("solution amplitude {} at t = {}", sup, t_target), last_valid(v_prev, t_prev));
  }
  return Field(t_target, domain_, std::move(u));
}

void GkdvSolver::evolve(const Field& field, double t_end, double snapshot_every,
                        const std::function<bool(const Snapshot&)>& on_snapshot, double dt_fixed) {
  require(t_end > field.t(), ErrorCode::invalid_argument, "evolve: t_end must exceed the field time");
  require(snapshot_every > 0.0, ErrorCode::invalid_argument, "evolve: snapshot interval must be positive");
  const double t0 = field.t();
  const auto count = static_cast<std::size_t>(std::ceil((t_end - t0) / snapshot_every - 1e-9));
  Field current = field;
  if (!on_snapshot({current, conserved(current)})) return;
  for (std::size_t i = 1; i <= count; ++i) {
    const double target = std::min(t_end, t0 + snapshot_every * static_cast<double>(i));
    current = advance(current, target, dt_fixed);
    if (!on_snapshot({current, conserved(current)})) return;
  }
}

std::vector<Snapshot> GkdvSolver::evolve(const Field& field, double t_end, double snapshot_every, double dt_fixed) {
  std::vector<Snapshot> out;
  evolve(
      field, t_end, snapshot_every,
      [&out](const Snapshot& s) {
        out.push_back(s);
        return true;
      },
      dt_fixed);
  return out;
}

// ---------------------------------------------------------------------------
// Tail decay

TailDecayReport verify_tail_decay(const Field& snapshot, const TailSpec& tail, const TailDecayOptions& options) {
  tail.validate();
  const double x_lo = 0.5 * snapshot.t() + 0.5 * tail.x0;
  const double x_hi = std::isnan(options.x_hi) ? 0.5 * tail.cutoff_start : options.x_hi;
  require(x_hi <= tail.cutoff_start, ErrorCode::measurement_refused,
          "verify_tail_decay: fit region reaches the cutoff zone");
  require(x_lo < x_hi && x_lo > snapshot.domain().x_min && x_hi < snapshot.domain().x_max,
          ErrorCode::measurement_refused,
          fmt::format("verify_tail_decay: trusted region ({}, {}) is empty or outside the box", x_lo, x_hi));

  double f_sup = 0.0;
  for (std::size_t j = 0; j < snapshot.size(); ++j) f_sup = std::max(f_sup, std::abs(tail.value(snapshot.x(j))));
  const double floor = options.noise_floor * f_sup;

  TailDecayReport r;
  r.x_lo = x_lo;
  r.x_hi = x_hi;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = -std::numeric_limits<double>::infinity();
  std::vector<double> lx, ld;
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    const double x = snapshot.x(j);
    if (x <= x_lo || x >= x_hi) continue;
    const double f = tail.value(x);
    const double d = std::abs(snapshot[j] - f);
    r.max_difference = std::max(r.max_difference, d);
    if (f != 0.0) {
      r.min_ratio = std::min(r.min_ratio, snapshot[j] / f);
      r.max_ratio = std::max(r.max_ratio, snapshot[j] / f);
    }
    if (d > floor) {
      lx.push_back(std::log(x));
      ld.push_back(std::log(d));
    }
  }
  require(lx.size() >= options.min_points, ErrorCode::measurement_refused,
          fmt::format("verify_tail_decay: only {} points above the noise floor {:.3e}", lx.size(), floor));

  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ld[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ld[i] - my);
  }
  require(sxx > 0.0, ErrorCode::measurement_refused, "verify_tail_decay: degenerate abscissae");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ld[i] - (r.intercept + r.slope * lx[i]);
    sse += e * e;
  }
  r.fit_rms = std::sqrt(sse / n);
  r.points_used = lx.size();
  return r;
}

// ---------------------------------------------------------------------------
// Composition

double field_value(const Field& field, double x) {
  const spectral::PeriodicInterpolator interp(field.values(), field.domain().x_min, field.domain().length());
  return interp(x);
}

Field compose_initial_data(const ComposeInput& in, const Field& q0, const profiles::ProfileSet& profiles) {
  require(in.lambda0 > 0.0 && std::isfinite(in.lambda0), ErrorCode::invalid_argument,
          "compose_initial_data: lambda0 must be positive");
  require(std::isfinite(in.b0) && std::isfinite(in.x0), ErrorCode::invalid_argument,
          "compose_initial_data: non-finite b0 or x0");
  const DomainSpec& d = q0.domain();
  const double reach_left = 30.0 + (in.b0 != 0.0 ? 2.0 * std::pow(std::abs(in.b0), -profiles::cutoff_gamma) : 0.0);
  require(in.x0 - in.lambda0 * reach_left > d.x_min && in.x0 + 30.0 * in.lambda0 < d.x_max, ErrorCode::geometry,
          "compose_initial_data: profile bundle does not fit inside the box");

  const GridFunction* eps = in.eps0;
  if (eps != nullptr) {
    const GridSpec& g = eps->grid();
    const double sup = eps->sup_norm();
    const std::size_t n = eps->size();
    double edge = 0.0;
    for (std::size_t i = 0; i < 3; ++i) edge = std::max({edge, std::abs((*eps)[i]), std::abs((*eps)[n - 1 - i])});
    require(edge <= 1e-10 * std::max(sup, 1e-300) || sup == 0.0, ErrorCode::interpolation_range,
            "compose_initial_data: eps0 does not vanish at the ends of its grid");
    const auto lq = profiles::lambda_q(g);
    const auto ylq = lq.map([](double y, double v) { return y * v; });
    const auto q = profiles::ground_state(g);
    for (const auto* dir : {&ylq, &lq, &q}) {
      const double ip = inner(*eps, *dir);
      require(std::abs(ip) <= in.orthogonality_tol, ErrorCode::orthogonality,
              fmt::format("compose_initial_data: eps0 orthogonality residual {:.3e}", ip));
    }
    const double lo = g.y_min, hi = g.y_max;
    require(in.x0 + in.lambda0 * lo > d.x_min && in.x0 + in.lambda0 * hi < d.x_max, ErrorCode::interpolation_range,
            "compose_initial_data: eps0 grid does not fit inside the box");
  }

  const double p0 = std::sqrt(in.lambda0) * field_value(q0, in.x0);
  const double amp = 1.0 / std::sqrt(in.lambda0);
  std::vector<double> u(d.n);
  for (std::size_t j = 0; j < d.n; ++j) {
    const double y = (d.node(j) - in.x0) / in.lambda0;
    double bundle = profiles::qb_at(in.b0, y, profiles) + p0 * profiles.Y0_at(y);
    if (eps != nullptr && y >= eps->grid().y_min && y <= eps->grid().y_max) bundle += interpolate(*eps, y);
    u[j] = amp * bundle + q0[j];
  }
  return Field(q0.t(), d, std::move(u));
}

// ---------------------------------------------------------------------------
// Snapshot files

void write_snapshot(const Field& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "write_snapshot: cannot open " + path.string());
  const auto& d = field.domain();
  out << "t,x_min,x_max,n\n";
  out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", field.t(), d.x_min, d.x_max, d.n);
  out << "u\n";
  for (double v : field.values()) out << fmt::format("{:.17g}\n", v);
  require(static_cast<bool>(out), ErrorCode::io, "write_snapshot: write failed for " + path.string());
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "read_snapshot: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == "t,x_min,x_max,n", ErrorCode::io, "read_snapshot: bad header in " + path.string());
  std::getline(in, line);
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream hdr(line);
  double t = 0.0;
  DomainSpec d;
  hdr >> t >> d.x_min >> d.x_max >> d.n;
  require(static_cast<bool>(hdr), ErrorCode::io, "read_snapshot: bad metadata in " + path.string());
  std::getline(in, line);
  require(line == "u", ErrorCode::io, "read_snapshot: missing sample header in " + path.string());
  std::vector<double> v;
  v.reserve(d.n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.push_back(std::stod(line));
  }
  require(v.size() == d.n, ErrorCode::io, "read_snapshot: sample count mismatch in " + path.string());
  return Field(t, d, std::move(v));
}

}  // namespace gkdv::pde
