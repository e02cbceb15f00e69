#include "gkdv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/reference.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

ModelParams ModelParams::make(double alpha, int sign, std::optional<int> s, double lambda,
                              double delta) {
  ModelParams p;
  p.alpha = alpha;
  p.sign = sign;
  p.m = m_of_alpha(alpha);
  p.s = s.value_or(2 * p.m + 4);
  p.lambda = lambda;
  p.delta = delta;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  std::ostringstream os;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    os << "alpha = " << alpha << " must lie in (0, 1)";
  } else if (sign != 1 && sign != -1) {
    os << "sign = " << sign << " must be +1 or -1";
  } else if (m != m_of_alpha(alpha)) {
    os << "m = " << m << " does not equal [1/alpha] + 1 = " << m_of_alpha(alpha);
  } else if (s < 2 * m + 4) {
    os << "s = " << s << " must be at least 2m + 4 = " << 2 * m + 4;
  } else if (!(lambda > 0.0)) {
    os << "lambda = " << lambda << " must be positive";
  } else if (!(delta > 0.0)) {
    os << "delta = " << delta << " must be positive";
  } else if (!std::isfinite(coupling)) {
    os << "coupling must be finite";
  } else {
    return;
  }
  throw ConfigError(os.str());
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::etdrk4 ? "etdrk4" : "strang";
}

bool Trajectory::contaminated() const noexcept {
  return std::any_of(events.begin(), events.end(),
                     [](const SliceEvent& e) { return e.contaminated; });
}

Trajectory make_trajectory(const ModelParams& params, const SpectralGrid& grid, double T,
                           std::vector<Field> slices, std::string method) {
  if (slices.empty()) throw ConfigError("trajectory needs at least one slice");
  Trajectory traj{params, grid, {}, std::move(slices), std::move(method), 0.0, {}, {}};
  const std::size_t M = traj.slices.size() - 1;
  traj.times.resize(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    traj.times[i] = M == 0 ? 0.0 : T * static_cast<double>(i) / static_cast<double>(M);
  }
  return traj;
}

namespace {

// Fourier coefficients of -sign * coupling * |u|^alpha u_x, dealiased.
void nonlinear_coeffs(const SpectralGrid& grid, const CVector& coeffs, const ModelParams& p,
                      bool real, double t, CVector& out) {
  const std::size_t n = grid.size();
  out.assign(n, 0.0);
  if (p.coupling == 0.0) return;
  const SpectralGrid fine = refined_grid(grid, kNonlinearOversampling);
  const std::size_t N = fine.size();
  CVector u(N), work(N), fine_out(N);
  fine.inverse(pad_coeffs(coeffs, N), u);
  const double scale = -static_cast<double>(p.sign) * p.coupling;
  const double half_alpha = 0.5 * p.alpha;
  bool finite = true;
  if (real) {
    // Conservative form d/dx(|u|^alpha u)/(alpha + 1).
    for (std::size_t j = 0; j < N; ++j) {
      const double ur = u[j].real();
      work[j] = scale * std::pow(ur * ur, half_alpha) * ur;
      finite = finite && std::isfinite(work[j].real());
    }
  } else {
    CVector c = coeffs, ux(N);
    for (std::size_t j = 0; j < n; ++j) c[j] *= derivative_symbol(grid, j, 1);
    fine.inverse(pad_coeffs(c, N), ux);
    for (std::size_t j = 0; j < N; ++j) {
      work[j] = scale * std::pow(std::norm(u[j]), half_alpha) * ux[j];
      finite = finite && std::isfinite(work[j].real()) && std::isfinite(work[j].imag());
    }
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite nonlinear term at t = " << t;
    throw BlowupError(t, -1, os.str());
  }
  fine.forward(work, fine_out);
  out = truncate_coeffs(fine_out, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!in_dealias_band(grid, j)) {
      out[j] = 0.0;
    } else if (real) {
      out[j] *= derivative_symbol(grid, j, 1) / (p.alpha + 1.0);
    }
  }
}

using PhiFunction = Complex (*)(Complex);

Complex phi_half(Complex z) { return (std::exp(z / 2.0) - 1.0) / z; }
Complex phi_f1(Complex z) {
  return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z);
}
Complex phi_f2(Complex z) { return (2.0 + z + std::exp(z) * (z - 2.0)) / (z * z * z); }
Complex phi_f3(Complex z) {
  return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
}

constexpr int kContourPoints = 32;
constexpr double kContourSwitch = 0.5;

Complex evaluate_phi(PhiFunction f, Complex z) {
  if (std::abs(z) > kContourSwitch) return f(z);
  Complex sum = 0.0;
  for (int j = 1; j <= kContourPoints; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j - 0.5) / kContourPoints;
    sum += f(z + std::polar(1.0, theta));
  }
  return sum / static_cast<double>(kContourPoints);
}

void check_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
}

Field coeffs_to_field(const SpectralGrid& grid, const CVector& coeffs, bool real) {
  return from_spectral(grid, coeffs, real);
}

}  // namespace

Field nonlinear_rhs(const Field& u, const ModelParams& params) {
  CVector out;
  nonlinear_coeffs(u.grid(), to_spectral(u), params, u.is_real(), 0.0, out);
  return coeffs_to_field(u.grid(), out, u.is_real());
}

EtdRk4Stepper::EtdRk4Stepper(const SpectralGrid& grid, double dt) : grid_(grid), dt_(dt) {
  check_step(dt);
  const std::size_t n = grid.size();
  e_.resize(n);
  e_half_.resize(n);
  q_.resize(n);
  f1_.resize(n);
  f2_.resize(n);
  f3_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex z(0.0, airy_symbol(grid, j) * dt);
    e_[j] = airy_multiplier(grid, j, dt);
    e_half_[j] = airy_multiplier(grid, j, dt / 2.0);
    q_[j] = dt * evaluate_phi(phi_half, z);
    f1_[j] = dt * evaluate_phi(phi_f1, z);
    f2_[j] = dt * evaluate_phi(phi_f2, z);
    f3_[j] = dt * evaluate_phi(phi_f3, z);
  }
}

void EtdRk4Stepper::step(CVector& v, const ModelParams& params, bool real, double t) const {
  const std::size_t n = v.size();
  CVector nv, na, nb, nc, a(n), b(n), c(n);
  nonlinear_coeffs(grid_, v, params, real, t, nv);
  for (std::size_t j = 0; j < n; ++j) a[j] = e_half_[j] * v[j] + q_[j] * nv[j];
  nonlinear_coeffs(grid_, a, params, real, t + dt_ / 2.0, na);
  for (std::size_t j = 0; j < n; ++j) b[j] = e_half_[j] * v[j] + q_[j] * na[j];
  nonlinear_coeffs(grid_, b, params, real, t + dt_ / 2.0, nb);
  for (std::size_t j = 0; j < n; ++j) c[j] = e_half_[j] * a[j] + q_[j] * (2.0 * nb[j] - nv[j]);
  nonlinear_coeffs(grid_, c, params, real, t + dt_, nc);
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = e_[j] * v[j] + f1_[j] * nv[j] + 2.0 * f2_[j] * (na[j] + nb[j]) + f3_[j] * nc[j];
  }
}

Field EtdRk4Stepper::step(const Field& u, const ModelParams& params) const {
  CVector v = to_spectral(u);
  step(v, params, u.is_real(), 0.0);
  return coeffs_to_field(u.grid(), v, u.is_real());
}

StrangStepper::StrangStepper(const SpectralGrid& grid, double dt) : grid_(grid), dt_(dt) {
  check_step(dt);
  e_half_.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) e_half_[j] = airy_multiplier(grid, j, dt / 2.0);
}

void StrangStepper::step(CVector& v, const ModelParams& params, bool real, double t) const {
  const std::size_t n = v.size();
  for (std::size_t j = 0; j < n; ++j) v[j] *= e_half_[j];
  CVector nv, nmid, mid(n);
  nonlinear_coeffs(grid_, v, params, real, t, nv);
  for (std::size_t j = 0; j < n; ++j) mid[j] = v[j] + 0.5 * dt_ * nv[j];
  nonlinear_coeffs(grid_, mid, params, real, t + dt_ / 2.0, nmid);
  for (std::size_t j = 0; j < n; ++j) v[j] = e_half_[j] * (v[j] + dt_ * nmid[j]);
}

Field StrangStepper::step(const Field& u, const ModelParams& params) const {
  CVector v = to_spectral(u);
  step(v, params, u.is_real(), 0.0);
  return coeffs_to_field(u.grid(), v, u.is_real());
}

Field step_etdrk4(const Field& u, double dt, const ModelParams& params) {
  return EtdRk4Stepper(u.grid(), dt).step(u, params);
}

Field step_strang(const Field& u, double dt, const ModelParams& params) {
  return StrangStepper(u.grid(), dt).step(u, params);
}

namespace {

SliceEvent inspect_slice(const Field& u, const ModelParams& params) {
  SliceEvent e;
  e.outer_mass = outer_mass_fraction(u);
  e.contaminated = e.outer_mass > kContainmentThreshold;
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < u.size(); ++j) {
    lower = std::min(lower, std::pow(japanese_bracket(u.grid().x(j)), params.m) * std::abs(u[j]));
  }
  e.weighted_lower = lower;
  e.below_quarter_lambda = lower < params.lambda / 4.0;
  return e;
}

}  // namespace

Trajectory simulate(const Field& u0, double T, double dt, const ModelParams& params,
                    std::size_t slice_count, const SimulateOptions& options) {
  params.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("simulate: T must be positive");
  if (slice_count == 0) throw ConfigError("simulate: slice count must be positive");
  check_step(dt);
  const double slice_dt = T / static_cast<double>(slice_count);
  const double ratio = slice_dt / dt;
  const auto substeps = static_cast<long>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - static_cast<double>(substeps)) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "simulate: dt = " << dt << " does not divide the slice spacing T/M = " << slice_dt;
    throw ConfigError(os.str());
  }
  const double step = slice_dt / static_cast<double>(substeps);

  const SpectralGrid& grid = u0.grid();
  const bool real = u0.is_real();
  std::optional<EtdRk4Stepper> etd;
  std::optional<StrangStepper> strang;
  if (options.scheme == Scheme::etdrk4) {
    etd.emplace(grid, step);
  } else {
    strang.emplace(grid, step);
  }

  Trajectory traj = make_trajectory(params, grid, T, {u0}, to_string(options.scheme));
  traj.slices.clear();
  traj.times.clear();
  traj.slices.reserve(slice_count + 1);
  traj.dt = step;

  auto record = [&](std::size_t i, const Field& u) {
    const double t = slice_dt * static_cast<double>(i);
    traj.times.push_back(t);
    traj.slices.push_back(u);
    traj.events.push_back(inspect_slice(u, params));
    if (traj.events.back().contaminated) {
      std::ostringstream os;
      os << "domain-truncation-contaminated: slice " << i << " (t = " << t
         << ") has outer mass fraction " << traj.events.back().outer_mass;
      traj.warnings.push_back(os.str());
    }
    if (options.on_slice) options.on_slice(i, t, traj.slices.back());
  };

  record(0, u0);
  CVector v = to_spectral(u0);
  for (std::size_t i = 1; i <= slice_count; ++i) {
    try {
      for (long s = 0; s < substeps; ++s) {
        const double t = slice_dt * static_cast<double>(i - 1) + step * static_cast<double>(s);
        if (etd) {
          etd->step(v, params, real, t);
        } else {
          strang->step(v, params, real, t);
        }
      }
    } catch (const BlowupError& e) {
      std::ostringstream os;
      os << e.what() << " (last good slice " << i - 1 << ")";
      throw BlowupError(e.time(), static_cast<long>(i - 1), os.str());
    }
    Field u = from_spectral(grid, v, real);
    if (!u.all_finite()) {
      std::ostringstream os;
      os << "non-finite solution at t = " << slice_dt * static_cast<double>(i)
         << " (last good slice " << i - 1 << ")";
      throw BlowupError(slice_dt * static_cast<double>(i), static_cast<long>(i - 1), os.str());
    }
    record(i, u);
  }
  return traj;
}

}  // namespace gkdv
