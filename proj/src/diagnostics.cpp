#include "gkdv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/parallel.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

InvariantTriple invariants(const Field& u, const ModelParams& params) {
  InvariantTriple r;
  r.formal = !u.is_real();
  r.I1 = integrate(u);
  const Field ux = spectral_derivative(u, 1);
  const double a = params.alpha;
  double mass = 0.0, grad = 0.0, pot = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    mass += std::norm(u[j]);
    grad += std::norm(ux[j]);
  }
  // |u|^(alpha+2) is only finitely smooth where u vanishes; sample it on the
  // grid the nonlinear term uses.
  const SpectralGrid fine = refined_grid(u.grid(), kNonlinearOversampling);
  CVector uf(fine.size());
  fine.inverse(pad_coeffs(to_spectral(u), fine.size()), uf);
  for (const Complex& z : uf) pot += std::pow(std::norm(z), 0.5 * (a + 2.0));
  const double dx = u.grid().dx();
  r.I2 = mass * dx;
  r.I3 = grad * dx - params.sign * 2.0 / ((a + 1.0) * (a + 2.0)) * pot * fine.dx();
  return r;
}

double WeightedReport::delta_sum() const noexcept {
  double s = hs + winf;
  for (double v : wl2_derivs) s += v;
  return s;
}

WeightedReport weighted_report(const Field& u, const ModelParams& params) {
  check_derivative_order(u.grid(), static_cast<std::size_t>(params.s), "weighted_report");
  WeightedReport r;
  const Field w = apply_weight(u, params.m);
  r.winf = w.max_abs();
  r.lower = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.size(); ++j) r.lower = std::min(r.lower, std::abs(w[j]));
  for (std::size_t j = 0; j < 4; ++j) {
    r.wl2_derivs[j] = l2_norm(apply_weight(spectral_derivative(u, j + 1), params.m));
  }
  r.hs = hs_norm(u, params.s);
  return r;
}

double weighted_partial_norm(const Field& u, double power, double half_width) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = u.grid().x(j);
    if (std::abs(x) <= half_width) acc += std::pow(1.0 + x * x, power) * std::norm(u[j]);
  }
  return std::sqrt(acc * u.grid().dx());
}

bool NonMembership::strictly_increasing() const noexcept {
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (!(norms[i] > norms[i - 1])) return false;
  }
  return !norms.empty();
}

NonMembership non_membership_growth(const Field& u, int m) {
  NonMembership r;
  const double L = u.grid().half_length();
  for (double w : {L / 8.0, L / 4.0, L / 2.0, L}) {
    r.half_widths.push_back(w);
    r.norms.push_back(weighted_partial_norm(u, m - 0.5, w));
  }
  return r;
}

AdmissibilityVerdict admissibility_check(const Field& u0, const ModelParams& params) {
  AdmissibilityVerdict v;
  v.weighted = weighted_report(u0, params);
  v.measured_lambda = v.weighted.lower;
  v.delta_sum = v.weighted.delta_sum();
  v.lambda_ok = v.measured_lambda >= params.lambda;
  v.delta_ok = v.delta_sum < params.delta;
  v.non_membership = non_membership_growth(u0, params.m);
  return v;
}

PersistenceSeries persistence_monitor(const Trajectory& traj, const Field& u0,
                                      const ModelParams& params) {
  if (!u0.grid().same_as(traj.grid)) {
    throw ConfigError("persistence_monitor: u0 lives on a different grid");
  }
  PersistenceSeries r;
  r.times = traj.times;
  r.lambda_half = params.lambda / 2.0;
  const std::size_t count = traj.slices.size();
  r.deviation.resize(count);
  r.lower.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const Field& u = traj.slices[i];
    double dev = 0.0, low = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double w = std::pow(japanese_bracket(u.grid().x(j)), params.m);
      dev = std::max(dev, w * std::abs(u[j] - u0[j]));
      low = std::min(low, w * std::abs(u[j]));
    }
    r.deviation[i] = dev;
    r.lower[i] = low;
  });
  r.sup_deviation = count ? *std::max_element(r.deviation.begin(), r.deviation.end()) : 0.0;
  r.inf_lower = count ? *std::min_element(r.lower.begin(), r.lower.end()) : 0.0;
  r.verdict = count > 0 && r.sup_deviation <= r.lambda_half && r.inf_lower >= r.lambda_half;
  return r;
}

double kato_smoothing_norm(const Field& u0, double T, std::size_t M) {
  if (!(T >= 0.0) || M == 0) throw ConfigError("kato_smoothing_norm: need T >= 0 and M >= 1");
  const SpectralGrid& grid = u0.grid();
  const std::size_t n = grid.size();
  CVector c0 = to_spectral(u0);
  for (std::size_t j = 0; j < n; ++j) c0[j] *= derivative_symbol(grid, j, 1);

  // Fixed block partition so the summation order does not depend on the thread count.
  const std::size_t slices = M + 1;
  const std::size_t blocks = std::min<std::size_t>(64, slices);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  const double h = T / static_cast<double>(M);
  parallel_for(blocks, [&](std::size_t b) {
    CVector c(n), u(n);
    auto& acc = partial[b];
    for (std::size_t i = b * slices / blocks; i < (b + 1) * slices / blocks; ++i) {
      const double t = h * static_cast<double>(i);
      const double w = (i == 0 || i == M) ? 0.5 * h : h;
      for (std::size_t j = 0; j < n; ++j) c[j] = c0[j] * airy_multiplier(grid, j, t);
      grid.inverse(c, u);
      for (std::size_t j = 0; j < n; ++j) acc[j] += w * std::norm(u[j]);
    }
  });
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) s += partial[b][j];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

namespace {

constexpr double kIdentityContainment = 1e-8;

Field multiply_by_x(const Field& f) {
  CVector v(f.values().begin(), f.values().end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] *= f.grid().x(j);
  if (f.is_real()) return Field::project_real(f.grid(), std::move(v));
  return Field(f.grid(), std::move(v), false);
}

double central_norm(const Field& f) {
  return weighted_partial_norm(f, 0.0, f.grid().half_length() / 2.0);
}

}  // namespace

IdentityResidual operator_identity_residual(const Field& f, double t) {
  const Field ut = airy_propagate(f, t);
  for (const Field* g : {&f, &ut}) {
    const double outer = outer_mass_fraction(*g);
    if (outer > kIdentityContainment) {
      std::ostringstream os;
      os << "operator_identity_residual: relative mass " << outer
         << " near the seam exceeds " << kIdentityContainment;
      throw ContaminationError(os.str());
    }
  }
  const Field lhs = airy_propagate(multiply_by_x(ut), -t);
  const Field xf = multiply_by_x(f);
  const Field f2 = spectral_derivative(f, 2);
  const double scale = std::max(central_norm(lhs), std::numeric_limits<double>::min());
  auto residual = [&](int s) { return central_norm(lhs - xf + (3.0 * s * t) * f2) / scale; };
  const double minus = residual(-1), plus = residual(+1);
  IdentityResidual r;
  // Ties (t = 0) resolve to the sign matching the Airy convention.
  r.sign = plus < minus ? +1 : -1;
  r.residual = std::min(plus, minus);
  r.wrong_sign_residual = std::max(plus, minus);
  if (central_norm(lhs) == 0.0) r.residual = r.wrong_sign_residual = 0.0;
  return r;
}

std::vector<DiagnosticRow> diagnostic_series(const Trajectory& traj) {
  std::vector<DiagnosticRow> rows(traj.slices.size());
  if (rows.empty()) return rows;
  const Field& u0 = traj.slices.front();
  parallel_for(rows.size(), [&](std::size_t i) {
    const Field& u = traj.slices[i];
    DiagnosticRow& row = rows[i];
    row.t = traj.times[i];
    row.inv = invariants(u, traj.params);
    row.weighted = weighted_report(u, traj.params);
    double dev = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      dev = std::max(dev, std::pow(japanese_bracket(u.grid().x(j)), traj.params.m) *
                              std::abs(u[j] - u0[j]));
    }
    row.deviation = dev;
  });
  return rows;
}

}  // namespace gkdv
