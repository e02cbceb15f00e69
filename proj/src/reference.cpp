#include "gkdv/reference.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

namespace {

void validate_wave(const TravelingWaveSpec& spec) {
  // alpha = 1 is admitted as the formal KdV limit of the profile formula.
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
    throw ConfigError("traveling wave: alpha must lie in (0, 1]");
  }
  if (!(spec.c > 0.0) || !std::isfinite(spec.c)) {
    throw ConfigError("traveling wave: speed c must be positive");
  }
}

double log_sech(double z) {
  const double a = std::abs(z);
  return -a + std::log(2.0) - std::log1p(std::exp(-2.0 * a));
}

// log of phi(y) for the unit-speed profile.
double log_profile(const TravelingWaveSpec& spec, double y) {
  const double a = spec.alpha;
  const double log_k = std::log((a + 1.0) * (a + 2.0) / 2.0);
  const double ls = log_sech(a * y / 2.0);
  if (spec.constant_mode == ConstantMode::paper_literal) return (2.0 / a) * (log_k + ls);
  return (1.0 / a) * (log_k + 2.0 * ls);
}

}  // namespace

int m_of_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " lies outside (0, 1)";
    throw ConfigError(os.str());
  }
  const double r = 1.0 / alpha;
  const double nearest = std::round(r);
  const double whole = std::abs(r - nearest) <= 1e-12 * r ? nearest : std::floor(r);
  return static_cast<int>(whole) + 1;
}

double traveling_wave_peak(const TravelingWaveSpec& spec) {
  validate_wave(spec);
  return std::pow(spec.c, 1.0 / spec.alpha) * std::exp(log_profile(spec, 0.0));
}

double traveling_wave_value(const TravelingWaveSpec& spec, double x, double t) {
  const double y = std::sqrt(spec.c) * (x - spec.c * t);
  return std::exp(std::log(spec.c) / spec.alpha + log_profile(spec, y));
}

Field traveling_wave(const TravelingWaveSpec& spec, const SpectralGrid& grid, double t) {
  validate_wave(spec);
  Field f = Field::sample(grid, [&](double x) { return traveling_wave_value(spec, x, t); });
  if (!is_contained(f)) {
    std::ostringstream os;
    os << "traveling wave at t = " << t << " carries relative mass " << outer_mass_fraction(f)
       << " near the seam";
    throw ContaminationError(os.str());
  }
  return f;
}

ProfileResidual profile_residual(const Field& phi, double c, double alpha) {
  const double norm = l2_norm(phi);
  if (norm == 0.0) return {0.0, true};
  const Field d1 = spectral_derivative(phi, 1);
  const Field d3 = spectral_derivative(phi, 3);
  CVector r(phi.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] = -c * d1[j] + d3[j] + std::pow(std::abs(phi[j]), alpha) * d1[j];
  }
  const Field res(phi.grid(), std::move(r), false);
  return {l2_norm(res) / norm, false};
}

double tw_residual(const TravelingWaveSpec& spec, const SpectralGrid& grid) {
  return profile_residual(traveling_wave(spec, grid, 0.0), spec.c, spec.alpha).value;
}

Field cazenave_naumkin_data(double lambda, double theta, const SpectralGrid& grid, int m,
                            const std::optional<Field>& phi) {
  if (!(lambda > 0.0)) throw ConfigError("cazenave_naumkin_data: lambda must be positive");
  if (m < 1) throw ConfigError("cazenave_naumkin_data: m must be a positive integer");
  const Complex phase = std::polar(2.0 * lambda, theta);
  CVector v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = phase * std::pow(japanese_bracket(grid.x(j)), -static_cast<double>(m));
  }
  bool real = true;
  if (phi) {
    if (!phi->grid().same_as(grid)) {
      throw ConfigError("cazenave_naumkin_data: perturbation lives on a different grid");
    }
    const double weighted = apply_weight(*phi, m).max_abs();
    if (weighted > lambda) {
      std::ostringstream os;
      os << "cazenave_naumkin_data: ||<x>^m phi||_inf = " << weighted << " exceeds lambda = "
         << lambda;
      throw ConfigError(os.str());
    }
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += (*phi)[j];
    real = phi->is_real();
  }
  double max_mod = 0.0, max_imag = 0.0;
  for (const auto& z : v) {
    max_mod = std::max(max_mod, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  real = real && max_imag <= Field::kRealTolerance * max_mod;
  return Field(grid, std::move(v), real);
}

}  // namespace gkdv
