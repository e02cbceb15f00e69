#pragma once

#include <optional>

#include "gkdv/field.hpp"

namespace gkdv {

/// m = [1/alpha] + 1 for alpha in (0, 1).
///
/// Reciprocals within 1e-12 (relative) of an integer are snapped to it so
/// that decimal inputs such as 0.2 give the intended m = 6.
int m_of_alpha(double alpha);

/// Amplitude convention of the solitary-wave profile.
///   paper_literal: ((a+1)(a+2)/2 * sech(a y/2))^(2/a)
///   ode_derived:   ((a+1)(a+2)/2 * sech^2(a y/2))^(1/a), which solves
///                  -c phi + phi'' + phi^(a+1)/(a+1) = 0 for c = 1.
enum class ConstantMode { paper_literal, ode_derived };

struct TravelingWaveSpec {
  double c = 1.0;
  double alpha = 0.5;
  ConstantMode constant_mode = ConstantMode::ode_derived;
};

/// Peak value c^(1/a) * phi(0) under the selected convention.
double traveling_wave_peak(const TravelingWaveSpec& spec);
/// c^(1/a) phi(sqrt(c) (x - c t)), evaluated pointwise.
double traveling_wave_value(const TravelingWaveSpec& spec, double x, double t);
/// Samples the wave on the grid; throws ContaminationError if the profile
/// reaches the seam neighbourhood.
Field traveling_wave(const TravelingWaveSpec& spec, const SpectralGrid& grid, double t);

struct ProfileResidual {
  double value = 0.0;
  /// Set for the zero profile, which trivially solves the ODE but is not a wave.
  bool degenerate = false;
};

/// ||-c phi' + phi''' + |phi|^a phi'||_2 / ||phi||_2 computed spectrally.
ProfileResidual profile_residual(const Field& phi, double c, double alpha);
double tw_residual(const TravelingWaveSpec& spec, const SpectralGrid& grid);

/// u0 = 2 lambda e^{i theta} / <x>^m + phi, with ||<x>^m phi||_inf <= lambda enforced.
Field cazenave_naumkin_data(double lambda, double theta, const SpectralGrid& grid, int m,
                            const std::optional<Field>& phi = std::nullopt);

}  // namespace gkdv
