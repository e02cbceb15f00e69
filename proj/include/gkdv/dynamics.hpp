#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/field.hpp"

namespace gkdv {

/// Parameters of  u_t + u_xxx + sign |u|^alpha u_x = 0.
struct ModelParams {
  double alpha = 0.5;
  int sign = +1;
  int m = 3;       ///< [1/alpha] + 1
  int s = 10;      ///< diagnostic Sobolev order, >= 2m + 4
  double lambda = 0.1;
  double delta = 1.0;
  /// Scales the nonlinear term; 1 for the equation itself. Setting it to 0
  /// reduces every integrator to the free Airy flow (used by tests).
  double coupling = 1.0;

  /// Fills m from alpha and defaults s to 2m + 4, then validates.
  static ModelParams make(double alpha, int sign = +1, std::optional<int> s = std::nullopt,
                          double lambda = 0.1, double delta = 1.0);
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

enum class Scheme { etdrk4, strang };
std::string to_string(Scheme scheme);

/// Per-slice record of the checks simulate() runs.
struct SliceEvent {
  double outer_mass = 0.0;      ///< outer_mass_fraction of the slice
  bool contaminated = false;    ///< outer_mass above kContainmentThreshold
  double weighted_lower = 0.0;  ///< min_x <x>^m |u|
  bool below_quarter_lambda = false;
};

struct Trajectory {
  ModelParams params;
  SpectralGrid grid;
  std::vector<double> times;
  std::vector<Field> slices;
  std::string method;  ///< "etdrk4", "strang", "picard", ...
  double dt = 0.0;     ///< integrator step, 0 when not produced by an integrator
  std::vector<SliceEvent> events;
  std::vector<std::string> warnings;

  std::size_t slice_count() const noexcept { return slices.empty() ? 0 : slices.size() - 1; }
  double final_time() const noexcept { return times.empty() ? 0.0 : times.back(); }
  bool contaminated() const noexcept;
};

/// Builds a trajectory with uniform times t_i = i T / M (no events).
Trajectory make_trajectory(const ModelParams& params, const SpectralGrid& grid, double T,
                           std::vector<Field> slices, std::string method);

/// Products in the nonlinear term are formed on a grid this many times finer.
inline constexpr std::size_t kNonlinearOversampling = 8;

/// -sign * coupling * dealias(|u|^alpha u_x), with |u|^alpha := (u conj u)^(alpha/2).
/// Real fields use d/dx(|u|^alpha u)/(alpha + 1), which keeps I1 and I3 exact
/// under the semi-discrete flow.
Field nonlinear_rhs(const Field& u, const ModelParams& params);

/// Cached exponential-integrator coefficients for one (grid, dt) pair.
///
/// The phi-functions of z = i sigma k^3 dt are evaluated by a 32-point
/// contour mean on the unit circle about z when |z| <= 0.5 and by their
/// closed forms otherwise.
class EtdRk4Stepper {
 public:
  EtdRk4Stepper(const SpectralGrid& grid, double dt);
  /// One step on Fourier coefficients in place.
  void step(CVector& coeffs, const ModelParams& params, bool real, double t) const;
  Field step(const Field& u, const ModelParams& params) const;
  double dt() const noexcept { return dt_; }

 private:
  SpectralGrid grid_;
  double dt_;
  CVector e_, e_half_, q_, f1_, f2_, f3_;
};

/// Half Airy step, explicit-midpoint nonlinear step, half Airy step.
class StrangStepper {
 public:
  StrangStepper(const SpectralGrid& grid, double dt);
  void step(CVector& coeffs, const ModelParams& params, bool real, double t) const;
  Field step(const Field& u, const ModelParams& params) const;
  double dt() const noexcept { return dt_; }

 private:
  SpectralGrid grid_;
  double dt_;
  CVector e_half_;
};

Field step_etdrk4(const Field& u, double dt, const ModelParams& params);
Field step_strang(const Field& u, double dt, const ModelParams& params);

using SliceHook = std::function<void(std::size_t index, double t, const Field& slice)>;

struct SimulateOptions {
  Scheme scheme = Scheme::etdrk4;
  SliceHook on_slice;
};

/// Integrates from u0 over [0, T] with step dt, storing M + 1 uniform slices.
/// dt must divide T / M. Throws BlowupError (carrying the last good slice)
/// on non-finite values; seam contamination is recorded as a warning.
Trajectory simulate(const Field& u0, double T, double dt, const ModelParams& params,
                    std::size_t slice_count, const SimulateOptions& options = {});

}  // namespace gkdv
