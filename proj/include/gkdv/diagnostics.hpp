#pragma once

#include <array>
#include <vector>

#include "gkdv/dynamics.hpp"

namespace gkdv {

struct InvariantTriple {
  Complex I1;
  double I2 = 0.0;
  double I3 = 0.0;
  /// Set for complex input, where the quantities are evaluated with |u| but
  /// are not conservation laws.
  bool formal = false;
};

/// I1 = int u, I2 = int |u|^2, I3 = int |u_x|^2 - sign 2/((a+1)(a+2)) int |u|^(a+2).
InvariantTriple invariants(const Field& u, const ModelParams& params);

struct WeightedReport {
  double winf = 0.0;                       ///< ||<x>^m u||_inf
  std::array<double, 4> wl2_derivs{};      ///< ||<x>^m d^(j+1) u||_2, j = 0..3
  double lower = 0.0;                      ///< min_x <x>^m |u|
  double hs = 0.0;                         ///< ||u||_{H^s}

  /// hs + winf + sum of wl2_derivs.
  double delta_sum() const noexcept;
};

WeightedReport weighted_report(const Field& u, const ModelParams& params);

/// ||<x>^power u||_2 restricted to |x| <= half_width.
double weighted_partial_norm(const Field& u, double power, double half_width);

/// ||<x>^(m - 1/2) u||_2 over nested windows |x| <= L/8, L/4, L/2, L.
/// Admissible data are not in this weighted space, so the values keep
/// growing (like sqrt(log L)) as the window doubles.
struct NonMembership {
  std::vector<double> half_widths;
  std::vector<double> norms;
  bool strictly_increasing() const noexcept;
};

NonMembership non_membership_growth(const Field& u, int m);

struct AdmissibilityVerdict {
  double measured_lambda = 0.0;
  double delta_sum = 0.0;
  bool lambda_ok = false;  ///< measured_lambda >= params.lambda
  bool delta_ok = false;   ///< delta_sum < params.delta
  NonMembership non_membership;
  WeightedReport weighted;

  bool admissible() const noexcept { return lambda_ok && delta_ok; }
};

AdmissibilityVerdict admissibility_check(const Field& u0, const ModelParams& params);

struct PersistenceSeries {
  std::vector<double> times;
  std::vector<double> deviation;  ///< ||<x>^m (u(t) - u0)||_inf
  std::vector<double> lower;      ///< min_x <x>^m |u(t)|
  double lambda_half = 0.0;
  double sup_deviation = 0.0;
  double inf_lower = 0.0;
  bool verdict = false;  ///< sup deviation <= lambda/2 and inf lower >= lambda/2
};

PersistenceSeries persistence_monitor(const Trajectory& traj, const Field& u0,
                                      const ModelParams& params);

/// max_x ( int_0^T |d_x U(t) u0 (x)|^2 dt )^(1/2) with the trapezoid rule on M + 1 slices.
double kato_smoothing_norm(const Field& u0, double T, std::size_t M);

struct IdentityResidual {
  double residual = 0.0;             ///< with the sign returned in `sign`
  double wrong_sign_residual = 0.0;  ///< with the opposite sign
  int sign = -1;                     ///< s' in U(-t) x U(t) f = x f - 3 s' t f''
};

/// Relative L2 residual of U(-t)(x U(t) f) - (x f - 3 s' t f'') on |x| < L/2
/// for both s' = +-1. Throws ContaminationError if f or U(t) f carries more
/// than 1e-8 of its mass near the seam.
IdentityResidual operator_identity_residual(const Field& f, double t);

struct DiagnosticRow {
  double t = 0.0;
  InvariantTriple inv;
  WeightedReport weighted;
  double deviation = 0.0;  ///< ||<x>^m (u(t) - u0)||_inf
};

/// One row per slice; slices are processed in parallel.
std::vector<DiagnosticRow> diagnostic_series(const Trajectory& traj);

}  // namespace gkdv
