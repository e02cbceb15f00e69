#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gkdv/dynamics.hpp"
#include "gkdv/errors.hpp"

namespace gkdv {

/// Components of the X_T norm of a trajectory.
struct XTNormReport {
  double hs_sup = 0.0;                      ///< max_t ||u||_{H^s}
  double weighted_sup_inf = 0.0;            ///< max_t ||<x>^m u||_inf
  std::array<double, 4> weighted_deriv_l2{};  ///< max_t ||<x>^m d^l u||_2, l = 1..4
  double smoothing = 0.0;                   ///< max_x ||d^(s+1) u||_{L2_T}
  double total = 0.0;
  /// The L2_T quadrature is trusted only with at least 64 slices per unit time.
  bool smoothing_trusted = false;
};

XTNormReport xt_norm(const Trajectory& traj, const ModelParams& params);

/// X_T norm of a - b; both must share grid and slice times.
double xt_distance(const Trajectory& a, const Trajectory& b, const ModelParams& params);

/// Duhamel map: slice i becomes U(t_i) u0 + int_0^{t_i} U(t_i - s) N(u(s)) ds, with
/// N = nonlinear_rhs and the integral taken by the composite trapezoid rule
/// over the stored slices.
Trajectory duhamel_apply(const Trajectory& traj, const Field& u0, const ModelParams& params);

struct PicardOptions {
  std::size_t max_iter = 50;
  /// Stopping threshold on d(u^(k+1), u^(k)); relative to the X_T norm of
  /// the free evolution unless `relative_tol` is false.
  double tol = 1e-9;
  bool relative_tol = true;
  /// Skip the admissibility precondition.
  bool force = false;
};

struct ContractionReport {
  std::vector<double> distances;  ///< d_k = d(u^(k+1), u^(k)), k = 0, 1, ...
  std::vector<double> ratios;     ///< d_k / d_(k-1), k >= 1
  double threshold = 0.0;         ///< absolute stopping threshold used
  bool converged = false;
  double T = 0.0;
  std::size_t slices = 0;
  /// max over iterates and slices of ||<x>^m (u(t) - u0)||_inf; X_T requires <= lambda/2.
  double ball_deviation = 0.0;
  double lambda_half = 0.0;

  std::size_t iterations() const noexcept { return distances.size(); }
  double median_ratio() const;
  /// r_k < 1 for every recorded ratio past the first.
  bool contracting_after_first() const noexcept;
  bool in_ball() const noexcept { return ball_deviation <= lambda_half; }
};

/// Raised after three consecutive ratios >= 1, or when an iterate blows up.
class PicardDivergence : public NonContractionError {
 public:
  PicardDivergence(ContractionReport report, const std::string& what)
      : NonContractionError(what), report_(std::move(report)) {}
  const ContractionReport& report() const noexcept { return report_; }

 private:
  ContractionReport report_;
};

struct PicardResult {
  Trajectory trajectory;
  ContractionReport report;
};

/// Iterates u^(0)(t) = U(t) u0, u^(k+1) = duhamel_apply(u^(k)) on M + 1 slices of [0, T].
/// Throws ConfigError for inadmissible data unless options.force is set.
PicardResult picard_solve(const Field& u0, double T, const ModelParams& params, std::size_t M,
                          const PicardOptions& options = {});

struct ContractionSearch {
  double T = 0.0;
  std::size_t slices = 0;
  std::optional<PicardResult> result;
  std::vector<double> tried;  ///< every T attempted, in order
  std::vector<ContractionReport> reports;  ///< one per attempt
};

/// Raised when no halving of T gave a contracting iteration.
class ContractionSearchFailure : public NonContractionError {
 public:
  ContractionSearchFailure(ContractionSearch search, const std::string& what)
      : NonContractionError(what), search_(std::move(search)) {}
  const ContractionSearch& search() const noexcept { return search_; }

 private:
  ContractionSearch search_;
};

/// Halves T from T_start until the iteration converges with every ratio past
/// the first below 1, median ratio <= 0.5 and all iterates inside the lambda/2 ball. The slice count is
/// max(min_slices, ceil(slices_per_unit * T)). Throws ContractionSearchFailure.
ContractionSearch find_contraction_time(const Field& u0, const ModelParams& params,
                                        double T_start, double slices_per_unit,
                                        std::size_t min_slices, std::size_t max_halvings,
                                        const PicardOptions& options = {});

}  // namespace gkdv
