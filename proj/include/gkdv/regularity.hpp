#pragma once

#include <string>
#include <vector>

#include "gkdv/dynamics.hpp"

namespace gkdv {

/// Smooth nondecreasing cutoff chi_{eps,b}: 0 for x < eps, 1 for x > b - eps.
///
/// chi' = K S((x - eps)/eps) S((b - eps - x)/eps) with the smooth step
/// S(y) = e^{-1/y} / (e^{-1/y} + e^{-1/(1-y)}), so chi' rises on [eps, 2 eps],
/// equals K = 1/(b - 3 eps) on [2 eps, b - 2 eps] and falls on [b - 2 eps, b - eps].
class CutoffFamily {
 public:
  /// Throws ConfigError unless eps > 0 and b >= 5 eps.
  CutoffFamily(double eps, double b);

  double eps() const noexcept { return eps_; }
  double b() const noexcept { return b_; }
  /// Plateau value of chi'.
  double slope() const noexcept { return slope_; }

  double value(double x) const;
  /// order in 0..3.
  double derivative(double x, int order) const;
  std::vector<double> sample(const SpectralGrid& grid, double shift, int order = 0) const;

 private:
  double eps_, b_, slope_;
};

CutoffFamily make_cutoff(double eps, double b);

/// The smooth step S on [0, 1] and its first two derivatives (0 and 1 outside).
double smooth_step(double y, int order = 0);

/// int (d^order u)^2 chi(x + shift) dx on [-L, L]. The derivative is
/// interpolated onto a grid with spacing <= eps/16 (at most 32 times finer)
/// and integrated by the trapezoid rule with the endpoint term of the
/// non-periodic window.
double windowed_energy(const Field& u, int order, const CutoffFamily& cut, double shift);

struct FrontParams {
  double x0 = 4.0;
  double v = 1.0;
  double eps_prime = 0.5;
  double R = 10.0;
  int l = 2;

  void validate() const;
};

/// chi(y) - chi(y - (R - b)): approximately the band eps <= y <= R - eps.
/// Needs R >= 2b - 2 eps.
double band_window_value(const CutoffFamily& cut, double R, double y);

/// int_0^T int (d^order u)^2 w(x + v t - x0) dx dt with w the band window of
/// width R, trapezoid in t over the trajectory slices.
double local_smoothing_integral(const Trajectory& traj, int order, const FrontParams& front,
                                const CutoffFamily& cut);

/// Terms of d/dt (1/2) int w^2 chi(x + v t - x0), w = d^order u:
///   A1 = (v/2) int w^2 chi', A2 = (3/2) int w_x^2 chi', A3 = (1/2) int w^2 chi''',
///   N  = int d^order(N(u)) w chi with N(u) = nonlinear_rhs(u),
/// so that the derivative equals A1 - A2 + A3 + N.
struct EnergyIdentityTerms {
  double A1 = 0.0, A2 = 0.0, A3 = 0.0, N = 0.0;
  double total() const noexcept { return A1 - A2 + A3 + N; }
};

EnergyIdentityTerms energy_identity_terms(const Field& u, int order, const CutoffFamily& cut,
                                          double shift, double v, const ModelParams& params);

struct OneSidedSpec {
  double x0 = 4.0;
  int s = 4;
  int l = 2;
  double lambda = 0.1;
  int m = 3;
  double amplitude = 1e-3;  ///< c_k
  double width = 4.0;       ///< Gaussian envelope width of the kink
};

/// (x0 - x)_+^(s + 0.6) exp(-((x0 - x)/width)^2) scaled by the amplitude.
double kink_value(const OneSidedSpec& spec, double x);

/// 2 lambda / <x>^m plus the kink: H^(s + 1.1 - 0) globally, smooth on (x0, inf).
/// Throws ConfigError if the kink reaches the seam or the lower bound
/// <x>^m |u0| >= lambda fails.
Field one_sided_data(const OneSidedSpec& spec, const SpectralGrid& grid);

struct RegularityOptions {
  OneSidedSpec data;
  double cutoff_b = 2.5;  ///< b of chi_{eps', b}
  double T = 1.0;
  double dt = 1e-3;
  std::size_t slices = 64;  ///< the smoothing integral is also evaluated on 2 * slices
  std::vector<int> orders;  ///< default s + 1 .. s + l
  int smoothing_order = 0;  ///< default s + l + 1
  int identity_order = 0;   ///< order of the energy-identity check, default s + 1
};

struct RegularityReport {
  int proxy_s = 0;
  int theorem_s = 0;
  std::vector<int> orders;
  int smoothing_order = 0;
  FrontParams front;
  double cutoff_eps = 0.0, cutoff_b = 0.0;
  double T = 0.0, dt = 0.0;

  std::vector<double> times;
  std::vector<std::vector<double>> windowed;   ///< [order][slice]
  std::vector<std::vector<double>> full_line;  ///< [order][slice]
  std::vector<double> c_star;                  ///< max_t windowed, per order
  std::vector<double> full_line_min;           ///< min_t full line, per order
  std::vector<double> contrast;                ///< full_line_min / c_star

  double c_star_star = 0.0;          ///< smoothing integral on 2M slices
  double c_star_star_coarse = 0.0;   ///< same on every other slice
  double smoothing_change = 0.0;     ///< relative difference of the two

  /// Static band strictly left of x0, per order, at t = 0 and t = T.
  std::vector<double> control_initial, control_final;

  /// Max over interior slices of |dE/dt (central difference) - identity| / scale.
  double identity_mismatch = 0.0;

  std::vector<std::string> warnings;
};

/// One-sided data (x0 and l taken from the front, lambda and m from params),
/// one simulate() run on 2 * slices slices, and every windowed functional.
RegularityReport regularity_experiment(const FrontParams& front, const ModelParams& params,
                                       const SpectralGrid& grid,
                                       const RegularityOptions& options);

}  // namespace gkdv
