#pragma once

#include <cmath>

#include "gkdv/field.hpp"

namespace gkdv {

/// Sign of the Airy phase: U(t) multiplies mode k by exp(i * kAirySign * k^3 * t).
/// With d/dx -> ik this is the flow of u_t = -u_xxx.
inline constexpr int kAirySign = +1;

/// Share of the domain, split evenly between both ends, treated as the seam
/// neighbourhood: points with |x| > (1 - kOuterFraction) L.
inline constexpr double kOuterFraction = 0.1;
/// Relative mass allowed in the seam neighbourhood before a run is flagged.
inline constexpr double kContainmentThreshold = 1e-6;

inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

CVector to_spectral(const Field& f);
Field from_spectral(const SpectralGrid& grid, const CVector& coeffs, bool is_real);

/// Largest derivative order the grid supports (n/4).
std::size_t max_derivative_order(const SpectralGrid& grid) noexcept;
/// Throws PrecisionError when `order` exceeds max_derivative_order.
void check_derivative_order(const SpectralGrid& grid, std::size_t order, const char* context);

/// (ik)^order for FFT index j. Odd orders vanish on the Nyquist mode so that
/// real data stays real.
Complex derivative_symbol(const SpectralGrid& grid, std::size_t j, std::size_t order);
/// kAirySign * k^3 for FFT index j; zero on the Nyquist mode (odd symbol).
double airy_symbol(const SpectralGrid& grid, std::size_t j);
/// exp(i * airy_symbol * t).
Complex airy_multiplier(const SpectralGrid& grid, std::size_t j, double t);
/// True when |k_j| <= (2/3) k_max.
bool in_dealias_band(const SpectralGrid& grid, std::size_t j);

/// Grid with `factor` times as many points on the same interval. Plans are
/// cached, so repeated calls are cheap.
SpectralGrid refined_grid(const SpectralGrid& grid, std::size_t factor);

/// Coefficients of the same trigonometric interpolant on fine_n >= n points,
/// scaled for the fine grid's transforms; the Nyquist mode is split evenly.
CVector pad_coeffs(const CVector& coeffs, std::size_t fine_n);

/// Keeps the modes |k| < k_max of an n-point grid from fine-grid coefficients
/// and rescales them; the coarse Nyquist mode is set to zero.
CVector truncate_coeffs(const CVector& fine, std::size_t n);

Field spectral_derivative(const Field& f, std::size_t order);
Field airy_propagate(const Field& f, double t);
Field dealias(const Field& f);
/// Pointwise multiplication by <x>^power.
Field apply_weight(const Field& f, double power);

/// Trapezoid (periodic) quadrature of the samples.
Complex integrate(const Field& f);
/// sqrt(dx * sum |u_j|^2).
double l2_norm(const Field& f);
/// The same norm evaluated from Fourier coefficients (Parseval).
double l2_norm_spectral(const Field& f);
/// sqrt(sum (1 + k^2)^s |u_k|^2) with the L2 normalisation above.
double hs_norm(const Field& f, double s);

/// Share of sum |u|^2 carried by points with |x| > (1 - outer_fraction) L.
double outer_mass_fraction(const Field& f, double outer_fraction = kOuterFraction);
bool is_contained(const Field& f, double threshold = kContainmentThreshold);

}  // namespace gkdv
