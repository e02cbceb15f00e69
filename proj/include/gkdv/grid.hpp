#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gkdv {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Periodic grid of n = 2^p points on [-L, L) together with its FFT plans.
///
/// Copies share the immutable plan state, so a grid is cheap to pass by value
/// and safe to use concurrently. Transforms follow the FFT ordering
/// k_j = j*pi/L for j < n/2 and (j - n)*pi/L otherwise; the forward transform
/// is unnormalised and the inverse carries the 1/n factor.
class SpectralGrid {
 public:
  /// Throws ConfigError unless n is a power of two >= 16 and L > 0.
  SpectralGrid(std::size_t n, double half_length);

  std::size_t size() const noexcept;
  double half_length() const noexcept;
  double dx() const noexcept;
  /// Largest resolved wavenumber magnitude, n*pi/(2L).
  double k_max() const noexcept;
  std::size_t nyquist_index() const noexcept { return size() / 2; }

  std::span<const double> x() const noexcept;
  std::span<const double> wavenumbers() const noexcept;
  double x(std::size_t j) const noexcept { return x()[j]; }
  double k(std::size_t j) const noexcept { return wavenumbers()[j]; }

  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  /// Two grids are interchangeable when point count and half-length coincide.
  bool same_as(const SpectralGrid& other) const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// make_grid(n, L) is the named-constructor spelling of SpectralGrid(n, L).
SpectralGrid make_grid(std::size_t n, double half_length);

}  // namespace gkdv
