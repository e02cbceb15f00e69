#pragma once

#include <functional>
#include <span>

#include "gkdv/grid.hpp"

namespace gkdv {

/// Samples of a (possibly complex) function on a SpectralGrid.
///
/// A field flagged real keeps its imaginary parts identically zero: values
/// passed in must already be real to within 1e-12 of the largest modulus and
/// are then projected onto the real axis.
class Field {
 public:
  static constexpr double kRealTolerance = 1e-12;

  Field(SpectralGrid grid, CVector values, bool is_real);

  static Field zeros(const SpectralGrid& grid, bool is_real = true);
  static Field sample(const SpectralGrid& grid, const std::function<double(double)>& f);
  static Field sample_complex(const SpectralGrid& grid, const std::function<Complex(double)>& f);

  /// Trusted construction for results of real-preserving operations: the
  /// imaginary parts are dropped without the tolerance check.
  static Field project_real(SpectralGrid grid, CVector values);

  const SpectralGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool is_real() const noexcept { return is_real_; }
  Complex operator[](std::size_t j) const noexcept { return values_[j]; }

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);

 private:
  struct Trusted {};
  Field(SpectralGrid grid, CVector values, bool is_real, Trusted);

  SpectralGrid grid_;
  CVector values_;
  bool is_real_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Point x -> -x on the grid, i.e. index j -> (n - j) mod n.
Field reflect(const Field& f);

}  // namespace gkdv
