#include "gkdv/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

void require_compatible(const Field& a, const Field& b, const char* op) {
  if (!a.grid().same_as(b.grid())) {
    throw ConfigError(std::string("field ") + op + ": operands live on different grids");
  }
}

}  // namespace

Field::Field(SpectralGrid grid, CVector values, bool is_real, Trusted)
    : grid_(std::move(grid)), values_(std::move(values)), is_real_(is_real) {
  if (is_real_) {
    for (auto& v : values_) v = Complex(v.real(), 0.0);
  }
}

Field::Field(SpectralGrid grid, CVector values, bool is_real)
    : grid_(std::move(grid)), values_(std::move(values)), is_real_(is_real) {
  if (values_.size() != grid_.size()) {
    std::ostringstream os;
    os << "field has " << values_.size() << " values for a grid of " << grid_.size() << " points";
    throw ConfigError(os.str());
  }
  if (is_real_) {
    double max_mod = 0.0, max_imag = 0.0;
    for (const auto& v : values_) {
      max_mod = std::max(max_mod, std::abs(v));
      max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_imag > kRealTolerance * max_mod) {
      std::ostringstream os;
      os << "field flagged real carries imaginary part " << max_imag << " (max modulus " << max_mod
         << ")";
      throw ConfigError(os.str());
    }
    for (auto& v : values_) v = Complex(v.real(), 0.0);
  }
}

Field Field::zeros(const SpectralGrid& grid, bool is_real) {
  return Field(grid, CVector(grid.size()), is_real, Trusted{});
}

Field Field::sample(const SpectralGrid& grid, const std::function<double(double)>& f) {
  CVector v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
  return Field(grid, std::move(v), true, Trusted{});
}

Field Field::sample_complex(const SpectralGrid& grid, const std::function<Complex(double)>& f) {
  CVector v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
  return Field(grid, std::move(v), false, Trusted{});
}

Field Field::project_real(SpectralGrid grid, CVector values) {
  if (values.size() != grid.size()) throw ConfigError("field length does not match grid");
  return Field(std::move(grid), std::move(values), true, Trusted{});
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

Field& Field::operator+=(const Field& other) {
  require_compatible(*this, other, "+=");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  is_real_ = is_real_ && other.is_real_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(*this, other, "-=");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  is_real_ = is_real_ && other.is_real_;
  return *this;
}

Field& Field::operator*=(double a) {
  for (auto& v : values_) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field reflect(const Field& f) {
  const std::size_t n = f.size();
  CVector out(n);
  for (std::size_t j = 0; j < n; ++j) out[(n - j) % n] = f[j];
  return f.is_real() ? Field::project_real(f.grid(), std::move(out))
                     : Field(f.grid(), std::move(out), false);
}

}  // namespace gkdv
