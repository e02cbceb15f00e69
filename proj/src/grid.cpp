#include "gkdv/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const Complex* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

}  // namespace

struct SpectralGrid::Impl {
  std::size_t n;
  double half_length;
  double dx;
  std::vector<double> x;
  std::vector<double> k;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  Impl(std::size_t n_, double L) : n(n_), half_length(L), dx(2.0 * L / static_cast<double>(n_)) {
    x.resize(n);
    k.resize(n);
    const double dk = std::numbers::pi / L;
    const auto sn = static_cast<long>(n);
    for (long j = 0; j < sn; ++j) {
      x[j] = -L + static_cast<double>(j) * dx;
      k[j] = static_cast<double>(j < sn / 2 ? j : j - sn) * dk;
    }
    CVector a(n), b(n);
    // FFTW_ESTIMATE keeps plan selection, and hence results, reproducible run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_plan = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()),
                                    FFTW_FORWARD, flags);
    inverse_plan = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()),
                                    FFTW_BACKWARD, flags);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(inverse_plan);
  }

  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;
};

std::size_t SpectralGrid::size() const noexcept { return impl_->n; }
double SpectralGrid::half_length() const noexcept { return impl_->half_length; }
double SpectralGrid::dx() const noexcept { return impl_->dx; }
double SpectralGrid::k_max() const noexcept {
  return static_cast<double>(impl_->n / 2) * std::numbers::pi / impl_->half_length;
}
std::span<const double> SpectralGrid::x() const noexcept { return impl_->x; }
std::span<const double> SpectralGrid::wavenumbers() const noexcept { return impl_->k; }

void SpectralGrid::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != impl_->n || out.size() != impl_->n) {
    throw ConfigError("forward transform: buffer length does not match grid");
  }
  if (in.data() == out.data()) {
    CVector tmp(in.begin(), in.end());
    fftw_execute_dft(impl_->forward_plan, as_fftw(tmp.data()), as_fftw(out.data()));
  } else {
    fftw_execute_dft(impl_->forward_plan, as_fftw(in.data()), as_fftw(out.data()));
  }
}

void SpectralGrid::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != impl_->n || out.size() != impl_->n) {
    throw ConfigError("inverse transform: buffer length does not match grid");
  }
  if (in.data() == out.data()) {
    CVector tmp(in.begin(), in.end());
    fftw_execute_dft(impl_->inverse_plan, as_fftw(tmp.data()), as_fftw(out.data()));
  } else {
    fftw_execute_dft(impl_->inverse_plan, as_fftw(in.data()), as_fftw(out.data()));
  }
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (auto& v : out) v *= scale;
}

bool SpectralGrid::same_as(const SpectralGrid& other) const noexcept {
  return impl_ == other.impl_ ||
         (impl_->n == other.impl_->n && impl_->half_length == other.impl_->half_length);
}

namespace {

void validate_grid(std::size_t n, double half_length) {
  if (n < 16 || !std::has_single_bit(n)) {
    std::ostringstream os;
    os << "grid point count " << n << " must be a power of two >= 16";
    throw ConfigError(os.str());
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    std::ostringstream os;
    os << "grid half-length " << half_length << " must be positive and finite";
    throw ConfigError(os.str());
  }
}

}  // namespace

SpectralGrid::SpectralGrid(std::size_t n, double half_length) {
  validate_grid(n, half_length);
  impl_ = std::make_shared<const Impl>(n, half_length);
}

SpectralGrid make_grid(std::size_t n, double half_length) { return SpectralGrid(n, half_length); }

}  // namespace gkdv
