#include "gkdv/spectral.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "gkdv/errors.hpp"

namespace gkdv {

CVector to_spectral(const Field& f) {
  CVector out(f.size());
  f.grid().forward(f.values(), out);
  return out;
}

Field from_spectral(const SpectralGrid& grid, const CVector& coeffs, bool is_real) {
  CVector out(grid.size());
  grid.inverse(coeffs, out);
  if (is_real) return Field::project_real(grid, std::move(out));
  return Field(grid, std::move(out), false);
}

std::size_t max_derivative_order(const SpectralGrid& grid) noexcept { return grid.size() / 4; }

void check_derivative_order(const SpectralGrid& grid, std::size_t order, const char* context) {
  if (order > max_derivative_order(grid)) {
    std::ostringstream os;
    os << context << ": derivative order " << order << " exceeds the bound n/4 = "
       << max_derivative_order(grid) << " for n = " << grid.size()
       << "; (ik)^order amplification would be dominated by roundoff";
    throw PrecisionError(os.str());
  }
}

Complex derivative_symbol(const SpectralGrid& grid, std::size_t j, std::size_t order) {
  if (order == 0) return 1.0;
  if (j == grid.nyquist_index() && order % 2 == 1) return 0.0;
  const double k = grid.k(j);
  // i^order cycles through 1, i, -1, -i.
  static constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowersOfI[order % 4] * std::pow(k, static_cast<double>(order));
}

double airy_symbol(const SpectralGrid& grid, std::size_t j) {
  if (j == grid.nyquist_index()) return 0.0;
  const double k = grid.k(j);
  return kAirySign * k * k * k;
}

Complex airy_multiplier(const SpectralGrid& grid, std::size_t j, double t) {
  return std::polar(1.0, airy_symbol(grid, j) * t);
}

bool in_dealias_band(const SpectralGrid& grid, std::size_t j) {
  return std::abs(grid.k(j)) <= (2.0 / 3.0) * grid.k_max();
}

SpectralGrid refined_grid(const SpectralGrid& grid, std::size_t factor) {
  if (factor == 0) throw ConfigError("refined_grid: factor must be positive");
  if (factor == 1) return grid;
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, double>, SpectralGrid> cache;
  const std::pair key{grid.size() * factor, grid.half_length()};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_grid(key.first, key.second)).first;
  return it->second;
}

CVector pad_coeffs(const CVector& coeffs, std::size_t fine_n) {
  const std::size_t n = coeffs.size();
  if (fine_n < n) throw ConfigError("pad_coeffs: target grid is coarser");
  if (fine_n == n) return coeffs;
  const double scale = static_cast<double>(fine_n) / static_cast<double>(n);
  CVector out(fine_n, 0.0);
  for (std::size_t j = 0; j < n / 2; ++j) out[j] = scale * coeffs[j];
  for (std::size_t j = n / 2 + 1; j < n; ++j) out[fine_n - n + j] = scale * coeffs[j];
  out[n / 2] = 0.5 * scale * coeffs[n / 2];
  out[fine_n - n / 2] = 0.5 * scale * coeffs[n / 2];
  return out;
}

CVector truncate_coeffs(const CVector& fine, std::size_t n) {
  const std::size_t N = fine.size();
  if (n > N) throw ConfigError("truncate_coeffs: target grid is finer");
  const double scale = static_cast<double>(n) / static_cast<double>(N);
  CVector out(n, 0.0);
  for (std::size_t j = 0; j < n / 2; ++j) out[j] = scale * fine[j];
  for (std::size_t j = n / 2 + 1; j < n; ++j) out[j] = scale * fine[N - n + j];
  out[n / 2] = n == N ? fine[n / 2] : Complex(0.0);
  return out;
}

Field spectral_derivative(const Field& f, std::size_t order) {
  if (order == 0) return f;
  check_derivative_order(f.grid(), order, "spectral_derivative");
  CVector c = to_spectral(f);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= derivative_symbol(f.grid(), j, order);
  return from_spectral(f.grid(), c, f.is_real());
}

Field airy_propagate(const Field& f, double t) {
  if (t == 0.0) return f;
  CVector c = to_spectral(f);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= airy_multiplier(f.grid(), j, t);
  return from_spectral(f.grid(), c, f.is_real());
}

Field dealias(const Field& f) {
  CVector c = to_spectral(f);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!in_dealias_band(f.grid(), j)) c[j] = 0.0;
  }
  return from_spectral(f.grid(), c, f.is_real());
}

Field apply_weight(const Field& f, double power) {
  if (power == 0.0) return f;
  CVector v(f.values().begin(), f.values().end());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] *= std::pow(1.0 + f.grid().x(j) * f.grid().x(j), 0.5 * power);
  }
  if (f.is_real()) return Field::project_real(f.grid(), std::move(v));
  return Field(f.grid(), std::move(v), false);
}

Complex integrate(const Field& f) {
  Complex s = 0.0;
  for (const auto& v : f.values()) s += v;
  return s * f.grid().dx();
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s * f.grid().dx());
}

double l2_norm_spectral(const Field& f) { return hs_norm(f, 0.0); }

double hs_norm(const Field& f, double s) {
  const CVector c = to_spectral(f);
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double k = f.grid().k(j);
    acc += (s == 0.0 ? 1.0 : std::pow(1.0 + k * k, s)) * std::norm(c[j]);
  }
  const auto n = static_cast<double>(f.size());
  return std::sqrt(acc * f.grid().dx() / n);
}

double outer_mass_fraction(const Field& f, double outer_fraction) {
  const double L = f.grid().half_length();
  const double inner = (1.0 - outer_fraction) * L;
  double total = 0.0, outer = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = std::norm(f[j]);
    total += m;
    if (std::abs(f.grid().x(j)) > inner) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

bool is_contained(const Field& f, double threshold) {
  return outer_mass_fraction(f) <= threshold;
}

}  // namespace gkdv
