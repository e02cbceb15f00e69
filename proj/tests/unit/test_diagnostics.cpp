#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "doctest.h"
#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/reference.hpp"
#include "gkdv/spectral.hpp"
#include "oracles.hpp"

using namespace gkdv;

namespace {

const double kPi = std::numbers::pi;

double sech(double x) { return 1.0 / std::cosh(x); }

Field gaussian(const SpectralGrid& g, double width = 1.0) {
  return Field::sample(g, [&](double x) { return std::exp(-x * x / (width * width)); });
}

Field random_band_limited(const SpectralGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  return Field::sample(g, [&](double x) {
    double v = 0.0;
    for (int k = 1; k <= 6; ++k) v += dist(rng) * std::cos(k * x) + dist(rng) * std::sin(k * x);
    return v;
  });
}

}  // namespace

TEST_CASE("invariants of the zero field and of random fields") {
  const auto g = make_grid(256, kPi);
  const auto p = ModelParams::make(0.5);
  const auto z = invariants(Field::zeros(g), p);
  CHECK(z.I1 == Complex(0.0));
  CHECK(z.I2 == 0.0);
  CHECK(z.I3 == 0.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Field u = random_band_limited(g, seed);
    const double l2 = l2_norm(u);
    CHECK(invariants(u, p).I2 == doctest::Approx(l2 * l2).epsilon(1e-12));
  }
}

TEST_CASE("invariants of sech^2 against adaptive quadrature") {
  const double L = 32.0 * kPi;
  const auto g = make_grid(1024, L);
  const Field u = Field::sample(g, [](double x) { return std::pow(sech(x / 2.0), 2); });
  for (int sign : {1, -1}) {
    const auto p = ModelParams::make(0.5, sign);
    const double a = p.alpha;
    const auto inv = invariants(u, p);
    const double I1 = oracle::integrate([](double x) { return std::pow(sech(x / 2.0), 2); }, -L, L);
    const double I2 = oracle::integrate([](double x) { return std::pow(sech(x / 2.0), 4); }, -L, L);
    const double grad = oracle::integrate(
        [](double x) {
          const double d = -std::pow(sech(x / 2.0), 2) * std::tanh(x / 2.0);
          return d * d;
        },
        -L, L);
    const double pot = oracle::integrate(
        [&](double x) { return std::pow(sech(x / 2.0), 2.0 * (a + 2.0)); }, -L, L);
    const double I3 = grad - sign * 2.0 / ((a + 1.0) * (a + 2.0)) * pot;
    CHECK(inv.I1.real() == doctest::Approx(I1).epsilon(1e-8));
    CHECK(inv.I1.imag() == 0.0);
    CHECK(inv.I2 == doctest::Approx(I2).epsilon(1e-8));
    CHECK(inv.I3 == doctest::Approx(I3).epsilon(1e-8));
    CHECK_FALSE(inv.formal);
  }
}

TEST_CASE("complex input is flagged formal") {
  const auto g = make_grid(256, 20.0);
  const Field u = Field::sample_complex(g, [](double x) { return std::exp(Complex(-x * x, x)); });
  CHECK(invariants(u, ModelParams::make(0.5)).formal);
}

TEST_CASE("weighted report") {
  const double L = 32.0 * kPi;
  const auto g = make_grid(1024, L);
  const auto p = ModelParams::make(0.5);
  const double lambda = 0.1;

  const auto cn = weighted_report(cazenave_naumkin_data(lambda, 0.0, g, p.m), p);
  CHECK(cn.lower == doctest::Approx(2.0 * lambda).epsilon(1e-15));
  CHECK(cn.winf == doctest::Approx(2.0 * lambda).epsilon(1e-15));

  const auto gauss = weighted_report(gaussian(g), p);
  CHECK(gauss.lower < 1e-100);
  CHECK(gauss.lower <= gauss.winf);
  for (double v : gauss.wl2_derivs) CHECK(v >= 0.0);
  CHECK(gauss.hs > 0.0);

  CHECK_THROWS_AS(weighted_report(gaussian(make_grid(32, 10.0)), p), PrecisionError);
}

namespace {

// ||<x>^3 d/dx <x>^-3||_2 on the grid and by quadrature of ||3x / (1 + x^2)||_2.
std::pair<double, double> weighted_derivative_pair(std::size_t n) {
  const double L = 32.0 * kPi;
  const auto g = make_grid(n, L);
  const Field bump = Field::sample(g, [](double x) { return std::pow(1.0 + x * x, -1.5); });
  const double exact = std::sqrt(oracle::integrate(
      [](double x) { return 9.0 * x * x / std::pow(1.0 + x * x, 2); }, -L, L));
  return {weighted_report(bump, ModelParams::make(0.5)).wl2_derivs[0], exact};
}

}  // namespace

// The periodic extension of <x>^-3 has a kink of size 6/L^4 at the seam; its
// Gibbs ringing, weighted by <x>^3 ~ 1e6, limits agreement to ~2e-6 at n = 2048.
TEST_CASE("weighted derivative norm against quadrature") {
  const auto [grid, exact] = weighted_derivative_pair(2048);
  CHECK(grid == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("weighted derivative norm at 1e-8" * doctest::may_fail()) {
  const auto [grid, exact] = weighted_derivative_pair(2048);
  MESSAGE("grid " << grid << " quadrature " << exact << " relative "
                  << std::abs(grid - exact) / exact);
  CHECK(grid == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("admissibility verdicts") {
  const auto g = make_grid(1024, 32.0 * kPi);
  auto p = ModelParams::make(0.5, 1, std::nullopt, 0.1, 1e9);

  const Field phi = Field::sample(g, [](double x) { return 0.05 * std::exp(-x * x); });
  const auto ok = admissibility_check(cazenave_naumkin_data(0.1, 0.0, g, p.m, phi), p);
  CHECK(ok.admissible());
  CHECK(ok.measured_lambda >= 0.1);
  CHECK(ok.non_membership.strictly_increasing());

  const auto wave =
      admissibility_check(traveling_wave({1.0, 0.5, ConstantMode::ode_derived}, g, 0.0), p);
  CHECK_FALSE(wave.lambda_ok);
  CHECK_FALSE(wave.admissible());

  const auto zero = admissibility_check(Field::zeros(g), p);
  CHECK(zero.measured_lambda == 0.0);
  CHECK_FALSE(zero.admissible());

  p.delta = 0.5 * ok.delta_sum;
  CHECK_FALSE(admissibility_check(cazenave_naumkin_data(0.1, 0.0, g, p.m, phi), p).delta_ok);
}

TEST_CASE("non-membership grows under domain doubling") {
  std::vector<double> norms;
  for (int k = 0; k < 4; ++k) {
    const double L = 8.0 * kPi * std::pow(2.0, k);
    const auto g = make_grid(256u << k, L);
    const Field u = cazenave_naumkin_data(0.1, 0.0, g, 3);
    norms.push_back(weighted_partial_norm(u, 2.5, L));
  }
  for (std::size_t i = 1; i < norms.size(); ++i) {
    CHECK(norms[i] > norms[i - 1]);
    // ||<x>^-1/2 * 0.2||^2 = 0.04 * 2 asinh(L): each doubling adds 0.08 log 2.
    CHECK(norms[i] * norms[i] - norms[i - 1] * norms[i - 1] ==
          doctest::Approx(0.08 * std::log(2.0)).epsilon(1e-3));
  }
}

TEST_CASE("persistence monitor") {
  // n = 2048 resolves the e^{-|k|} spectrum of <x>^-3 well enough that the
  // weighted deviation is not swamped by the aliasing floor.
  const auto g = make_grid(2048, 32.0 * kPi);
  auto p = ModelParams::make(0.5, 1, std::nullopt, 0.1, 1e9);
  const Field u0 = cazenave_naumkin_data(0.1, 0.0, g, p.m);

  p.coupling = 0.0;
  auto deviation_at = [&](double T) {
    const auto traj = simulate(u0, T, T / 8.0, p, 1);
    return persistence_monitor(traj, u0, p);
  };
  const auto first = deviation_at(1e-3);
  CHECK(first.deviation.front() == 0.0);
  CHECK(first.lower.front() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(first.verdict);
  // Linear slope: deviation ~ T * ||<x>^m d^3 u0||, so halving T halves it.
  const double ratio = first.sup_deviation / deviation_at(5e-4).sup_deviation;
  MESSAGE("deviation ratio under T halving: " << ratio);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));

  const auto long_run = deviation_at(0.5);
  CHECK(long_run.sup_deviation > long_run.lambda_half);
  CHECK_FALSE(long_run.verdict);
}

TEST_CASE("kato smoothing norm") {
  const auto g = make_grid(512, 64.0);
  CHECK(kato_smoothing_norm(Field::zeros(g), 1.0, 64) == 0.0);
  const Field u0 = gaussian(g);
  const double bound = l2_norm(u0) / std::sqrt(3.0);
  double prev = 0.0;
  for (double T : {0.5, 1.0, 2.0, 4.0}) {
    const double k = kato_smoothing_norm(u0, T, static_cast<std::size_t>(400 * T));
    CHECK(k >= prev);
    CHECK(k <= bound * 1.05);
    prev = k;
  }
  CHECK(kato_smoothing_norm(u0, 1.0, 400) == kato_smoothing_norm(u0, 1.0, 400));
}

TEST_CASE("commutator identity") {
  const auto g = make_grid(2048, 64.0 * kPi);
  const Field f = gaussian(g);
  const auto zero = operator_identity_residual(f, 0.0);
  CHECK(zero.residual == 0.0);

  const auto r = operator_identity_residual(f, 0.5);
  CHECK(r.residual <= 1e-6);
  CHECK(r.wrong_sign_residual >= 1e3 * r.residual);
  CHECK(r.sign == -1);

  CHECK_THROWS_AS(operator_identity_residual(Field::sample(g, [](double x) {
                    return 1.0 / (1.0 + x * x);
                  }),
                                             0.5),
                  ContaminationError);
}

TEST_CASE("commutator residual shrinks under grid refinement") {
  double prev = 0.0;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const Field f = gaussian(make_grid(n, 64.0 * kPi));
    const double r = operator_identity_residual(f, 0.5).residual;
    MESSAGE("n = " << n << " residual " << r);
    if (prev > 0.0) CHECK(r <= 0.5 * prev);
    prev = r;
  }
}

TEST_CASE("diagnostic series") {
  const auto g = make_grid(256, 40.0);
  const auto p = ModelParams::make(0.5);
  const Field u0 = Field::sample(g, [](double x) { return std::pow(sech(x / 2.0), 2); });
  const auto traj = simulate(u0, 0.5, 1e-3, p, 5);
  const auto rows = diagnostic_series(traj);
  REQUIRE(rows.size() == 6);
  CHECK(rows.front().deviation == 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].t == traj.times[i]);
    CHECK(rows[i].inv.I2 == doctest::Approx(rows.front().inv.I2).epsilon(1e-8));
  }
}
