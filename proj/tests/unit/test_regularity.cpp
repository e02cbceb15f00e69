#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/regularity.hpp"
#include "gkdv/spectral.hpp"
#include "oracles.hpp"

using namespace gkdv;

namespace {

const double kPi = std::numbers::pi;

// Dense samples, 1e4 per unit length, over [a, b].
template <class F>
void dense(double a, double b, F&& f) {
  const auto count = static_cast<std::size_t>(std::ceil((b - a) * 1e4));
  for (std::size_t i = 0; i <= count; ++i) f(a + (b - a) * static_cast<double>(i) / count);
}

// Least-squares slope of -log|c_k| against log k over k0 <= k <= k1.
double decay_exponent(const Field& f, double k0, double k1) {
  const CVector c = to_spectral(f);
  const auto& g = f.grid();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (std::size_t j = 1; j < g.size() / 2; ++j) {
    const double k = g.k(j);
    if (k < k0 || k > k1) continue;
    const double x = std::log(k), y = std::log(std::abs(c[j]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1.0;
  }
  return -(count * sxy - sx * sy) / (count * sxx - sx * sx);
}

Field gaussian(const SpectralGrid& g, double amp = 0.5) {
  return Field::sample(g, [&](double x) { return amp * std::exp(-x * x / 4.0); });
}

Trajectory linear_trajectory(const Field& u0, double T, std::size_t M) {
  auto p = ModelParams::make(0.5);
  std::vector<Field> slices;
  for (std::size_t i = 0; i <= M; ++i) slices.push_back(airy_propagate(u0, T * i / M));
  return make_trajectory(p, u0.grid(), T, std::move(slices), "airy");
}

}  // namespace

TEST_CASE("cutoff family invariants") {
  for (auto [eps, b] : {std::pair{0.1, 1.0}, std::pair{0.5, 2.5}, std::pair{0.2, 3.0}}) {
    const auto cut = make_cutoff(eps, b);
    CAPTURE(eps);
    CAPTURE(b);
    CHECK(cut.value(0.0) == 0.0);
    CHECK(cut.value(b) == 1.0);
    CHECK(cut.slope() == doctest::Approx(1.0 / (b - 3.0 * eps)).epsilon(1e-15));

    double prev = 0.0;
    bool monotone = true, support = true, plateau = true;
    dense(-1.0, b + 1.0, [&](double x) {
      const double v = cut.value(x);
      const double d = cut.derivative(x, 1);
      monotone = monotone && v >= prev && d >= 0.0;
      if (x < eps) support = support && v == 0.0 && d == 0.0;
      if (x > b - eps) support = support && v == 1.0 && d == 0.0;
      if (x >= 2.0 * eps && x <= b - 2.0 * eps) {
        plateau = plateau && d == doctest::Approx(cut.slope()).epsilon(1e-12);
      }
      prev = v;
    });
    CHECK(monotone);
    CHECK(support);
    CHECK(plateau);
  }
  CHECK_THROWS_AS(make_cutoff(0.1, 0.49), ConfigError);
  CHECK_THROWS_AS(make_cutoff(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_cutoff(-0.1, 1.0), ConfigError);
  CHECK_NOTHROW(make_cutoff(0.1, 0.5));
}

// A smooth nondecreasing ramp from 0 at eps to 1 at b - eps cannot keep
// chi' >= 1/(b - 4 eps) on [2 eps, b - 2 eps]: the integral of chi' would exceed 1.
TEST_CASE("cutoff plateau at least 1/(b - 4 eps)" * doctest::may_fail()) {
  const auto cut = make_cutoff(0.1, 1.0);
  double lowest = 1e300;
  dense(0.2, 0.8, [&](double x) { lowest = std::min(lowest, cut.derivative(x, 1)); });
  MESSAGE("min chi' on [2 eps, b - 2 eps] = " << lowest << ", required " << 1.0 / 0.6);
  CHECK(lowest >= 1.0 / 0.6);
}

TEST_CASE("cutoff values integrate its derivative") {
  const auto cut = make_cutoff(0.1, 1.0);
  for (double x : {0.12, 0.15, 0.2, 0.5, 0.83, 0.87, 0.9, 1.2}) {
    const double integral =
        oracle::integrate([&](double y) { return cut.derivative(y, 1); }, 0.0, x, 16);
    CHECK(cut.value(x) == doctest::Approx(integral).epsilon(1e-12));
  }
}

TEST_CASE("cutoff derivatives against central differences") {
  const auto cut = make_cutoff(0.5, 2.5);
  const double h = 1e-5;
  for (double x : {0.6, 0.8, 0.95, 1.3, 1.6, 1.9, 2.05}) {
    CAPTURE(x);
    for (int order = 1; order <= 3; ++order) {
      const double fd = (cut.derivative(x + h, order - 1) - cut.derivative(x - h, order - 1)) / (2.0 * h);
      const double scale = std::max(1.0, std::abs(fd));
      CHECK(std::abs(cut.derivative(x, order) - fd) <= 1e-5 * scale);
    }
  }
  CHECK_THROWS_AS(cut.derivative(1.0, 4), ConfigError);
}

TEST_CASE("cutoff domination constant") {
  const double eps = 0.1, b = 1.0;
  const auto wide = make_cutoff(eps, b);
  const auto narrow = make_cutoff(eps / 2.0, b);
  double lowest = 1e300;
  dense(eps, b + 1.0, [&](double x) {
    const double denom = wide.value(x) + wide.derivative(x, 1);
    if (denom > 0.0) lowest = std::min(lowest, narrow.value(x) / denom);
  });
  MESSAGE("domination constant " << lowest);
  CHECK(lowest > 0.0);
}

TEST_CASE("windowed energy") {
  const auto g = make_grid(64, kPi);
  const Field u = Field::sample(g, [](double x) { return std::sin(x); });
  const auto cut = make_cutoff(0.2, 2.0);

  CHECK(windowed_energy(Field::zeros(g), 1, cut, 1.0) == 0.0);

  const double exact = oracle::integrate(
      [&](double x) { return std::cos(x) * std::cos(x) * cut.value(x + 1.0); }, -kPi, kPi);
  CHECK(windowed_energy(u, 1, cut, 1.0) == doctest::Approx(exact).epsilon(1e-8));

  // Window saturated on the whole box.
  const auto big = make_grid(1024, 32.0 * kPi);
  const Field v = gaussian(big);
  for (int order : {0, 2, 5}) {
    const double l2 = l2_norm(spectral_derivative(v, order));
    CHECK(windowed_energy(v, order, cut, big.half_length() + cut.b()) ==
          doctest::Approx(l2 * l2).epsilon(1e-10));
  }

  // chi(x + shift) grows with shift, so the energy does too.
  double prev = -1.0;
  for (double shift = -5.0; shift <= 5.0; shift += 0.25) {
    const double e = windowed_energy(v, 2, cut, shift);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("local smoothing integral") {
  const auto g = make_grid(1024, 32.0 * kPi);
  const auto cut = make_cutoff(0.5, 2.5);
  FrontParams front;
  front.x0 = 0.0;
  front.v = 1.0;
  front.R = 10.0;

  const auto p = ModelParams::make(0.5);
  CHECK(local_smoothing_integral(
            make_trajectory(p, g, 1.0, std::vector<Field>(5, Field::zeros(g)), "zero"), 3, front,
            cut) == 0.0);

  const auto traj = linear_trajectory(gaussian(g), 1.0, 64);
  const double whole = local_smoothing_integral(traj, 3, front, cut);
  CHECK(std::isfinite(whole));
  CHECK(whole > 0.0);

  // Additivity: trapezoid pieces on [0, 1/2] and [1/2, 1].
  Trajectory first = traj, second = traj;
  first.times.resize(33);
  first.slices.erase(first.slices.begin() + 33, first.slices.end());
  second.times.erase(second.times.begin(), second.times.begin() + 32);
  second.slices.erase(second.slices.begin(), second.slices.begin() + 32);
  CHECK(local_smoothing_integral(first, 3, front, cut) + local_smoothing_integral(second, 3, front, cut) ==
        doctest::Approx(whole).epsilon(1e-12));

  // The Airy tail radiates to the left, so a window far right of the data sees
  // almost nothing.
  FrontParams away = front;
  away.x0 = 20.0;
  const double empty = local_smoothing_integral(traj, 3, away, cut);
  MESSAGE("window on the data " << whole << ", right of it " << empty);
  CHECK(empty >= 0.0);
  CHECK(empty < 1e-6 * whole);

  const auto fine = linear_trajectory(gaussian(g), 1.0, 128);
  const double refined = local_smoothing_integral(fine, 3, front, cut);
  CHECK(std::abs(refined - whole) <= 0.01 * refined);

  FrontParams narrow = front;
  narrow.R = 3.0;
  CHECK_THROWS_AS(local_smoothing_integral(traj, 3, narrow, cut), ConfigError);
  FrontParams backwards = front;
  backwards.v = -1.0;
  CHECK_THROWS_AS(local_smoothing_integral(traj, 3, backwards, cut), ConfigError);
}

TEST_CASE("kink spectrum decays like |k|^-(s + 1.6)") {
  const auto g = make_grid(4096, 32.0 * kPi);
  for (int s : {2, 4}) {
    OneSidedSpec spec;
    spec.s = s;
    spec.amplitude = 1.0;
    const Field kink = Field::sample(g, [&](double x) { return kink_value(spec, x); });
    const double exponent = decay_exponent(kink, 5.0, 10.0);
    MESSAGE("s = " << s << " fitted exponent " << exponent);
    CHECK(exponent == doctest::Approx(s + 1.6).epsilon(0.15 / (s + 1.6)));
  }
}

TEST_CASE("one-sided data is smooth right of the front") {
  const auto g = make_grid(4096, 32.0 * kPi);
  OneSidedSpec spec;
  const Field u0 = one_sided_data(spec, g);
  // A Gaussian window centred 3 right of x0; its weight left of x0 + 0.1 is below 1e-7.
  const Field local = Field::sample(g, [&](double x) {
    const double base = 2.0 * spec.lambda * std::pow(japanese_bracket(x), -spec.m);
    return (base + kink_value(spec, x)) * std::exp(-2.0 * std::pow(x - spec.x0 - 3.0, 2));
  });
  const double exponent = decay_exponent(local, 5.0, 10.0);
  MESSAGE("windowed exponent " << exponent);
  CHECK(exponent > 2.0 * (spec.s + 1.6));
  const CVector c = to_spectral(local);
  auto at = [&](double k) { return std::abs(c[static_cast<std::size_t>(k / g.k(1))]); };
  CHECK(at(20.0) < 1e-12 * at(5.0));

  const Field global = Field::sample(g, [&](double x) {
    return 2.0 * spec.lambda * std::pow(japanese_bracket(x), -spec.m) + kink_value(spec, x);
  });
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(u0[j] == global[j]);

  auto p = ModelParams::make(0.5, 1, std::nullopt, spec.lambda, 1e12);
  const auto adm = admissibility_check(u0, p);
  CHECK(adm.lambda_ok);
  CHECK(adm.measured_lambda >= spec.lambda);

  OneSidedSpec negative = spec;
  negative.amplitude = -1e-3;
  CHECK_THROWS_AS(one_sided_data(negative, g), ConfigError);
  OneSidedSpec wide = spec;
  wide.width = 60.0;
  CHECK_THROWS_AS(one_sided_data(wide, g), ConfigError);
  CHECK_THROWS_AS(one_sided_data(spec, make_grid(16, 32.0 * kPi)), PrecisionError);
}

TEST_CASE("energy identity on smooth data") {
  const auto g = make_grid(1024, 32.0 * kPi);
  const auto p = ModelParams::make(0.5);
  const auto cut = make_cutoff(0.5, 2.5);
  const double h = 1e-3, v = 1.0;
  const auto traj = simulate(gaussian(g), 2.0 * h, h / 20.0, p, 2);
  auto energy = [&](std::size_t i) {
    return 0.5 * windowed_energy(traj.slices[i], 2, cut, v * traj.times[i]);
  };
  const double fd = (energy(2) - energy(0)) / (2.0 * h);
  const auto terms = energy_identity_terms(traj.slices[1], 2, cut, v * traj.times[1], v, p);
  MESSAGE("finite difference " << fd << ", identity " << terms.total());
  CHECK(terms.A1 > 0.0);
  CHECK(terms.A2 > 0.0);
  CHECK(terms.total() == doctest::Approx(fd).epsilon(1e-3));
}

TEST_CASE("regularity experiment on smooth data and under v doubling") {
  const auto g = make_grid(512, 16.0 * kPi);
  auto p = ModelParams::make(0.5);
  FrontParams front;
  front.v = 10.0;
  RegularityOptions opt;
  opt.T = 0.02;
  opt.dt = 1.25e-4;
  opt.slices = 8;
  const auto rep = regularity_experiment(front, p, g, opt);
  REQUIRE(rep.orders == std::vector<int>{5, 6});
  CHECK(rep.smoothing_order == 7);
  CHECK(rep.times.size() == 17);
  for (std::size_t k = 0; k < rep.orders.size(); ++k) {
    for (std::size_t i = 0; i < rep.times.size(); ++i) CHECK(rep.windowed[k][i] <= rep.full_line[k][i]);
    CHECK(rep.c_star[k] > 0.0);
  }
  CHECK(rep.c_star_star > 0.0);

  front.v = 20.0;
  const auto faster = regularity_experiment(front, p, g, opt);
  for (std::size_t k = 0; k < rep.orders.size(); ++k) CHECK(faster.c_star[k] >= rep.c_star[k]);

  FrontParams bad = front;
  bad.R = 3.0;
  CHECK_THROWS_AS(regularity_experiment(bad, p, g, opt), ConfigError);
}
