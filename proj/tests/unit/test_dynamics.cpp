#include <cmath>

#include "doctest.h"
#include "gkdv/dynamics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/reference.hpp"
#include "gkdv/spectral.hpp"

using namespace gkdv;

namespace {

Field sech2(const SpectralGrid& g, double amp = 1.0) {
  return Field::sample(g, [&](double x) { return amp / std::pow(std::cosh(x / 2.0), 2); });
}

Field final_state(const Field& u0, double T, double dt, const ModelParams& p, Scheme s) {
  SimulateOptions opt;
  opt.scheme = s;
  return simulate(u0, T, dt, p, 1, opt).slices.back();
}

}  // namespace

TEST_CASE("model parameters") {
  const auto p = ModelParams::make(0.5);
  CHECK(p.m == 3);
  CHECK(p.s == 10);
  CHECK(ModelParams::make(0.2).m == 6);
  CHECK_THROWS_AS(ModelParams::make(1.0), ConfigError);
  CHECK_THROWS_AS(ModelParams::make(0.5, 2), ConfigError);
  CHECK_THROWS_AS(ModelParams::make(0.5, 1, 9), ConfigError);
  CHECK_THROWS_AS(ModelParams::make(0.5, 1, 10, -1.0), ConfigError);
}

TEST_CASE("nonlinear term on zero, constant and sech data") {
  const auto g = make_grid(1024, 32.0);
  const auto p = ModelParams::make(0.5);
  CHECK(nonlinear_rhs(Field::zeros(g), p).max_abs() == 0.0);
  CHECK(nonlinear_rhs(Field::sample(g, [](double) { return 0.7; }), p).max_abs() <= 1e-14);

  const Field u = Field::sample(g, [](double x) { return 1.0 / std::cosh(x); });
  const std::size_t origin = 512, one = 528;
  REQUIRE(g.x(origin) == 0.0);
  REQUIRE(g.x(one) == doctest::Approx(1.0).epsilon(1e-15));
  const double expected = std::pow(1.0 / std::cosh(1.0), 1.5) * std::tanh(1.0);
  for (int sign : {1, -1}) {
    const Field n = nonlinear_rhs(u, ModelParams::make(0.5, sign));
    CHECK(n.is_real());
    CHECK(std::abs(n[origin].real()) <= 1e-10);
    CHECK(n[one].real() == doctest::Approx(sign * expected).epsilon(1e-8));
  }
}

TEST_CASE("zero coupling reduces both schemes to the Airy flow") {
  const auto g = make_grid(128, 20.0);
  const Field u0 = sech2(g);
  auto p = ModelParams::make(0.5);
  p.coupling = 0.0;
  const Field exact = airy_propagate(u0, 0.5);
  for (Scheme s : {Scheme::etdrk4, Scheme::strang}) {
    CHECK(l2_norm(final_state(u0, 0.5, 0.05, p, s) - exact) < 1e-13);
  }
}

TEST_CASE("real data stays real") {
  const auto g = make_grid(128, 20.0);
  const auto traj = simulate(sech2(g), 0.2, 0.01, ModelParams::make(0.5), 4);
  for (const auto& f : traj.slices) CHECK(f.is_real());
  CHECK(traj.slice_count() == 4);
  CHECK(traj.final_time() == doctest::Approx(0.2));
}

TEST_CASE("slice spacing must be a multiple of dt") {
  const auto g = make_grid(64, 20.0);
  CHECK_THROWS_AS(simulate(sech2(g), 1.0, 0.3, ModelParams::make(0.5), 1), ConfigError);
}

TEST_CASE("traveling wave moves rigidly") {
  const auto g = make_grid(512, 40.0);
  const TravelingWaveSpec spec{1.0, 0.5, ConstantMode::ode_derived};
  const Field u0 = traveling_wave(spec, g, 0.0);
  const Field exact = traveling_wave(spec, g, 1.0);
  const Field u = final_state(u0, 1.0, 1e-3, ModelParams::make(0.5), Scheme::etdrk4);
  CHECK(l2_norm(u - exact) < 1e-6 * l2_norm(exact));
}

TEST_CASE("global convergence orders against the exact wave") {
  // Sign-changing data would do here only up to the order reduction caused by
  // |u|^alpha being non-smooth at zero; the wave stays positive.
  const auto g = make_grid(512, 40.0);
  const TravelingWaveSpec spec{1.0, 0.5, ConstantMode::ode_derived};
  const Field u0 = traveling_wave(spec, g, 0.0);
  const Field exact = traveling_wave(spec, g, 1.0);
  const auto p = ModelParams::make(0.5);
  auto ratio = [&](Scheme s, int steps) {
    const double e1 = l2_norm(final_state(u0, 1.0, 1.0 / steps, p, s) - exact);
    const double e2 = l2_norm(final_state(u0, 1.0, 0.5 / steps, p, s) - exact);
    return e1 / e2;
  };
  CHECK(ratio(Scheme::etdrk4, 20) == doctest::Approx(16.0).epsilon(0.05));
  CHECK(ratio(Scheme::strang, 20) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("space-time reflection maps solutions to solutions") {
  const auto g = make_grid(256, 30.0);
  const Field u0 = sech2(g);
  const auto p = ModelParams::make(0.5);
  const Field forward = final_state(u0, 0.5, 0.005, p, Scheme::etdrk4);
  // v(x, t) = u(-x, T - t) solves the same equation, so evolving reflect(u(T))
  // over [0, T] returns reflect(u0).
  const Field back = final_state(reflect(forward), 0.5, 0.005, p, Scheme::etdrk4);
  CHECK(l2_norm(reflect(back) - u0) < 1e-8 * l2_norm(u0));
}

TEST_CASE("blowup reports the last good slice") {
  const auto g = make_grid(64, 20.0);
  Field u0 = Field::sample(g, [](double x) { return std::exp(-x * x); });
  u0 *= std::numeric_limits<double>::infinity();
  try {
    simulate(u0, 0.1, 0.01, ModelParams::make(0.5), 2);
    FAIL("expected blowup");
  } catch (const BlowupError& e) {
    CHECK(e.last_good_slice() == 0);
    CHECK(e.code() == ExitCode::blowup);
  }
}
