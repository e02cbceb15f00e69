#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/picard.hpp"
#include "gkdv/reference.hpp"
#include "gkdv/spectral.hpp"

using namespace gkdv;

namespace {

const double kPi = std::numbers::pi;

Trajectory random_trajectory(const SpectralGrid& g, const ModelParams& p, std::size_t M,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<Field> slices;
  for (std::size_t i = 0; i <= M; ++i) {
    std::vector<double> a(8);
    for (double& v : a) v = dist(rng);
    slices.push_back(Field::sample(g, [&](double x) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += a[2 * k] * std::cos((k + 1) * x) + a[2 * k + 1] * std::sin(k * x);
      return v * std::exp(-x * x / 4.0);
    }));
  }
  return make_trajectory(p, g, 1.0, std::move(slices), "random");
}

Field sech2(const SpectralGrid& g) {
  return Field::sample(g, [](double x) { return std::pow(std::cosh(x / 2.0), -2); });
}

// Admissible data for the contraction tests, with delta just above its measured sum.
struct Admissible {
  SpectralGrid grid = make_grid(1024, 32.0 * kPi);
  Field u0 = cazenave_naumkin_data(0.1, 0.0, grid, 3);
  ModelParams params = [this] {
    auto p = ModelParams::make(0.5, 1, std::nullopt, 0.1, 1e12);
    p.delta = 1.01 * admissibility_check(u0, p).delta_sum;
    return p;
  }();
};

}  // namespace

TEST_CASE("xt norm components") {
  const auto g = make_grid(64, 10.0);
  const auto p = ModelParams::make(0.5);
  const auto zero = xt_norm(
      make_trajectory(p, g, 1.0, std::vector<Field>(5, Field::zeros(g)), "zero"), p);
  CHECK(zero.total == 0.0);
  CHECK(zero.smoothing == 0.0);

  // Single slice sin(x) on L = pi with s = 2, m = 1: Fourier-side H^2 norm
  // against the physical-space sum of ||u||^2 + 2||u'||^2 + ||u''||^2.
  const auto gs = make_grid(64, kPi);
  ModelParams q = p;
  q.s = 2;
  q.m = 1;
  const Field u = Field::sample(gs, [](double x) { return std::sin(x); });
  const auto r = xt_norm(make_trajectory(q, gs, 0.0, {u}, "sin"), q);
  auto sq = [](double v) { return v * v; };
  const double physical = std::sqrt(sq(l2_norm(u)) + 2.0 * sq(l2_norm(spectral_derivative(u, 1))) +
                                    sq(l2_norm(spectral_derivative(u, 2))));
  CHECK(r.hs_sup == doctest::Approx(physical).epsilon(1e-10));
  CHECK(r.hs_sup == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-10));

  // Free evolution keeps the H^s norm of every slice.
  const Field v = sech2(make_grid(256, 40.0));
  std::vector<Field> free;
  for (int i = 0; i <= 8; ++i) free.push_back(airy_propagate(v, 0.1 * i));
  const auto fr = xt_norm(make_trajectory(p, v.grid(), 0.8, std::move(free), "free"), p);
  CHECK(fr.hs_sup == doctest::Approx(hs_norm(v, p.s)).epsilon(1e-12));
  CHECK_FALSE(fr.smoothing_trusted);
}

TEST_CASE("xt distance is a metric on random trajectories") {
  const auto g = make_grid(64, 10.0);
  const auto p = ModelParams::make(0.5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = random_trajectory(g, p, 4, 3 * seed);
    const auto b = random_trajectory(g, p, 4, 3 * seed + 1);
    const auto c = random_trajectory(g, p, 4, 3 * seed + 2);
    const double ab = xt_distance(a, b, p);
    CHECK(xt_distance(a, a, p) == 0.0);
    CHECK(ab == doctest::Approx(xt_distance(b, a, p)).epsilon(1e-14));
    CHECK(ab <= xt_distance(a, c, p) + xt_distance(c, b, p));
  }
  CHECK_THROWS_AS(xt_distance(random_trajectory(g, p, 4, 1), random_trajectory(g, p, 5, 2), p),
                  ConfigError);
}

TEST_CASE("duhamel map") {
  const auto g = make_grid(256, 40.0);
  auto p = ModelParams::make(0.5);
  const Field u0 = sech2(g);
  const auto traj = random_trajectory(g, p, 6, 11);

  auto linear = p;
  linear.coupling = 0.0;
  const auto out = duhamel_apply(traj, u0, linear);
  for (std::size_t i = 0; i < out.slices.size(); ++i) {
    CHECK(l2_norm(out.slices[i] - airy_propagate(u0, traj.times[i])) <= 1e-13);
  }

  const auto zero_traj = make_trajectory(p, g, 1.0, std::vector<Field>(5, Field::zeros(g)), "zero");
  for (const Field& f : duhamel_apply(zero_traj, Field::zeros(g), p).slices) {
    CHECK(f.max_abs() == 0.0);
  }

  const auto once = duhamel_apply(traj, u0, p);
  const auto twice = duhamel_apply(traj, u0, p);
  for (std::size_t i = 0; i < once.slices.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(once.slices[i][j] == twice.slices[i][j]);
  }
}

TEST_CASE("fixed-point residual of an accurate trajectory is second order in the slice spacing") {
  // The trapezoid rule is in its asymptotic regime only while k_max^3 times the
  // slice spacing is small, so the grid stops at k_max = 2.5 with data it resolves.
  const auto g = make_grid(64, 40.0);
  const auto p = ModelParams::make(0.5);
  const Field u0 = Field::sample(g, [](double x) { return std::pow(std::cosh(x / 4.0), -2); });
  auto residual = [&](std::size_t M) {
    const auto traj = simulate(u0, 0.5, 0.5 / M / 16.0, p, M);
    return xt_distance(duhamel_apply(traj, u0, p), traj, p);
  };
  const double r16 = residual(16), r32 = residual(32), r64 = residual(64);
  MESSAGE("residuals " << r16 << " " << r32 << " " << r64);
  CHECK(r16 / r32 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(r32 / r64 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("picard on zero data and on inadmissible data") {
  const auto g = make_grid(256, 40.0);
  const auto p = ModelParams::make(0.5);
  PicardOptions forced;
  forced.force = true;
  const auto res = picard_solve(Field::zeros(g), 0.1, p, 8, forced);
  CHECK(res.report.converged);
  CHECK(res.report.iterations() == 1);
  for (const Field& f : res.trajectory.slices) CHECK(f.max_abs() == 0.0);

  CHECK_THROWS_AS(picard_solve(sech2(g), 0.1, p, 8), ConfigError);
  CHECK_THROWS_AS(picard_solve(sech2(g), -1.0, p, 8, forced), ConfigError);
}

TEST_CASE("picard contraction on admissible data") {
  const Admissible a;
  const auto res = picard_solve(a.u0, 0.0125, a.params, 16);
  const auto& rep = res.report;
  CHECK(rep.converged);
  CHECK(rep.contracting_after_first());
  CHECK(rep.median_ratio() <= 0.5);
  CHECK(rep.in_ball());

  // The converged fixed point maps to itself up to twice the stopping threshold.
  const auto again = duhamel_apply(res.trajectory, a.u0, a.params);
  CHECK(xt_distance(again, res.trajectory, a.params) <= 2.0 * rep.threshold);

  const auto repeat = picard_solve(a.u0, 0.0125, a.params, 16);
  CHECK(repeat.report.distances == rep.distances);
}

TEST_CASE("contraction ratios shrink with T") {
  const Admissible a;
  double prev = 1e300;
  for (double T : {0.1, 0.05, 0.025}) {
    const auto rep = picard_solve(a.u0, T, a.params, 16).report;
    MESSAGE("T = " << T << " median ratio " << rep.median_ratio());
    CHECK(rep.median_ratio() < prev);
    prev = rep.median_ratio();
  }
}

TEST_CASE("picard agrees with etdrk4 under halving of both discretizations") {
  const Admissible a;
  const double T = 0.0125;
  std::vector<double> diffs;
  for (std::size_t M : {16u, 32u}) {
    const auto pic = picard_solve(a.u0, T, a.params, M).trajectory;
    const auto sim = simulate(a.u0, T, T / M / 8.0, a.params, M);
    double worst = 0.0;
    for (std::size_t i = 0; i <= M; ++i) {
      worst = std::max(worst, l2_norm(pic.slices[i] - sim.slices[i]) / l2_norm(sim.slices[i]));
    }
    diffs.push_back(worst);
  }
  MESSAGE("relative differences " << diffs[0] << " " << diffs[1]);
  CHECK(diffs[0] <= 1e-6);
  CHECK(diffs[1] <= diffs[0] / 3.0);
}

TEST_CASE("contraction time search") {
  const Admissible a;
  const auto search = find_contraction_time(a.u0, a.params, 0.1, 64.0, 16, 6);
  CHECK(search.T == doctest::Approx(0.0125));
  CHECK(search.tried.size() == 4);
  REQUIRE(search.result.has_value());
  CHECK(search.result->report.in_ball());

  CHECK_THROWS_AS(find_contraction_time(a.u0, a.params, 0.1, 64.0, 16, 1), NonContractionError);
}
