#include "gkdv/picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gkdv/diagnostics.hpp"
#include "gkdv/parallel.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

namespace {

void check_compatible(const Trajectory& a, const Trajectory& b) {
  if (!a.grid.same_as(b.grid) || a.times.size() != b.times.size()) {
    throw ConfigError("trajectories differ in grid or slice count");
  }
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, std::abs(a.times[i]))) {
      throw ConfigError("trajectories differ in slice times");
    }
  }
}

double uniform_spacing(const Trajectory& traj) {
  const std::size_t M = traj.slice_count();
  if (M == 0) return 0.0;
  const double h = traj.final_time() / static_cast<double>(M);
  for (std::size_t i = 0; i <= M; ++i) {
    if (std::abs(traj.times[i] - h * static_cast<double>(i)) > 1e-9 * std::max(h, 1e-300)) {
      throw ConfigError("trajectory slices are not uniformly spaced from t = 0");
    }
  }
  return h;
}

double weighted_deviation(const Trajectory& traj, const Field& u0, int m) {
  double dev = 0.0;
  for (const Field& u : traj.slices) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      dev = std::max(dev, std::pow(japanese_bracket(u.grid().x(j)), m) * std::abs(u[j] - u0[j]));
    }
  }
  return dev;
}

}  // namespace

XTNormReport xt_norm(const Trajectory& traj, const ModelParams& params) {
  XTNormReport r;
  const std::size_t count = traj.slices.size();
  if (count == 0) return r;
  const SpectralGrid& grid = traj.grid;
  const auto top = static_cast<std::size_t>(params.s + 1);
  check_derivative_order(grid, top, "xt_norm");
  const double h = uniform_spacing(traj);
  const std::size_t n = grid.size();

  struct SliceNorms {
    double hs = 0.0, winf = 0.0;
    std::array<double, 4> wl2{};
  };
  std::vector<SliceNorms> per(count);
  const std::size_t blocks = std::min<std::size_t>(64, count);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  parallel_for(blocks, [&](std::size_t b) {
    for (std::size_t i = b * count / blocks; i < (b + 1) * count / blocks; ++i) {
      const Field& u = traj.slices[i];
      SliceNorms& s = per[i];
      s.hs = hs_norm(u, params.s);
      s.winf = apply_weight(u, params.m).max_abs();
      for (std::size_t l = 0; l < 4; ++l) {
        s.wl2[l] = l2_norm(apply_weight(spectral_derivative(u, l + 1), params.m));
      }
      const Field d = spectral_derivative(u, top);
      const double w = (i == 0 || i + 1 == count) ? 0.5 * h : h;
      for (std::size_t j = 0; j < n; ++j) partial[b][j] += w * std::norm(d[j]);
    }
  });
  for (const auto& s : per) {
    r.hs_sup = std::max(r.hs_sup, s.hs);
    r.weighted_sup_inf = std::max(r.weighted_sup_inf, s.winf);
    for (std::size_t l = 0; l < 4; ++l) {
      r.weighted_deriv_l2[l] = std::max(r.weighted_deriv_l2[l], s.wl2[l]);
    }
  }
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) acc += partial[b][j];
    best = std::max(best, acc);
  }
  r.smoothing = std::sqrt(best);
  r.total = r.hs_sup + r.weighted_sup_inf + r.smoothing;
  for (double v : r.weighted_deriv_l2) r.total += v;
  const double T = traj.final_time();
  r.smoothing_trusted = T > 0.0 && static_cast<double>(traj.slice_count()) >= 64.0 * T;
  return r;
}

double xt_distance(const Trajectory& a, const Trajectory& b, const ModelParams& params) {
  check_compatible(a, b);
  std::vector<Field> diff;
  diff.reserve(a.slices.size());
  for (std::size_t i = 0; i < a.slices.size(); ++i) diff.push_back(a.slices[i] - b.slices[i]);
  return xt_norm(make_trajectory(params, a.grid, a.final_time(), std::move(diff), "difference"),
                 params)
      .total;
}

Trajectory duhamel_apply(const Trajectory& traj, const Field& u0, const ModelParams& params) {
  const SpectralGrid& grid = traj.grid;
  if (!u0.grid().same_as(grid)) throw ConfigError("duhamel_apply: u0 lives on a different grid");
  for (const auto& f : traj.slices) {
    if (!f.grid().same_as(grid)) throw ConfigError("duhamel_apply: slice on a different grid");
  }
  const std::size_t count = traj.slices.size();
  if (count == 0) throw ConfigError("duhamel_apply: empty trajectory");
  const double h = uniform_spacing(traj);
  const std::size_t n = grid.size();
  const bool real = u0.is_real() && std::all_of(traj.slices.begin(), traj.slices.end(),
                                                [](const Field& f) { return f.is_real(); });

  // Interaction picture: g_j = U(-t_j) N(u(t_j)).
  std::vector<CVector> g(count);
  parallel_for(count, [&](std::size_t i) {
    g[i] = to_spectral(nonlinear_rhs(traj.slices[i], params));
    for (std::size_t j = 0; j < n; ++j) g[i][j] *= airy_multiplier(grid, j, -traj.times[i]);
  });

  // Cumulative trapezoid sums, accumulated sequentially for reproducibility.
  std::vector<CVector> acc(count, CVector(n));
  acc[0] = to_spectral(u0);
  CVector running(n, 0.0);
  for (std::size_t i = 1; i < count; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      running[j] += 0.5 * h * (g[i - 1][j] + g[i][j]);
      acc[i][j] = acc[0][j] + running[j];
    }
  }

  std::vector<Field> out(count, Field::zeros(grid, real));
  parallel_for(count, [&](std::size_t i) {
    CVector& c = acc[i];
    for (std::size_t j = 0; j < n; ++j) c[j] *= airy_multiplier(grid, j, traj.times[i]);
    out[i] = from_spectral(grid, c, real);
  });
  Trajectory result = make_trajectory(params, grid, traj.final_time(), std::move(out), "picard");
  result.times = traj.times;
  return result;
}

double ContractionReport::median_ratio() const {
  if (ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> r = ratios;
  const std::size_t mid = r.size() / 2;
  std::nth_element(r.begin(), r.begin() + mid, r.end());
  if (r.size() % 2 == 1) return r[mid];
  const double upper = r[mid];
  const double lower = *std::max_element(r.begin(), r.begin() + mid);
  return 0.5 * (lower + upper);
}

bool ContractionReport::contracting_after_first() const noexcept {
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (!(ratios[k] < 1.0)) return false;
  }
  return true;
}

PicardResult picard_solve(const Field& u0, double T, const ModelParams& params, std::size_t M,
                          const PicardOptions& options) {
  params.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("picard_solve: T must be positive");
  if (M == 0) throw ConfigError("picard_solve: slice count must be positive");
  if (!options.force) {
    const auto verdict = admissibility_check(u0, params);
    if (!verdict.admissible()) {
      std::ostringstream os;
      os << "picard_solve: data not admissible (measured lambda " << verdict.measured_lambda
         << " vs " << params.lambda << ", delta sum " << verdict.delta_sum << " vs "
         << params.delta << "); set force to override";
      throw ConfigError(os.str());
    }
  }

  const SpectralGrid& grid = u0.grid();
  std::vector<Field> free(M + 1, u0);
  parallel_for(M + 1, [&](std::size_t i) {
    free[i] = airy_propagate(u0, T * static_cast<double>(i) / static_cast<double>(M));
  });
  Trajectory current = make_trajectory(params, grid, T, std::move(free), "picard");

  ContractionReport report;
  report.T = T;
  report.slices = M;
  report.threshold = options.tol;
  report.lambda_half = params.lambda / 2.0;
  report.ball_deviation = weighted_deviation(current, u0, params.m);
  if (options.relative_tol) report.threshold *= xt_norm(current, params).total;

  int consecutive = 0;
  for (std::size_t k = 0; k < options.max_iter; ++k) {
    Trajectory next = [&] {
      try {
        return duhamel_apply(current, u0, params);
      } catch (const BlowupError& e) {
        throw PicardDivergence(report, std::string("picard iterate blew up: ") + e.what() +
                                           "; try a smaller T");
      }
    }();
    const double d = xt_distance(next, current, params);
    report.distances.push_back(d);
    if (!std::isfinite(d)) {
      throw PicardDivergence(report, "picard distance became non-finite; try a smaller T");
    }
    if (report.distances.size() >= 2) {
      const double prev = report.distances[report.distances.size() - 2];
      const double r = prev > 0.0 ? d / prev : 0.0;
      report.ratios.push_back(r);
      consecutive = r >= 1.0 ? consecutive + 1 : 0;
    }
    report.ball_deviation =
        std::max(report.ball_deviation, weighted_deviation(next, u0, params.m));
    current = std::move(next);
    if (d <= report.threshold) {
      report.converged = true;
      break;
    }
    if (consecutive >= 3) {
      std::ostringstream os;
      os << "picard iteration is not contracting at T = " << T << " (three consecutive ratios >= 1,"
         << " last " << report.ratios.back() << "); try a smaller T";
      throw PicardDivergence(report, os.str());
    }
  }
  return {std::move(current), std::move(report)};
}

ContractionSearch find_contraction_time(const Field& u0, const ModelParams& params,
                                        double T_start, double slices_per_unit,
                                        std::size_t min_slices, std::size_t max_halvings,
                                        const PicardOptions& options) {
  ContractionSearch search;
  double T = T_start;
  for (std::size_t attempt = 0; attempt <= max_halvings; ++attempt, T /= 2.0) {
    search.tried.push_back(T);
    const auto M = std::max(min_slices, static_cast<std::size_t>(std::ceil(slices_per_unit * T)));
    try {
      PicardResult res = picard_solve(u0, T, params, M, options);
      const auto& rep = res.report;
      search.reports.push_back(rep);
      if (rep.converged && rep.contracting_after_first() && rep.median_ratio() <= 0.5 &&
          rep.in_ball()) {
        search.T = T;
        search.slices = M;
        search.result = std::move(res);
        return search;
      }
    } catch (const PicardDivergence& e) {
      search.reports.push_back(e.report());
    }
  }
  std::ostringstream os;
  os << "no contracting T found down to " << search.tried.back();
  throw ContractionSearchFailure(std::move(search), os.str());
}

}  // namespace gkdv
