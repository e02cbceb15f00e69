#include "gkdv/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/io.hpp"
#include "gkdv/picard.hpp"
#include "gkdv/reference.hpp"
#include "gkdv/regularity.hpp"
#include "gkdv/spectral.hpp"

#ifndef GKDV_VERSION
#define GKDV_VERSION "0.0.0"
#endif

namespace gkdv {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Scales phi so that max <x>^m |phi| equals `bound`.
Field normalise_weighted(const Field& phi, int m, double bound) {
  double peak = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    peak = std::max(peak, std::pow(japanese_bracket(phi.grid().x(j)), m) * std::abs(phi[j]));
  }
  if (peak == 0.0) return phi;
  Field out = phi;
  out *= bound / peak * (1.0 - 1e-12);
  return out;
}

json check_json(const CheckResult& c) {
  return {{"name", c.name},
          {"value", c.value},
          {"threshold", c.threshold},
          {"relation", c.upper ? "<=" : ">="},
          {"pass", c.pass}};
}

std::string error_type(const Error& e) {
  switch (e.code()) {
    case ExitCode::config:
      return dynamic_cast<const ParseError*>(&e) ? "parse" : "config";
    case ExitCode::blowup:
      return "blowup";
    case ExitCode::precision:
      return "precision";
    case ExitCode::contamination:
      return "contamination";
    case ExitCode::non_contraction:
      return "non_contraction";
    default:
      return "error";
  }
}

Series diagnostics_series(const Trajectory& traj) {
  Series s;
  s.columns = {"t",   "I1_re",     "I1_im",  "I2",     "I3",     "winf",   "lower",
               "deviation", "hs", "wl2_d1", "wl2_d2", "wl2_d3", "wl2_d4", "outer_mass"};
  const auto rows = diagnostic_series(traj);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double outer = i < traj.events.size() ? traj.events[i].outer_mass
                                                : outer_mass_fraction(traj.slices[i]);
    s.rows.push_back({r.t, r.inv.I1.real(), r.inv.I1.imag(), r.inv.I2, r.inv.I3, r.weighted.winf,
                      r.weighted.lower, r.deviation, r.weighted.hs, r.weighted.wl2_derivs[0],
                      r.weighted.wl2_derivs[1], r.weighted.wl2_derivs[2], r.weighted.wl2_derivs[3],
                      outer});
  }
  return s;
}

Series persistence_series(const PersistenceSeries& p) {
  Series s;
  s.columns = {"t", "deviation", "lower", "lambda_half"};
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    s.rows.push_back({p.times[i], p.deviation[i], p.lower[i], p.lambda_half});
  }
  return s;
}

double relative_drift(double now, double then) {
  const double scale = std::abs(then);
  return scale > 0.0 ? std::abs(now - then) / scale : std::abs(now - then);
}

// Relative drift of each invariant, checked for real data only.
void conservation_checks(const Series& diag, bool real, std::vector<CheckResult>& checks, json& results) {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  const auto& first = diag.rows.front();
  for (const auto& row : diag.rows) {
    d1 = std::max(d1, relative_drift(row[1], first[1]));
    d2 = std::max(d2, relative_drift(row[3], first[3]));
    d3 = std::max(d3, relative_drift(row[4], first[4]));
  }
  results["invariant_drift"] = {{"I1", d1}, {"I2", d2}, {"I3", d3}};
  if (real) {
    checks.push_back(check_at_most("I1_drift", d1, 1e-8));
    checks.push_back(check_at_most("I2_drift", d2, 1e-8));
    checks.push_back(check_at_most("I3_drift", d3, 1e-6));
  }
}

void write_snapshots(OutputDir& out, const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.slices.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04zu.snap", i);
    out.write(fs::path("snapshots") / name, encode_snapshot(traj.slices[i], traj.times[i]));
  }
}

json contamination_json(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& e : traj.events) worst = std::max(worst, e.outer_mass);
  return {{"contaminated", traj.contaminated()}, {"max_outer_mass", worst},
          {"threshold", kContainmentThreshold}, {"warnings", traj.warnings}};
}

ModelParams resolved_params(const RunConfig& config, const Field& u0, json& results) {
  ModelParams p = config.model();
  if (!config.delta) {
    const double sum = weighted_report(u0, p).delta_sum();
    p.delta = 1.01 * sum;
    results["delta_auto"] = {{"delta_sum", sum}, {"delta", p.delta}};
  }
  return p;
}

void run_simulate(const RunConfig& config, OutputDir& out, std::vector<CheckResult>& checks,
                  json& results) {
  const Field u0 = make_initial_data(config);
  const ModelParams p = config.model();
  SimulateOptions opt;
  opt.scheme = config.scheme;
  const Trajectory traj = simulate(u0, config.T, config.dt, p, config.slices, opt);
  results["contamination"] = contamination_json(traj);
  results["scheme"] = to_string(config.scheme);

  const Series diag = diagnostics_series(traj);
  out.write("diagnostics.csv", to_csv(diag));
  conservation_checks(diag, u0.is_real(), checks, results);

  const auto pers = persistence_monitor(traj, u0, p);
  out.write("persistence.csv", to_csv(persistence_series(pers)));
  results["persistence"] = {{"sup_deviation", pers.sup_deviation},
                            {"inf_lower", pers.inf_lower},
                            {"lambda_half", pers.lambda_half},
                            {"verdict", pers.verdict}};
  if (config.data.kind == DataKind::cazenave_naumkin) {
    checks.push_back(check_at_most("persistence_sup_deviation", pers.sup_deviation, pers.lambda_half));
    checks.push_back(check_at_least("persistence_inf_lower", pers.inf_lower, pers.lambda_half));
  }

  if (config.data.kind == DataKind::traveling_wave) {
    const TravelingWaveSpec spec{config.data.c, config.alpha, config.data.constant_mode};
    const Field exact = traveling_wave(spec, u0.grid(), config.T);
    const Field& last = traj.slices.back();
    const double shape = l2_norm(last - exact) / l2_norm(exact);
    std::size_t peak = 0;
    for (std::size_t j = 0; j < last.size(); ++j) {
      if (last[j].real() > last[peak].real()) peak = j;
    }
    const double L = u0.grid().half_length();
    double where = std::fmod(spec.c * config.T + L, 2.0 * L);
    if (where < 0.0) where += 2.0 * L;
    where -= L;
    double offset = std::abs(u0.grid().x(peak) - where);
    offset = std::min(offset, 2.0 * L - offset);
    results["traveling_wave"] = {
        {"shape_error", shape},
        {"peak_position_error", offset},
        {"dx", u0.grid().dx()},
        {"residual_ode_derived", tw_residual({spec.c, spec.alpha, ConstantMode::ode_derived}, u0.grid())},
        {"residual_paper_literal",
         tw_residual({spec.c, spec.alpha, ConstantMode::paper_literal}, u0.grid())}};
    checks.push_back(check_at_most("wave_shape_error", shape, 1e-4));
    checks.push_back(check_at_most("wave_peak_position_error", offset, 2.0 * u0.grid().dx()));
  }

  if (config.snapshots) write_snapshots(out, traj);
  emit_plot_data(out, {"invariants", "weighted", "persistence"});
}

Series contraction_series(const ContractionSearch& search) {
  Series s;
  s.columns = {"attempt", "T", "slices", "iteration", "distance", "ratio"};
  for (std::size_t a = 0; a < search.reports.size(); ++a) {
    const auto& r = search.reports[a];
    for (std::size_t k = 0; k < r.distances.size(); ++k) {
      s.rows.push_back({static_cast<double>(a), r.T, static_cast<double>(r.slices),
                        static_cast<double>(k), r.distances[k], k == 0 ? kNaN : r.ratios[k - 1]});
    }
  }
  return s;
}

json report_json(const ContractionReport& r) {
  return {{"T", r.T},
          {"slices", r.slices},
          {"converged", r.converged},
          {"iterations", r.iterations()},
          {"median_ratio", r.ratios.empty() ? kNaN : r.median_ratio()},
          {"contracting_after_first", r.contracting_after_first()},
          {"ball_deviation", r.ball_deviation},
          {"lambda_half", r.lambda_half},
          {"distances", r.distances},
          {"ratios", r.ratios}};
}

double max_relative_difference(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.slices.size(); ++i) {
    worst = std::max(worst, l2_norm(a.slices[i] - b.slices[i]) / l2_norm(b.slices[i]));
  }
  return worst;
}

// ETDRK4 on M slices of [0, T] with the largest step <= dt that divides T/M.
Trajectory reference_run(const Field& u0, double T, double dt, const ModelParams& p, std::size_t M) {
  const double spacing = T / static_cast<double>(M);
  const double steps = std::max(1.0, std::ceil(spacing / dt - 1e-9));
  return simulate(u0, T, spacing / steps, p, M);
}

void run_picard(const RunConfig& config, OutputDir& out, std::vector<CheckResult>& checks,
                json& results) {
  const Field u0 = make_initial_data(config);
  const ModelParams p = resolved_params(config, u0, results);
  const auto adm = admissibility_check(u0, p);
  results["admissibility"] = {{"measured_lambda", adm.measured_lambda},
                              {"delta_sum", adm.delta_sum},
                              {"lambda_ok", adm.lambda_ok},
                              {"delta_ok", adm.delta_ok},
                              {"non_membership", adm.non_membership.norms}};
  checks.push_back(check_at_least("admissible_lambda", adm.measured_lambda, p.lambda));
  checks.push_back(check_at_most("admissible_delta", adm.delta_sum, p.delta));

  PicardOptions opt;
  opt.max_iter = config.picard_max_iter;
  opt.tol = config.picard_tol;
  ContractionSearch search;
  try {
    search = find_contraction_time(u0, p, config.T, config.picard_slices_per_unit, config.slices,
                                   config.picard_max_halvings, opt);
  } catch (const ContractionSearchFailure& e) {
    out.write("contraction.csv", to_csv(contraction_series(e.search())));
    json attempts = json::array();
    for (const auto& r : e.search().reports) attempts.push_back(report_json(r));
    results["contraction"] = {{"accepted", false}, {"tried", e.search().tried}, {"attempts", attempts}};
    throw;
  }
  out.write("contraction.csv", to_csv(contraction_series(search)));
  const auto& rep = search.result->report;
  json attempts = json::array();
  for (const auto& r : search.reports) attempts.push_back(report_json(r));
  results["contraction"] = {{"accepted", true},
                            {"T", search.T},
                            {"slices", search.slices},
                            {"tried", search.tried},
                            {"attempts", attempts}};
  checks.push_back(check_at_least("picard_converged", rep.converged ? 1.0 : 0.0, 1.0));
  checks.push_back(check_at_least("picard_ratios_below_one", rep.contracting_after_first() ? 1.0 : 0.0, 1.0));
  checks.push_back(check_at_most("picard_median_ratio", rep.median_ratio(), 0.5));
  checks.push_back(check_at_most("picard_ball_deviation", rep.ball_deviation, rep.lambda_half));

  const double T = search.T;
  const std::size_t M = search.slices;
  const Trajectory sim = reference_run(u0, T, config.dt, p, M);
  const double diff = max_relative_difference(search.result->trajectory, sim);
  const auto finer = picard_solve(u0, T, p, 2 * M, opt);
  const double diff_fine =
      max_relative_difference(finer.trajectory, reference_run(u0, T, config.dt / 2.0, p, 2 * M));
  results["picard_vs_etdrk4"] = {{"slices", M}, {"difference", diff}, {"difference_halved", diff_fine}};
  checks.push_back(check_at_most("picard_vs_etdrk4_halving", diff_fine, diff));

  results["contamination"] = contamination_json(sim);
  const Series diag = diagnostics_series(sim);
  out.write("diagnostics.csv", to_csv(diag));
  conservation_checks(diag, u0.is_real(), checks, results);

  const auto pers = persistence_monitor(sim, u0, p);
  out.write("persistence.csv", to_csv(persistence_series(pers)));
  const auto pers_fixed = persistence_monitor(search.result->trajectory, u0, p);
  results["persistence"] = {{"sup_deviation", pers.sup_deviation},
                            {"inf_lower", pers.inf_lower},
                            {"lambda_half", pers.lambda_half},
                            {"verdict", pers.verdict},
                            {"picard_sup_deviation", pers_fixed.sup_deviation},
                            {"picard_inf_lower", pers_fixed.inf_lower}};
  checks.push_back(check_at_most("persistence_sup_deviation", pers.sup_deviation, pers.lambda_half));
  checks.push_back(check_at_least("persistence_inf_lower", pers.inf_lower, pers.lambda_half));

  if (config.snapshots) write_snapshots(out, search.result->trajectory);
  emit_plot_data(out, {"invariants", "weighted", "persistence"});
}

void run_regularity(const RunConfig& config, OutputDir& out, std::vector<CheckResult>& checks,
                    json& results) {
  if (config.data.kind != DataKind::one_sided) {
    throw ConfigError("regularity needs data.kind = one_sided");
  }
  const SpectralGrid grid(config.n, config.L);
  const ModelParams p = config.model();
  FrontParams front;
  front.x0 = config.data.x0;
  front.v = config.front_v;
  front.eps_prime = config.front_eps;
  front.R = config.front_R;
  front.l = config.data.l;
  RegularityOptions opt;
  opt.data.s = config.data.s;
  opt.data.amplitude = config.data.kink_amplitude;
  opt.data.width = config.data.kink_width;
  opt.cutoff_b = config.front_b;
  opt.T = config.T;
  opt.dt = config.dt;
  opt.slices = config.slices;
  const auto rep = regularity_experiment(front, p, grid, opt);

  Series windowed, full;
  windowed.columns = full.columns = {"t"};
  for (int k : rep.orders) {
    windowed.columns.push_back("order_" + std::to_string(k));
    full.columns.push_back("order_" + std::to_string(k));
  }
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    std::vector<double> w{rep.times[i]}, f{rep.times[i]};
    for (std::size_t k = 0; k < rep.orders.size(); ++k) {
      w.push_back(rep.windowed[k][i]);
      f.push_back(rep.full_line[k][i]);
    }
    windowed.rows.push_back(std::move(w));
    full.rows.push_back(std::move(f));
  }
  out.write("windowed.csv", to_csv(windowed));
  out.write("full_line.csv", to_csv(full));

  results["regularity"] = {{"proxy_s", rep.proxy_s},
                           {"theorem_s", rep.theorem_s},
                           {"orders", rep.orders},
                           {"smoothing_order", rep.smoothing_order},
                           {"c_star", rep.c_star},
                           {"full_line_min", rep.full_line_min},
                           {"contrast", rep.contrast},
                           {"c_star_star", rep.c_star_star},
                           {"c_star_star_coarse", rep.c_star_star_coarse},
                           {"smoothing_change", rep.smoothing_change},
                           {"control_initial", rep.control_initial},
                           {"control_final", rep.control_final},
                           {"identity_mismatch", rep.identity_mismatch},
                           {"cutoff", {{"eps", rep.cutoff_eps}, {"b", rep.cutoff_b}}},
                           {"warnings", rep.warnings}};
  for (std::size_t k = 0; k < rep.orders.size(); ++k) {
    checks.push_back(check_at_least("contrast_order_" + std::to_string(rep.orders[k]), rep.contrast[k], 10.0));
  }
  checks.push_back(check_at_most("smoothing_slice_doubling", rep.smoothing_change, 0.01));
  emit_plot_data(out, {"windowed"});
}

void run_validate(const RunConfig& config, OutputDir& out, std::vector<CheckResult>& checks) {
  const auto suite = validate_suite(config);
  std::string csv = "check,value,threshold,relation,pass\n";
  for (const auto& c : suite) {
    csv += c.name + ',' + format_double(c.value) + ',' + format_double(c.threshold) + ',' +
           (c.upper ? "<=" : ">=") + ',' + (c.pass ? "true" : "false") + '\n';
    checks.push_back(c);
  }
  out.write("validate.csv", csv);
}

Field random_band_limited(const SpectralGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<double> a(12);
  for (double& v : a) v = dist(rng);
  return Field::sample(g, [&](double x) {
    double v = 0.0;
    for (int k = 0; k < 6; ++k) v += a[2 * k] * std::cos((k + 1) * x) + a[2 * k + 1] * std::sin((k + 1) * x);
    return v * std::exp(-x * x / 16.0);
  });
}

}  // namespace

const char* version() { return GKDV_VERSION; }

CheckResult check_at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, true, value <= threshold};
}

CheckResult check_at_least(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, false, value >= threshold};
}

Field make_initial_data(const RunConfig& config) {
  const SpectralGrid grid(config.n, config.L);
  const int m = config.m();
  const auto& d = config.data;
  switch (d.kind) {
    case DataKind::cazenave_naumkin: {
      const double lambda = d.lambda.value_or(config.lambda);
      std::optional<Field> phi;
      if (d.phi == PhiKind::gaussian) {
        phi = Field::sample(grid, [](double x) { return std::exp(-x * x); });
      } else if (d.phi == PhiKind::random) {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> centre(-5.0, 5.0), width(0.5, 2.0);
        std::normal_distribution<double> amp;
        std::vector<double> c(6), w(6), a(6);
        for (int i = 0; i < 6; ++i) {
          c[i] = centre(rng);
          w[i] = width(rng);
          a[i] = amp(rng);
        }
        phi = Field::sample(grid, [&](double x) {
          double v = 0.0;
          for (int i = 0; i < 6; ++i) v += a[i] * std::exp(-std::pow((x - c[i]) / w[i], 2));
          return v;
        });
      }
      if (phi) phi = normalise_weighted(*phi, m, d.phi_amplitude * lambda);
      return cazenave_naumkin_data(lambda, d.theta, grid, m, phi);
    }
    case DataKind::traveling_wave:
      return traveling_wave({d.c, config.alpha, d.constant_mode}, grid, 0.0);
    case DataKind::one_sided: {
      OneSidedSpec spec;
      spec.x0 = d.x0;
      spec.s = d.s;
      spec.l = d.l;
      spec.lambda = config.lambda;
      spec.m = m;
      spec.amplitude = d.kink_amplitude;
      spec.width = d.kink_width;
      return one_sided_data(spec, grid);
    }
    case DataKind::file: {
      Snapshot snap = read_snapshot(d.path);
      if (!snap.field.grid().same_as(grid)) {
        throw ConfigError("snapshot " + d.path + " lives on a different grid than grid.n/grid.L");
      }
      return snap.field;
    }
  }
  throw ConfigError("unknown data kind");
}

std::vector<CheckResult> validate_suite(const RunConfig& config) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(config.seed);

  {
    const auto g = make_grid(256, 40.0);
    double unitary = 0.0, group = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Field f = random_band_limited(g, rng);
      const double norm = l2_norm(f);
      for (double t : {0.1, 1.0, 10.0}) {
        unitary = std::max(unitary, std::abs(l2_norm(airy_propagate(f, t)) - norm) / norm);
        const Field two = airy_propagate(airy_propagate(f, 0.5 * t), t);
        group = std::max(group, l2_norm(two - airy_propagate(f, 1.5 * t)) / norm);
      }
    }
    out.push_back(check_at_most("airy_unitarity", unitary, 1e-12));
    out.push_back(check_at_most("airy_group_law", group, 1e-11));
  }

  {
    const auto g = make_grid(2048, 64.0 * std::numbers::pi);
    const auto r = operator_identity_residual(Field::sample(g, [](double x) { return std::exp(-x * x); }), 0.5);
    out.push_back(check_at_most("commutator_residual", r.residual, 1e-6));
    out.push_back(check_at_least("commutator_discrimination", r.wrong_sign_residual / r.residual, 1e3));
  }

  {
    const SpectralGrid g(config.n, config.L);
    const ModelParams p = config.model();
    const Field u0 = Field::sample(g, [](double x) { return std::pow(std::cosh(x / 2.0), -2); });
    const Trajectory traj = simulate(u0, config.T, config.dt, p, config.slices);
    const auto a = invariants(traj.slices.front(), p);
    const auto b = invariants(traj.slices.back(), p);
    out.push_back(check_at_most("conservation_I1", relative_drift(b.I1.real(), a.I1.real()), 1e-8));
    out.push_back(check_at_most("conservation_I2", relative_drift(b.I2, a.I2), 1e-8));
    out.push_back(check_at_most("conservation_I3", relative_drift(b.I3, a.I3), 1e-6));

    ModelParams linear = p;
    linear.coupling = 0.0;
    const Field free = simulate(u0, config.T, config.dt, linear, 1).slices.back();
    out.push_back(check_at_most("zero_coupling_reduction",
                                l2_norm(free - airy_propagate(u0, config.T)) / l2_norm(u0), 1e-12));
  }

  out.push_back(check_at_most(
      "wave_residual_ode_derived",
      tw_residual({1.0, config.alpha, ConstantMode::ode_derived}, make_grid(1024, 32.0 * std::numbers::pi)),
      1e-6));

  {
    const auto cut = make_cutoff(0.1, 1.0);
    double plateau = 0.0, outside = 0.0, decrease = 0.0;
    double prev = 0.0;
    for (int i = -10000; i <= 20000; ++i) {
      const double x = i * 1e-4;
      const double v = cut.value(x), d = cut.derivative(x, 1);
      decrease = std::max({decrease, prev - v, -d});
      if (x < 0.1) outside = std::max(outside, std::abs(v));
      if (x > 0.9) outside = std::max(outside, std::abs(v - 1.0));
      if (x >= 0.2 && x <= 0.8) plateau = std::max(plateau, std::abs(d - cut.slope()) / cut.slope());
      prev = v;
    }
    out.push_back(check_at_most("cutoff_support", outside, 0.0));
    out.push_back(check_at_most("cutoff_monotone", decrease, 0.0));
    out.push_back(check_at_most("cutoff_plateau", plateau, 1e-12));
  }

  {
    const auto g = make_grid(128, 16.0);
    const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
    const double bound = l2_norm(f) / std::sqrt(3.0);
    out.push_back(check_at_most("kato_bound", kato_smoothing_norm(f, 1.0, 400) / bound, 1.05));
  }
  return out;
}

int run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  OutputDir out(config.out_dir);
  const std::string text = print_config(config);
  out.write("config.txt", text);

  json manifest;
  manifest["program"] = "gkdv";
  manifest["version"] = version();
  manifest["command"] = to_string(config.command);
  manifest["seed"] = config.seed;
  manifest["config"] = text;
  manifest["config_sha256"] = sha256_hex(text);
  manifest["grid"] = {{"n", config.n}, {"L", config.L}, {"dx", 2.0 * config.L / config.n}};
  manifest["model"] = {{"alpha", config.alpha}, {"sign", config.sign}, {"m", config.m()}};

  std::vector<CheckResult> checks;
  json results = json::object();
  int status = 0;
  try {
    switch (config.command) {
      case Command::simulate:
        run_simulate(config, out, checks, results);
        break;
      case Command::picard:
        run_picard(config, out, checks, results);
        break;
      case Command::regularity:
        run_regularity(config, out, checks, results);
        break;
      case Command::validate:
        run_validate(config, out, checks);
        break;
    }
    if (config.command == Command::validate &&
        std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; })) {
      status = kValidateFailed;
    }
  } catch (const Error& e) {
    status = static_cast<int>(e.code());
    json err = {{"code", status}, {"type", error_type(e)}, {"message", e.what()}};
    if (const auto* b = dynamic_cast<const BlowupError*>(&e)) {
      err["time"] = b->time();
      err["last_good_slice"] = b->last_good_slice();
    }
    manifest["error"] = err;
    std::cerr << "gkdv: " << e.what() << '\n';
  } catch (const std::exception& e) {
    status = static_cast<int>(ExitCode::config);
    manifest["error"] = {{"code", status}, {"type", "io"}, {"message", e.what()}};
    std::cerr << "gkdv: " << e.what() << '\n';
  }

  json check_list = json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    check_list.push_back(check_json(c));
    all_pass = all_pass && c.pass;
  }
  manifest["checks"] = check_list;
  manifest["all_checks_pass"] = all_pass;
  manifest["results"] = results;
  manifest["exit_code"] = status;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["files"] = out.inventory();
  atomic_write(out.root() / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

int run_cli(Command command, const std::optional<fs::path>& config_path,
            const std::optional<fs::path>& out_dir, const std::optional<std::uint64_t>& seed) {
  RunConfig config;
  try {
    if (config_path) {
      config = load_config(*config_path, command);
    } else if (command == Command::validate) {
      config = default_validate_config();
    } else {
      throw ConfigError("--config is required for " + to_string(command));
    }
  } catch (const Error& e) {
    std::cerr << "gkdv: " << e.what() << '\n';
    const fs::path dir = out_dir.value_or("out");
    try {
      json manifest;
      manifest["program"] = "gkdv";
      manifest["version"] = version();
      manifest["command"] = to_string(command);
      manifest["config_path"] = config_path ? config_path->string() : "";
      manifest["error"] = {{"code", static_cast<int>(e.code())}, {"type", error_type(e)}, {"message", e.what()}};
      manifest["exit_code"] = static_cast<int>(e.code());
      manifest["files"] = json::array();
      atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& io) {
      std::cerr << "gkdv: could not write manifest: " << io.what() << '\n';
    }
    return static_cast<int>(e.code());
  }
  config.command = command;
  if (out_dir) config.out_dir = out_dir->string();
  if (seed) config.seed = *seed;
  return run(config);
}

}  // namespace gkdv
