#include "gkdv/regularity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/parallel.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

namespace {

// Logistic pieces of S(y) = 1 / (1 + e^{h}), h = 1/y - 1/(1 - y).
double step_h(double y) { return 1.0 / y - 1.0 / (1.0 - y); }

// int_0^a S(y) dy for a in [0, 1].
double step_integral(double a) {
  if (a <= 0.0) return 0.0;
  const double upper = std::min(a, 1.0);
  constexpr int kPanels = 8;
  double total = 0.0;
  const double w = upper / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    total += boost::math::quadrature::gauss<double, 20>::integrate(
        [](double y) { return smooth_step(y); }, p * w, (p + 1) * w);
  }
  return total + std::max(0.0, a - 1.0);
}

}  // namespace

double smooth_step(double y, int order) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return order == 0 ? 1.0 : 0.0;
  const double h = step_h(y);
  const double sigma = 1.0 / (1.0 + std::exp(h));
  if (order == 0) return sigma;
  // sigma (1 - sigma) = 1 / (4 cosh^2(h/2)); vanishes to all orders at the ends.
  const double c = std::cosh(0.5 * h);
  const double ds = std::isfinite(c) ? 1.0 / (4.0 * c * c) : 0.0;
  if (ds == 0.0) return 0.0;
  const double z1 = 1.0 / (y * y) + 1.0 / ((1.0 - y) * (1.0 - y));
  if (order == 1) return ds * z1;
  const double z2 = -2.0 / (y * y * y) + 2.0 / std::pow(1.0 - y, 3);
  if (order == 2) return ds * (1.0 - 2.0 * sigma) * z1 * z1 + ds * z2;
  throw ConfigError("smooth_step: derivative order must be 0, 1 or 2");
}

CutoffFamily::CutoffFamily(double eps, double b) : eps_(eps), b_(b) {
  if (!(eps > 0.0) || !std::isfinite(eps) || !std::isfinite(b) || b < 5.0 * eps) {
    std::ostringstream os;
    os << "cutoff: need eps > 0 and b >= 5 eps (eps = " << eps << ", b = " << b << ")";
    throw ConfigError(os.str());
  }
  slope_ = 1.0 / (b - 3.0 * eps);
}

double CutoffFamily::value(double x) const {
  if (x <= eps_) return 0.0;
  if (x >= b_ - eps_) return 1.0;
  if (x <= 2.0 * eps_) return slope_ * eps_ * step_integral((x - eps_) / eps_);
  if (x <= b_ - 2.0 * eps_) return slope_ * (0.5 * eps_ + (x - 2.0 * eps_));
  return 1.0 - slope_ * eps_ * step_integral((b_ - eps_ - x) / eps_);
}

double CutoffFamily::derivative(double x, int order) const {
  if (order == 0) return value(x);
  const double p = (x - eps_) / eps_;
  const double q = (b_ - eps_ - x) / eps_;
  const double e = eps_;
  switch (order) {
    case 1:
      return slope_ * smooth_step(p) * smooth_step(q);
    case 2:
      return slope_ / e * (smooth_step(p, 1) * smooth_step(q) - smooth_step(p) * smooth_step(q, 1));
    case 3:
      return slope_ / (e * e) *
             (smooth_step(p, 2) * smooth_step(q) - 2.0 * smooth_step(p, 1) * smooth_step(q, 1) +
              smooth_step(p) * smooth_step(q, 2));
    default:
      throw ConfigError("cutoff: derivative order must lie in 0..3");
  }
}

std::vector<double> CutoffFamily::sample(const SpectralGrid& grid, double shift, int order) const {
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = derivative(grid.x(j) + shift, order);
  return out;
}

CutoffFamily make_cutoff(double eps, double b) { return CutoffFamily(eps, b); }

namespace {

// Samples band-limited fields on a grid fine enough to resolve the cutoff,
// so that products with chi and its derivatives are integrated accurately.
class WindowQuadrature {
 public:
  WindowQuadrature(const SpectralGrid& grid, double eps)
      : coarse_(grid), fine_(refined_grid(grid, refinement(grid, eps))) {}

  const SpectralGrid& fine() const noexcept { return fine_; }

  CVector interpolate(const CVector& coeffs) const {
    CVector out(fine_.size());
    fine_.inverse(pad_coeffs(coeffs, fine_.size()), out);
    return out;
  }

  CVector derivative(const Field& u, int order) const {
    if (order < 0) throw ConfigError("windowed energy: negative order");
    check_derivative_order(coarse_, static_cast<std::size_t>(order), "windowed energy");
    CVector c = to_spectral(u);
    for (std::size_t j = 0; j < c.size(); ++j) {
      c[j] *= derivative_symbol(coarse_, j, static_cast<std::size_t>(order));
    }
    return interpolate(c);
  }

  std::vector<double> density(const Field& u, int order) const {
    const CVector d = derivative(u, order);
    std::vector<double> out(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) out[j] = std::norm(d[j]);
    return out;
  }

  // Trapezoid on [-L, L] for a non-periodic window: the periodic sum counts
  // the left end once, so half of it is moved to the right end.
  template <class Window>
  double integrate(const std::vector<double>& density, Window&& window) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < density.size(); ++j) acc += density[j] * window(fine_.x(j));
    const double L = fine_.half_length();
    acc += 0.5 * density[0] * (window(L) - window(-L));
    return acc * fine_.dx();
  }

 private:
  static std::size_t refinement(const SpectralGrid& grid, double eps) {
    std::size_t factor = 1;
    while (factor < 32 && grid.dx() / static_cast<double>(factor) > eps / 16.0) factor *= 2;
    return factor;
  }

  SpectralGrid coarse_;
  SpectralGrid fine_;
};

double band_value(const CutoffFamily& cut, double R, double y) {
  return cut.value(y) - cut.value(y - (R - cut.b()));
}

}  // namespace

double windowed_energy(const Field& u, int order, const CutoffFamily& cut, double shift) {
  const WindowQuadrature q(u.grid(), cut.eps());
  return q.integrate(q.density(u, order), [&](double x) { return cut.value(x + shift); });
}

void FrontParams::validate() const {
  std::ostringstream os;
  if (!std::isfinite(x0)) {
    os << "front: x0 must be finite";
  } else if (!(v > 0.0)) {
    os << "front: v = " << v << " must be positive";
  } else if (!(eps_prime > 0.0)) {
    os << "front: eps' = " << eps_prime << " must be positive";
  } else if (!(R > eps_prime)) {
    os << "front: R = " << R << " must exceed eps' = " << eps_prime;
  } else if (l < 1) {
    os << "front: l = " << l << " must be a positive integer";
  } else {
    return;
  }
  throw ConfigError(os.str());
}

namespace {

void check_band(const CutoffFamily& cut, double R) {
  if (R < 2.0 * cut.b() - 2.0 * cut.eps()) {
    std::ostringstream os;
    os << "band window: R = " << R << " must be at least 2b - 2 eps = "
       << 2.0 * cut.b() - 2.0 * cut.eps();
    throw ConfigError(os.str());
  }
}

double smoothing_from_slices(const std::vector<double>& times, const std::vector<double>& per) {
  double total = 0.0;
  for (std::size_t i = 1; i < per.size(); ++i) {
    total += 0.5 * (times[i] - times[i - 1]) * (per[i] + per[i - 1]);
  }
  return total;
}

}  // namespace

double band_window_value(const CutoffFamily& cut, double R, double y) {
  check_band(cut, R);
  return band_value(cut, R, y);
}

double local_smoothing_integral(const Trajectory& traj, int order, const FrontParams& front,
                                const CutoffFamily& cut) {
  front.validate();
  check_band(cut, front.R);
  const std::size_t count = traj.slices.size();
  if (count < 2) return 0.0;
  const WindowQuadrature q(traj.grid, cut.eps());
  std::vector<double> per(count);
  parallel_for(count, [&](std::size_t i) {
    const double shift = front.v * traj.times[i] - front.x0;
    per[i] = q.integrate(q.density(traj.slices[i], order),
                         [&](double x) { return band_value(cut, front.R, x + shift); });
  });
  return smoothing_from_slices(traj.times, per);
}

EnergyIdentityTerms energy_identity_terms(const Field& u, int order, const CutoffFamily& cut,
                                          double shift, double v, const ModelParams& params) {
  const WindowQuadrature q(u.grid(), cut.eps());
  const CVector w = q.derivative(u, order);
  const CVector wx = q.derivative(u, order + 1);
  const CVector nw = q.derivative(nonlinear_rhs(u, params), order);
  std::vector<double> w2(w.size()), wx2(w.size()), cross(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w2[j] = std::norm(w[j]);
    wx2[j] = std::norm(wx[j]);
    cross[j] = (nw[j] * std::conj(w[j])).real();
  }
  EnergyIdentityTerms t;
  auto chi = [&](int k) { return [&cut, shift, k](double x) { return cut.derivative(x + shift, k); }; };
  t.A1 = 0.5 * v * q.integrate(w2, chi(1));
  t.A2 = 1.5 * q.integrate(wx2, chi(1));
  t.A3 = 0.5 * q.integrate(w2, chi(3));
  t.N = q.integrate(cross, chi(0));
  return t;
}

double kink_value(const OneSidedSpec& spec, double x) {
  const double r = spec.x0 - x;
  if (r <= 0.0) return 0.0;
  return spec.amplitude * std::pow(r, spec.s + 0.6) * std::exp(-(r / spec.width) * (r / spec.width));
}

Field one_sided_data(const OneSidedSpec& spec, const SpectralGrid& grid) {
  if (spec.s < 1 || spec.l < 1) throw ConfigError("one_sided_data: s and l must be positive");
  if (!(spec.amplitude > 0.0) || !(spec.width > 0.0)) {
    throw ConfigError("one_sided_data: kink amplitude and width must be positive");
  }
  check_derivative_order(grid, static_cast<std::size_t>(spec.s + spec.l + 1), "one_sided_data");
  const Field kink = Field::sample(grid, [&](double x) { return kink_value(spec, x); });
  const double L = grid.half_length();
  const double edge = kink_value(spec, -(1.0 - kOuterFraction) * L);
  if (edge > 1e-12 * kink.max_abs()) {
    std::ostringstream os;
    os << "one_sided_data: kink reaches the seam neighbourhood (value " << edge
       << "); reduce its width or move x0 right";
    throw ConfigError(os.str());
  }
  Field u = Field::sample(grid, [&](double x) {
    return 2.0 * spec.lambda * std::pow(japanese_bracket(x), -spec.m) + kink_value(spec, x);
  });
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < u.size(); ++j) {
    lower = std::min(lower, std::pow(japanese_bracket(grid.x(j)), spec.m) * std::abs(u[j]));
  }
  if (lower < spec.lambda) {
    std::ostringstream os;
    os << "one_sided_data: lower bound " << lower << " fell below lambda = " << spec.lambda
       << "; use a smaller kink amplitude";
    throw ConfigError(os.str());
  }
  return u;
}

RegularityReport regularity_experiment(const FrontParams& front, const ModelParams& params,
                                       const SpectralGrid& grid,
                                       const RegularityOptions& options) {
  front.validate();
  params.validate();
  OneSidedSpec data = options.data;
  data.x0 = front.x0;
  data.l = front.l;
  data.lambda = params.lambda;
  data.m = params.m;

  RegularityReport rep;
  rep.proxy_s = data.s;
  rep.theorem_s = params.s;
  rep.front = front;
  rep.T = options.T;
  rep.dt = options.dt;
  rep.orders = options.orders;
  if (rep.orders.empty()) {
    for (int j = 1; j <= front.l; ++j) rep.orders.push_back(data.s + j);
  }
  rep.smoothing_order =
      options.smoothing_order > 0 ? options.smoothing_order : data.s + front.l + 1;
  const int identity_order = options.identity_order > 0 ? options.identity_order : data.s + 1;

  const CutoffFamily cut(front.eps_prime, options.cutoff_b);
  rep.cutoff_eps = cut.eps();
  rep.cutoff_b = cut.b();
  if (front.R < 2.0 * cut.b() - 2.0 * cut.eps()) {
    std::ostringstream os;
    os << "regularity: R = " << front.R << " must be at least 2b - 2 eps' = "
       << 2.0 * cut.b() - 2.0 * cut.eps();
    throw ConfigError(os.str());
  }
  if (options.slices == 0) throw ConfigError("regularity: slice count must be positive");

  const Field u0 = one_sided_data(data, grid);
  const std::size_t fine = 2 * options.slices;
  const Trajectory traj = simulate(u0, options.T, options.dt, params, fine);
  rep.warnings = traj.warnings;
  rep.times = traj.times;

  const std::size_t count = traj.slices.size();
  const std::size_t orders = rep.orders.size();
  rep.windowed.assign(orders, std::vector<double>(count));
  rep.full_line.assign(orders, std::vector<double>(count));
  std::vector<std::vector<double>> control(orders, std::vector<double>(count));
  std::vector<double> half_energy(count);
  std::vector<EnergyIdentityTerms> terms(count);
  const double control_shift = front.R - front.x0;
  const WindowQuadrature q(grid, cut.eps());

  parallel_for(count, [&](std::size_t i) {
    const Field& u = traj.slices[i];
    const double shift = front.v * traj.times[i] - front.x0;
    for (std::size_t k = 0; k < orders; ++k) {
      const auto density = q.density(u, rep.orders[k]);
      rep.windowed[k][i] = q.integrate(density, [&](double x) { return cut.value(x + shift); });
      rep.full_line[k][i] = q.integrate(density, [](double) { return 1.0; });
      control[k][i] = q.integrate(
          density, [&](double x) { return band_value(cut, front.R, x + control_shift); });
    }
    half_energy[i] =
        0.5 * q.integrate(q.density(u, identity_order),
                          [&](double x) { return cut.value(x + shift); });
    terms[i] = energy_identity_terms(u, identity_order, cut, shift, front.v, params);
  });

  for (std::size_t k = 0; k < orders; ++k) {
    const double cs = *std::max_element(rep.windowed[k].begin(), rep.windowed[k].end());
    const double fl = *std::min_element(rep.full_line[k].begin(), rep.full_line[k].end());
    rep.c_star.push_back(cs);
    rep.full_line_min.push_back(fl);
    rep.contrast.push_back(cs > 0.0 ? fl / cs : std::numeric_limits<double>::infinity());
    rep.control_initial.push_back(control[k].front());
    rep.control_final.push_back(control[k].back());
  }

  rep.c_star_star = local_smoothing_integral(traj, rep.smoothing_order, front, cut);
  std::vector<Field> coarse;
  for (std::size_t i = 0; i < count; i += 2) coarse.push_back(traj.slices[i]);
  const Trajectory coarse_traj =
      make_trajectory(params, grid, options.T, std::move(coarse), traj.method);
  rep.c_star_star_coarse = local_smoothing_integral(coarse_traj, rep.smoothing_order, front, cut);
  rep.smoothing_change = rep.c_star_star > 0.0
                             ? std::abs(rep.c_star_star - rep.c_star_star_coarse) / rep.c_star_star
                             : 0.0;

  const double h = options.T / static_cast<double>(fine);
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double fd = (half_energy[i + 1] - half_energy[i - 1]) / (2.0 * h);
    const auto& t = terms[i];
    const double scale = std::max({std::abs(fd), std::abs(t.A1) + std::abs(t.A2) +
                                                     std::abs(t.A3) + std::abs(t.N),
                                   std::numeric_limits<double>::min()});
    rep.identity_mismatch = std::max(rep.identity_mismatch, std::abs(fd - t.total()) / scale);
  }
  return rep;
}

}  // namespace gkdv
