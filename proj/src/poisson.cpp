#include "svasym/poisson.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

namespace {

constexpr double kCenteringTolerance = 1e-5;

// Integral of f beyond an edge, from the local exponential rate of f times dy/du in the grid variable.
double edge_tail(const Grid& g, const std::vector<double>& f, std::size_t edge, std::size_t inner) {
  const double a = f[edge] * g.jacobian(edge);
  const double b = f[inner] * g.jacobian(inner);
  if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) return 0.0;
  const double rate = std::log(b / a) / std::abs(g.u(inner) - g.u(edge));
  return rate > 0.0 ? a / rate : 0.0;
}

}  // namespace

CsvTable Corrector::to_csv() const {
  CsvTable t({"y", "chi", "chi_prime"});
  for (std::size_t i = 0; i < chi.size(); ++i)
    t.add_row({csv_number((*grid)[i]), csv_number(chi[i]), csv_number(chi_prime[i])});
  return t;
}

Corrector solve_corrector_on(const ModelParams& params, double p, const DensityTable& density,
                             std::optional<double> supplied) {
  const Grid& g = density.grid();
  const std::size_t n = g.size();
  const auto s2 = sigma_sq_nodes(params, g);
  const double discrete_bar = params.sigma.is_constant() ? s2[0] : density.expect(s2);
  const double bar = supplied.value_or(discrete_bar);
  const double defect = bar - discrete_bar;
  if (std::abs(defect) > kCenteringTolerance) {
    throw CenteringError(fmt::format(
        "sigma_bar^2 = {} leaves a centering defect of {:.3g} against the invariant law", bar, defect));
  }

  Corrector c;
  c.grid = density.grid_ptr();
  c.p = p;
  c.sigma_bar_sq = bar;
  c.y_ref = params.m;
  c.chi.assign(n, 0.0);
  c.chi_prime.assign(n, 0.0);

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = density.values()[i] * (bar - s2[i]);
  const QuadratureValue centering = richardson_expect(density, [&] {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = bar - s2[i];
    return v;
  }());
  c.quadrature_error = centering.error;
  if (p == 0.0 || std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) return c;

  // Left-anchored flux from the lower edge, right-anchored flux accumulated from the upper edge.
  std::vector<double> left = g.cumulative(f);
  const double left_tail = edge_tail(g, f, 0, 1);
  for (double& v : left) v += left_tail;
  std::vector<double> right(n, 0.0);
  right[n - 1] = edge_tail(g, f, n - 1, n - 2);
  long double acc = right[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    acc += 0.5L * (g.u(i + 1) - g.u(i)) * (f[i] * g.jacobian(i) + f[i + 1] * g.jacobian(i + 1));
    right[i] = static_cast<double>(acc);
  }
  const std::size_t mode = density.mode_index();
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double flux_weight = 2.0 * params.half_diffusion_sq(g[i]) * density.values()[i];
    const double from_left = left[i] / flux_weight;
    const double from_right = -right[i] / flux_weight;
    c.chi_prime[i] = i <= mode ? from_left : from_right;
    gap = std::max(gap, std::abs(left[i] + right[i]));
  }
  c.representation_gap = gap;

  std::vector<double> chi = g.cumulative(c.chi_prime);
  const double yr = std::clamp(c.y_ref, g.lo(), g.hi());
  const auto& y = g.points();
  const std::size_t j = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), yr) - y.begin()), n - 1);
  const std::size_t i0 = j == 0 ? 0 : j - 1;
  const double w = (yr - y[i0]) / (y[i0 + 1] - y[i0]);
  const double offset = (1.0 - w) * chi[i0] + w * chi[i0 + 1];

  const double scale = p * p;
  for (std::size_t i = 0; i < n; ++i) {
    c.chi[i] = scale * (chi[i] - offset);
    c.chi_prime[i] *= scale;
  }
  return c;
}

Corrector solve_corrector(const ModelParams& params, double p, const GridSpec& spec) {
  return solve_corrector_on(params, p, invariant_density(params, 0.0, spec));
}

Corrector solve_corrector(const ModelParams& params, double p, double sigma_bar_sq,
                          const GridSpec& spec) {
  return solve_corrector_on(params, p, invariant_density(params, 0.0, spec), sigma_bar_sq);
}

std::vector<double> corrector_rhs(const ModelParams& params, const Corrector& c) {
  const auto s2 = sigma_sq_nodes(params, *c.grid);
  std::vector<double> r(s2.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * c.p * c.p * (c.sigma_bar_sq - s2[i]);
  return r;
}

double corrector_residual(const ModelParams& params, const Corrector& c) {
  const Grid& g = *c.grid;
  const auto b = apply_generator(params, 0.0, g, c.chi);
  const auto rhs = corrector_rhs(params, c);
  const double u0 = g.u(0);
  const double u1 = g.u(g.size() - 1);
  const double lo = u0 + 0.25 * (u1 - u0);
  const double hi = u0 + 0.75 * (u1 - u0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = g.u(i);
    if (u < lo || u > hi) continue;
    worst = std::max(worst, std::abs(b[i] - rhs[i]));
  }
  return worst;
}

GrowthReport growth_bound_check(const Corrector& c, const ModelParams& params) {
  GrowthReport rep;
  if (std::all_of(c.chi_prime.begin(), c.chi_prime.end(), [](double v) { return v == 0.0; })) {
    rep.pass = true;
    rep.trivial = true;
    return rep;
  }
  const double growth = params.sigma.growth_exponent();
  if (params.beta == 0.0) throw NotApplicable("growth bound on chi' is logarithmic for beta = 0");
  if (!(growth > 0.0)) throw NotApplicable("growth bound needs a positive sigma growth exponent");

  const Grid& g = *c.grid;
  const std::size_t n = g.size();
  const double u0 = g.u(0);
  const double u1 = g.u(n - 1);
  const double start = u0 + 0.75 * (u1 - u0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.u(i) < start) continue;
    const double y = g[i];
    rep.y.push_back(y);
    rep.ratio.push_back(std::abs(c.chi_prime[i]) / std::pow(y, 2.0 * growth - 1.0));
  }
  rep.c1 = rep.ratio.empty() ? 0.0 : *std::max_element(rep.ratio.begin(), rep.ratio.end());

  // Blow-up: strictly increasing ratio across the last decade of y with more than doubling.
  const double top = g.hi();
  std::size_t first = rep.y.size();
  for (std::size_t i = 0; i < rep.y.size(); ++i) {
    if (rep.y[i] >= top / 10.0) {
      first = i;
      break;
    }
  }
  bool blow_up = false;
  if (first + 1 < rep.y.size()) {
    bool increasing = true;
    for (std::size_t i = first + 1; i < rep.y.size(); ++i)
      if (!(rep.ratio[i] > rep.ratio[i - 1])) increasing = false;
    blow_up = increasing && rep.ratio.back() > 2.0 * rep.ratio[first];
  }
  rep.pass = std::isfinite(rep.c1) && !blow_up;
  return rep;
}

}  // namespace svasym
