#include "svasym/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool tilted(const ModelParams& params, double p) { return p != 0.0 && params.rho != 0.0; }

// Integrand of the tilt part of log s_p in the natural variable of the state space:
// sigma(z) for beta = 0, sigma(e^u) e^{(1 - beta) u} for beta > 0 with z = e^u.
double tilt_integrand(const ModelParams& params, double t) {
  if (params.beta == 0.0) return params.sigma(t);
  const double z = std::exp(t);
  return params.sigma(z) * std::exp((1.0 - params.beta) * t);
}

double to_natural(const ModelParams& params, double y) {
  return params.beta == 0.0 ? y : std::log(y);
}

// int_a^b of the tilt integrand in the natural variable, split at sigma breakpoints.
double tilt_piece(const ModelParams& params, double a, double b, bool adaptive) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double bp : params.sigma.breakpoints()) {
    if (params.beta != 0.0) {
      if (!(bp > 0.0)) continue;
      bp = std::log(bp);
    }
    if (bp > lo && bp < hi) cuts.push_back(bp);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double t) { return tilt_integrand(params, t); };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    s += adaptive ? gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13)
                  : gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 0);
  }
  return sign * s;
}

double tilt_factor(const ModelParams& params, double p) { return 2.0 * params.rho * p / params.nu; }

std::vector<double> log_speed_nodes(const ModelParams& params, double p, const Grid& g) {
  const std::size_t n = g.size();
  std::vector<double> L(n);
  const double base = std::log(2.0 / (params.nu * params.nu));
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g[i];
    const double lb = params.beta == 0.0 ? 0.0 : 2.0 * params.beta * std::log(y);
    L[i] = base - lb - log_base_scale(params, y);
  }
  if (tilted(params, p)) {
    const double k = tilt_factor(params, p);
    double acc = tilt_piece(params, to_natural(params, 1.0), to_natural(params, g[0]), true);
    L[0] += k * acc;
    for (std::size_t i = 1; i < n; ++i) {
      acc += tilt_piece(params, to_natural(params, g[i - 1]), to_natural(params, g[i]), false);
      L[i] += k * acc;
    }
  }
  return L;
}

double log_sum_exp_weighted(const Grid& g, const std::vector<double>& L) {
  const double mx = *std::max_element(L.begin(), L.end());
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights()[i] * std::exp(L[i] - mx);
  return mx + std::log(s);
}

void require_in_space(const ModelParams& params, double y) {
  if (!params.in_state_space(y)) throw DomainError(fmt::format("y = {} is outside the state space", y));
}

}  // namespace

DensityTable::DensityTable(GridPtr grid, std::vector<double> log_unnormalized, double tilt)
    : grid_(std::move(grid)), log_speed_(std::move(log_unnormalized)), tilt_(tilt) {
  if (log_speed_.size() != grid_->size()) throw GridMismatch("density values differ from grid size");
  log_z_ = log_sum_exp_weighted(*grid_, log_speed_);
  values_.resize(log_speed_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = std::exp(log_speed_[i] - log_z_);
}

double DensityTable::norm_constant() const noexcept { return std::exp(log_z_); }

double DensityTable::integral() const { return grid_->integrate(values_); }

double DensityTable::expect(std::span<const double> f) const {
  if (f.size() != values_.size()) throw GridMismatch("function length differs from density grid");
  double s = 0.0;
  const auto& w = grid_->weights();
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * values_[i] * f[i];
  return s;
}

std::size_t DensityTable::mode_index() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

CsvTable DensityTable::to_csv() const {
  CsvTable t({"y", "density"});
  for (std::size_t i = 0; i < values_.size(); ++i)
    t.add_row({csv_number((*grid_)[i]), csv_number(values_[i])});
  return t;
}

double log_scale_density(const ModelParams& params, double p, double y) {
  require_in_space(params, y);
  double v = log_base_scale(params, y);
  if (tilted(params, p)) {
    v -= tilt_factor(params, p) * tilt_piece(params, to_natural(params, 1.0), to_natural(params, y), true);
  }
  return v;
}

double scale_density(const ModelParams& params, double p, double y) {
  return std::exp(log_scale_density(params, p, y));
}

double log_speed_density(const ModelParams& params, double p, double y) {
  const double ls = log_scale_density(params, p, y);
  const double lb = params.beta == 0.0 ? 0.0 : 2.0 * params.beta * std::log(y);
  return std::log(2.0 / (params.nu * params.nu)) - lb - ls;
}

double log_speed_slope(const ModelParams& params, double p, double y) {
  const double yb = params.y_pow_beta(y);
  const double drift = 2.0 * params.tilted_drift(p, y) / (params.nu * params.nu * yb * yb);
  return params.beta == 0.0 ? drift : drift - 2.0 * params.beta / y;
}

Window choose_window(const ModelParams& params, double p, const GridSpec& spec) {
  const bool log_axis = params.beta != 0.0;
  constexpr std::size_t probe_points = 1025;
  constexpr int max_half_steps = 120;
  const double growth = std::sqrt(2.0);

  double center;
  double dl;
  double dr;
  if (log_axis) {
    center = std::log(params.m > 0.0 ? params.m : 1.0);
    dl = dr = 1.0;
  } else {
    center = params.m;
    dl = dr = 2.0 * params.nu / std::sqrt(2.0);
  }
  const bool fixed_lo = spec.lo.has_value();
  const bool fixed_hi = spec.hi.has_value();
  auto edges = [&]() {
    double lo = fixed_lo ? *spec.lo : (log_axis ? std::exp(center - dl) : center - dl);
    double hi = fixed_hi ? *spec.hi : (log_axis ? std::exp(center + dr) : center + dr);
    return std::pair{lo, hi};
  };
  if (fixed_lo) require_in_space(params, *spec.lo);
  if (fixed_hi) require_in_space(params, *spec.hi);

  for (int steps = 0;; ) {
    auto [lo, hi] = edges();
    if (!(hi > lo)) throw TruncationError("window collapsed; check the fixed window bounds");
    const Grid probe = log_axis ? Grid::log_uniform(lo, hi, probe_points) : Grid::uniform(lo, hi, probe_points);
    const auto L = log_speed_nodes(params, p, probe);
    const double log_total = log_sum_exp_weighted(probe, L);

    // Exponential-tail bound: mass beyond an edge is about e^{L} / |slope| in the natural variable.
    double log_left = kInf;
    {
      const double slope = log_speed_slope(params, p, lo);
      const double dslope = log_axis ? lo * slope + 1.0 : slope;
      if (dslope > 0.0) log_left = L.front() + (log_axis ? std::log(lo) : 0.0) - std::log(dslope);
    }
    double log_right = kInf;
    {
      const double slope = log_speed_slope(params, p, hi);
      if (slope < 0.0) log_right = L.back() - std::log(-slope);
    }
    const double rel_left = std::exp(log_left - log_total);
    const double rel_right = std::exp(log_right - log_total);
    const double budget = 0.5 * spec.tail_tolerance;
    const bool left_ok = fixed_lo || rel_left < budget;
    const bool right_ok = fixed_hi || rel_right < budget;
    if ((left_ok && right_ok) || (fixed_lo && fixed_hi)) {
      return Window{lo, hi, (fixed_lo ? 0.0 : rel_left) + (fixed_hi ? 0.0 : rel_right)};
    }
    if (!left_ok) {
      dl *= growth;
      ++steps;
    }
    if (!right_ok) {
      dr *= growth;
      ++steps;
    }
    if (steps > max_half_steps)
      throw TruncationError(fmt::format("window [{}, {}] still misses mass {:.3g} after 60 doublings", lo,
                                        hi, rel_left + rel_right));
  }
}

GridPtr make_grid(const ModelParams& params, double lo, double hi, std::size_t points) {
  if (points < 5) throw Error("grid needs at least 5 points");
  if (params.beta != 0.0) return std::make_shared<const Grid>(Grid::log_uniform(lo, hi, points));
  const auto bps = params.sigma.breakpoints();
  const bool kink_at_zero = std::find(bps.begin(), bps.end(), 0.0) != bps.end();
  if (kink_at_zero && lo < 0.0 && hi > 0.0) {
    const std::size_t intervals = points - 1;
    const std::size_t half = intervals / 2;
    std::size_t k = static_cast<std::size_t>(std::llround(0.5 * intervals * (-lo) / (hi - lo)));
    k = std::clamp<std::size_t>(k, 1, half >= 2 ? half - 1 : 1);
    const double h = std::max(-lo / (2.0 * k), hi / static_cast<double>(intervals - 2 * k));
    const double a = -(static_cast<double>(2 * k) * h);
    const double b = static_cast<double>(intervals - 2 * k) * h;
    std::vector<double> y(points);
    for (std::size_t i = 0; i < points; ++i) y[i] = a + h * static_cast<double>(i);
    y[2 * k] = 0.0;
    y.back() = b;
    return std::make_shared<const Grid>(Grid::from_points(std::move(y)));
  }
  return std::make_shared<const Grid>(Grid::uniform(lo, hi, points));
}

DensityTable density_on_grid(const ModelParams& params, double p, GridPtr grid) {
  auto L = log_speed_nodes(params, p, *grid);
  return DensityTable(std::move(grid), std::move(L), p);
}

DensityTable invariant_density(const ModelParams& params, double p, const GridSpec& spec) {
  if (!std::isfinite(p)) throw Error("tilt p must be finite");
  const Window w = choose_window(params, p, spec);
  auto grid = make_grid(params, w.lo, w.hi, spec.points);
  DensityTable d = density_on_grid(params, p, std::move(grid));
  d.set_tail_mass(w.tail_mass);
  return d;
}

DensityTable exp_tilted_density(const DensityTable& base, std::span<const double> h) {
  if (h.size() != base.values().size()) throw GridMismatch("tilt function length differs from grid");
  std::vector<double> L = base.log_speed();
  for (std::size_t i = 0; i < L.size(); ++i) L[i] += 2.0 * h[i];
  return DensityTable(base.grid_ptr(), std::move(L), base.tilt());
}

QuadratureValue richardson_expect(const DensityTable& density, std::span<const double> f) {
  const Grid& g = density.grid();
  const double fine = density.expect(f);
  const Grid coarse = g.coarsened();
  const auto Lc = g.restrict_to_coarse(density.log_speed());
  const auto fc = g.restrict_to_coarse(f);
  const double mx = *std::max_element(Lc.begin(), Lc.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double e = coarse.weights()[i] * std::exp(Lc[i] - mx);
    num += e * fc[i];
    den += e;
  }
  const double crude = num / den;
  return QuadratureValue{(4.0 * fine - crude) / 3.0, std::abs(fine - crude) / 3.0, g.size()};
}

std::vector<double> sigma_sq_nodes(const ModelParams& params, const Grid& grid) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = params.sigma(grid[i]);
    s[i] = v * v;
  }
  return s;
}

QuadratureValue sigma_bar_sq_estimate(const ModelParams& params, const GridSpec& spec) {
  if (const auto* c = std::get_if<ConstantVol>(&params.sigma.kind())) return {c->s0 * c->s0, 0.0, 0};
  constexpr std::size_t max_points = std::size_t{1} << 21;
  GridSpec s = spec;
  const Window w = choose_window(params, 0.0, spec);
  s.lo = w.lo;
  s.hi = w.hi;
  for (;;) {
    auto grid = make_grid(params, w.lo, w.hi, s.points);
    const DensityTable d = density_on_grid(params, 0.0, grid);
    QuadratureValue q = richardson_expect(d, sigma_sq_nodes(params, d.grid()));
    if (q.error < 1e-6 * std::abs(q.value) || s.points * 2 > max_points) return q;
    s.points *= 2;
  }
}

double sigma_bar_sq(const ModelParams& params, const GridSpec& spec) {
  return sigma_bar_sq_estimate(params, spec).value;
}

double dirichlet_form(const ModelParams& params, const DensityTable& density, const FunctionTable& h) {
  require_same_grid(density.grid(), *h.grid, "dirichlet_form");
  const Grid& g = density.grid();
  const auto d = nodal_derivatives(g, h.values);
  std::vector<double> integrand(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    integrand[i] = params.half_diffusion_sq(g[i]) * d.first[i] * d.first[i];
  }
  return std::max(0.0, density.expect(integrand));
}

std::vector<double> apply_generator(const ModelParams& params, double p, const Grid& grid,
                                    std::span<const double> f) {
  const auto bps = params.sigma.breakpoints();
  const auto d = nodal_derivatives(grid, f, bps);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid[i];
    out[i] = params.tilted_drift(p, y) * d.first[i] + params.half_diffusion_sq(y) * d.second[i];
  }
  return out;
}

double reversibility_check(const ModelParams& params, const DensityTable& density,
                           const FunctionTable& f, const FunctionTable& g) {
  require_same_grid(density.grid(), *f.grid, "reversibility_check");
  require_same_grid(density.grid(), *g.grid, "reversibility_check");
  const double p = density.tilt();
  const auto bf = apply_generator(params, p, density.grid(), f.values);
  const auto bg = apply_generator(params, p, density.grid(), g.values);
  std::vector<double> integrand(bf.size());
  for (std::size_t i = 0; i < bf.size(); ++i) integrand[i] = f.values[i] * bg[i] - g.values[i] * bf[i];
  return std::abs(density.expect(integrand));
}

double stationarity_residual(const ModelParams& params, const DensityTable& density,
                             const FunctionTable& xi) {
  require_same_grid(density.grid(), *xi.grid, "stationarity_residual");
  const auto b = apply_generator(params, density.tilt(), density.grid(), xi.values);
  return std::abs(density.expect(b));
}

}  // namespace svasym
