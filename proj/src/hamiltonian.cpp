#include "svasym/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>

#include <fmt/format.h>

#include "svasym/errors.hpp"
#include "svasym/grid.hpp"
#include "svasym/parallel.hpp"
#include "svasym/poisson.hpp"
#include "svasym/tridiagonal.hpp"

namespace svasym {

namespace {

constexpr double kEdgeMassLimit = 1e-10;
constexpr int kMaxWidenings = 40;

struct GridEigen {
  double lambda = 0.0;
  double edge_mass = 0.0;
};

SymTridiagonal eigen_matrix(const ModelParams& params, double p, const Grid& grid) {
  const std::size_t n = grid.size();
  if (n < 5) throw Error("eigen grid needs at least 5 points");
  const auto& y = grid.points();
  const DensityTable dens = density_on_grid(params, p, std::make_shared<const Grid>(grid));
  const auto& l = dens.log_speed();
  const double half_nu2 = 0.5 * params.nu * params.nu;
  const double half_p2 = 0.5 * p * p;

  std::vector<double> a(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double mid = 0.5 * (y[j] + y[j + 1]);
    const double yb = params.y_pow_beta(mid);
    a[j] = half_nu2 * yb * yb / (y[j + 1] - y[j]);
  }
  const std::size_t m = n - 2;
  SymTridiagonal t;
  t.d.resize(m);
  t.e.resize(m - 1);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (y[i + 1] - y[i - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s = params.sigma(y[i]);
    const double flux = a[i - 1] * std::exp(0.5 * (l[i - 1] - l[i])) + a[i] * std::exp(0.5 * (l[i + 1] - l[i]));
    t.d[i - 1] = half_p2 * s * s - flux / w[i];
    if (i + 2 < n) t.e[i - 1] = a[i] / std::sqrt(w[i] * w[i + 1]);
  }
  return t;
}

GridEigen solve_on_grid(const ModelParams& params, double p, const Grid& grid, bool want_edge) {
  const SymTridiagonal t = eigen_matrix(params, p, grid);
  double lambda = largest_eigenvalue(t);
  GridEigen out;
  if (!want_edge) {
    out.lambda = lambda;
    return out;
  }
  const auto v = eigenvector(t, lambda);
  const auto av = t.multiply(v);
  double rq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) rq += v[i] * av[i];
  out.lambda = rq;
  const std::size_t m = v.size();
  const std::size_t band = std::max<std::size_t>(1, (m + 19) / 20);
  double edge = 0.0;
  for (std::size_t i = 0; i < band; ++i) edge += v[i] * v[i] + v[m - 1 - i] * v[m - 1 - i];
  out.edge_mass = edge;
  return out;
}

double constant_sigma(const ModelParams& params) {
  return std::get<ConstantVol>(params.sigma.kind()).s0;
}

struct LogMean {
  double log_mean = 0.0;
  double rel_se = 0.0;
};

LogMean log_mean_exp(const std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  long double s = 0.0L, s2 = 0.0L;
  for (double v : z) {
    const long double w = std::exp(static_cast<long double>(v - mx));
    s += w;
    s2 += w * w;
  }
  const long double n = static_cast<long double>(z.size());
  const long double mean = s / n;
  const long double var = z.size() > 1 ? std::max(0.0L, (s2 - n * mean * mean) / (n - 1.0L)) : 0.0L;
  return {mx + static_cast<double>(std::log(mean)), static_cast<double>(std::sqrt(var / n) / mean)};
}

// Growth rate between two horizons from paired per-path exponents; delta-method SE.
McEstimate growth_rate(const std::vector<double>& z_half, const std::vector<double>& z_full, double span,
                       std::uint64_t seed) {
  const LogMean a = log_mean_exp(z_half);
  const LogMean b = log_mean_exp(z_full);
  const std::size_t n = z_full.size();
  const double mx_a = *std::max_element(z_half.begin(), z_half.end());
  const double mx_b = *std::max_element(z_full.begin(), z_full.end());
  const double mean_a = std::exp(a.log_mean - mx_a);
  const double mean_b = std::exp(b.log_mean - mx_b);
  long double s = 0.0L, s2 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = std::exp(z_full[i] - mx_b) / mean_b - std::exp(z_half[i] - mx_a) / mean_a;
    s += d;
    s2 += d * d;
  }
  const long double nn = static_cast<long double>(n);
  const long double var = n > 1 ? std::max(0.0L, (s2 - s * s / nn) / (nn - 1.0L)) : 0.0L;
  McEstimate e;
  e.value = (b.log_mean - a.log_mean) / span;
  e.se = static_cast<double>(std::sqrt(var / nn)) / span;
  e.samples = n;
  e.seed = seed;
  if (b.rel_se > 0.25 || a.rel_se > 0.25) e.warnings.push_back("VarianceWarning");
  return e;
}

}  // namespace

const char* method_name(HamiltonianMethod m) noexcept {
  switch (m) {
    case HamiltonianMethod::Eigen: return "eigen";
    case HamiltonianMethod::MonteCarlo: return "mc";
    case HamiltonianMethod::ClosedForm: return "closed_form";
  }
  return "?";
}

HamiltonianMethod parse_method(const std::string& name) {
  if (name == "eigen") return HamiltonianMethod::Eigen;
  if (name == "mc") return HamiltonianMethod::MonteCarlo;
  if (name == "closed_form") return HamiltonianMethod::ClosedForm;
  throw ValidationError(fmt::format("unknown Hamiltonian method '{}' (eigen, mc, closed_form)", name));
}

double hbar0_eigen_on_grid(const ModelParams& params, double p, const Grid& grid) {
  return solve_on_grid(params, p, grid, false).lambda;
}

EigenEstimate hbar0_eigen(const ModelParams& params, double p, const GridSpec& spec) {
  if (!std::isfinite(p)) throw ValidationError("p must be finite");
  EigenEstimate out;
  if (p == 0.0) return out;
  if (params.sigma.is_constant()) {
    const double s0 = constant_sigma(params);
    out.value = out.fine = out.coarse = 0.5 * p * p * s0 * s0;
    return out;
  }
  const std::size_t points = spec.points % 2 == 0 ? spec.points + 1 : spec.points;
  const Window w = choose_window(params, p, spec);
  const bool log_axis = params.beta != 0.0;
  const bool fixed_lo = spec.lo.has_value();
  const bool fixed_hi = spec.hi.has_value();
  double lo = w.lo, hi = w.hi;
  for (int k = 0;; ++k) {
    const GridPtr grid = make_grid(params, lo, hi, points);
    const GridEigen fine = solve_on_grid(params, p, *grid, true);
    if (fine.edge_mass < kEdgeMassLimit || (fixed_lo && fixed_hi) || k == kMaxWidenings) {
      if (fine.edge_mass >= kEdgeMassLimit) {
        throw TruncationError(fmt::format(
            "eigenfunction mass {:.3g} near the window edges [{:.6g}, {:.6g}]; widen the window", fine.edge_mass,
            lo, hi));
      }
      const double coarse = solve_on_grid(params, p, grid->coarsened(), true).lambda;
      out.fine = fine.lambda;
      out.coarse = coarse;
      out.value = (4.0 * fine.lambda - coarse) / 3.0;
      out.error = std::abs(fine.lambda - coarse) / 3.0;
      out.lo = grid->lo();
      out.hi = grid->hi();
      out.points = grid->size();
      out.edge_mass = fine.edge_mass;
      return out;
    }
    const double growth = std::sqrt(2.0);
    if (log_axis) {
      const double c = 0.5 * (std::log(lo) + std::log(hi));
      if (!fixed_lo) lo = std::exp(c - (c - std::log(lo)) * growth);
      if (!fixed_hi) hi = std::exp(c + (std::log(hi) - c) * growth);
    } else {
      const double c = 0.5 * (lo + hi);
      if (!fixed_lo) lo = c - (c - lo) * growth;
      if (!fixed_hi) hi = c + (hi - c) * growth;
    }
  }
}

HamiltonianMc hbar0_mc(const ModelParams& params, double p, const McConfig& mc,
                       const HamiltonianMcOptions& options) {
  if (!std::isfinite(p)) throw ValidationError("p must be finite");
  const double T = options.horizon;
  if (!(T > 10.0)) {
    throw ValidationError(fmt::format("horizon {} too short: need T times the relaxation rate (1) above 10", T));
  }
  if (mc.paths < 10000) throw ValidationError("hbar0_mc needs at least 10^4 paths");
  mc.check(params);

  HamiltonianMc out;
  out.horizon = T;
  if (p == 0.0) {
    out.estimate.samples = out.single_horizon.samples = mc.paths;
    out.estimate.seed = out.single_horizon.seed = mc.seed;
    if (options.girsanov_pair) out.girsanov = out.estimate;
    return out;
  }

  const DensityTable pi_p = invariant_density(params, p, options.grid);
  out.start = pi_p.grid()[pi_p.mode_index()];

  std::optional<TiltTable> tilt;
  if (options.importance && !params.sigma.is_constant()) {
    const Corrector c = solve_corrector(params, p, options.grid);
    tilt.emplace(*c.grid, c.chi_prime);
  }

  TiltedRequest req;
  req.p = p;
  req.h = tilt ? &*tilt : nullptr;
  req.y0 = out.start;
  req.burn_in = T / 10.0;
  req.checkpoints = {T / 2.0, T};
  const TiltedBatch b = simulate_tilted(params, req, mc);

  const double half_p2 = 0.5 * p * p;
  std::vector<double> z_half(mc.paths), z_full(mc.paths);
  for (std::size_t i = 0; i < mc.paths; ++i) {
    z_half[i] = half_p2 * b.at(b.int_sigma_sq, i, 0) + b.at(b.log_weight, i, 0);
    z_full[i] = half_p2 * b.at(b.int_sigma_sq, i, 1) + b.at(b.log_weight, i, 1);
  }
  out.estimate = growth_rate(z_half, z_full, T / 2.0, mc.seed);
  const LogMean single = log_mean_exp(z_full);
  out.single_horizon.value = single.log_mean / T;
  out.single_horizon.se = single.rel_se / T;
  out.single_horizon.samples = mc.paths;
  out.single_horizon.seed = mc.seed;
  if (single.rel_se > 0.25) out.single_horizon.warnings.push_back("VarianceWarning");

  if (options.girsanov_pair) {
    const DensityTable pi = invariant_density(params, 0.0, options.grid);
    TiltedRequest base;
    base.p = 0.0;
    base.y0 = pi.grid()[pi.mode_index()];
    base.burn_in = T / 10.0;
    base.checkpoints = {T / 2.0, T};
    McConfig mc_base = mc;
    mc_base.seed = derive_seed(mc.seed, 1);
    const TiltedBatch g = simulate_tilted(params, base, mc_base);
    const double a = params.rho * p;
    const double c = 0.5 * (1.0 - params.rho * params.rho) * p * p;
    for (std::size_t i = 0; i < mc.paths; ++i) {
      z_half[i] = a * g.at(g.int_sigma_dw, i, 0) + c * g.at(g.int_sigma_sq, i, 0);
      z_full[i] = a * g.at(g.int_sigma_dw, i, 1) + c * g.at(g.int_sigma_sq, i, 1);
    }
    out.girsanov = growth_rate(z_half, z_full, T / 2.0, mc_base.seed);
  }
  return out;
}

double convexity_defect(const std::vector<double>& p, const std::vector<double>& h, std::size_t k) {
  const double right = (h[k + 1] - h[k]) / (p[k + 1] - p[k]);
  const double left = (h[k] - h[k - 1]) / (p[k] - p[k - 1]);
  return right - left;
}

CsvTable HamiltonianCurve::to_csv() const {
  CsvTable t({"p", "value", "err"});
  for (std::size_t k = 0; k < p.size(); ++k) t.add_row({csv_number(p[k]), csv_number(values[k]), csv_number(errors[k])});
  return t;
}

HamiltonianCurve build_curve(const ModelParams& params, const std::vector<double>& p, HamiltonianMethod method,
                             const CurveOptions& options) {
  const std::size_t n = p.size();
  if (n == 0) throw ValidationError("p grid is empty");
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(p[k] < p[k + 1])) throw ValidationError("p grid must be strictly increasing");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(p[k] + p[n - 1 - k]) > 1e-12 * std::max(1.0, std::abs(p[k])))
      throw ValidationError("p grid must be symmetric about 0");
  }
  if (std::find(p.begin(), p.end(), 0.0) == p.end()) throw ValidationError("p grid must contain 0");

  HamiltonianCurve c;
  c.p = p;
  c.values.assign(n, 0.0);
  c.errors.assign(n, 0.0);
  c.method = method;

  switch (method) {
    case HamiltonianMethod::Eigen: {
      parallel_chunks(n, 1, worker_count(options.mc.threads), [&](std::size_t, std::size_t k, std::size_t) {
        const EigenEstimate e = hbar0_eigen(params, p[k], options.grid);
        c.values[k] = e.value;
        c.errors[k] = e.error;
      });
      break;
    }
    case HamiltonianMethod::MonteCarlo: {
      HamiltonianMcOptions mo = options.mc_options;
      mo.girsanov_pair = false;
      if (mo.grid == GridSpec{}) mo.grid = options.grid;
      for (std::size_t k = 0; k < n; ++k) {
        const HamiltonianMc e = hbar0_mc(params, p[k], options.mc, mo);
        c.values[k] = e.estimate.value;
        c.errors[k] = e.estimate.se;
      }
      c.seed = options.mc.seed;
      break;
    }
    case HamiltonianMethod::ClosedForm: {
      const QuadratureValue sb = sigma_bar_sq_estimate(params, options.grid);
      for (std::size_t k = 0; k < n; ++k) {
        c.values[k] = 0.5 * sb.value * p[k] * p[k];
        c.errors[k] = 0.5 * sb.error * p[k] * p[k];
      }
      break;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (p[k] == 0.0) {
      c.values[k] = 0.0;
      c.errors[k] = 0.0;
    }
  }

  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double defect = convexity_defect(p, c.values, k);
    if (defect >= -options.convexity_tolerance) continue;
    const double violation = -defect;
    c.convexity_violation = std::max(c.convexity_violation, violation);
    c.flagged.push_back(k);
    const double dl = p[k] - p[k - 1];
    const double dr = p[k + 1] - p[k];
    const double err = c.errors[k - 1] / dl + c.errors[k] * (1.0 / dl + 1.0 / dr) + c.errors[k + 1] / dr;
    if (violation > 3.0 * err) {
      throw ConvexityError(fmt::format("H is not convex at p = {}: slope drop {:.3g} exceeds 3x its error {:.3g}",
                                       p[k], violation, err));
    }
  }
  return c;
}

const char* flag_name(LegendreFlag f) noexcept {
  return f == LegendreFlag::Interior ? "interior" : "extrapolated";
}

LegendreCurve::LegendreCurve(const std::vector<double>& p, const std::vector<double>& values,
                             std::optional<std::vector<double>> q) {
  const std::size_t n = p.size();
  if (n < 2 || values.size() != n) throw ValidationError("Legendre transform needs at least two (p, H) points");
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(p[k] < p[k + 1])) throw ValidationError("p grid must be strictly increasing");
  }
  // Lower convex hull by the monotone chain.
  for (std::size_t k = 0; k < n; ++k) {
    while (hull_p_.size() >= 2) {
      const std::size_t m = hull_p_.size();
      const double x1 = hull_p_[m - 2], y1 = hull_h_[m - 2];
      const double x2 = hull_p_[m - 1], y2 = hull_h_[m - 1];
      const double cross = (x2 - x1) * (values[k] - y1) - (y2 - y1) * (p[k] - x1);
      if (cross <= 0.0) {
        hull_p_.pop_back();
        hull_h_.pop_back();
      } else {
        break;
      }
    }
    hull_p_.push_back(p[k]);
    hull_h_.push_back(values[k]);
  }
  const std::size_t m = hull_p_.size();
  matched_q_.resize(m);
  auto secant = [&](std::size_t j) { return (hull_h_[j + 1] - hull_h_[j]) / (hull_p_[j + 1] - hull_p_[j]); };
  curvature_.assign(m, 0.0);
  if (m == 2) {
    matched_q_.assign(2, secant(0));
  } else {
    const std::size_t width = std::min<std::size_t>(5, m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t start = std::min(j >= width / 2 ? j - width / 2 : 0, m - width);
      const std::span<const double> xs(hull_p_.data() + start, width);
      double d = 0.0, e = 0.0;
      const double h = hull_p_[start + 1] - hull_p_[start];
      bool uniform = width == 5 && start + 2 == j;
      for (std::size_t i = 1; uniform && i < width; ++i)
        uniform = std::abs(xs[i] - xs[i - 1] - h) <= 1e-12 * std::abs(h);
      if (uniform) {
        d = (8.0 * (hull_h_[j + 1] - hull_h_[j - 1]) - (hull_h_[j + 2] - hull_h_[j - 2])) / (12.0 * h);
        e = (16.0 * (hull_h_[j + 1] + hull_h_[j - 1] - 2.0 * hull_h_[j]) -
             (hull_h_[j + 2] + hull_h_[j - 2] - 2.0 * hull_h_[j])) /
            (12.0 * h * h);
      } else {
        const auto w = fd_weights(hull_p_[j], xs, 2);
        for (std::size_t i = 0; i < width; ++i) {
          d += w[1][i] * (hull_h_[start + i] - hull_h_[j]);
          e += w[2][i] * (hull_h_[start + i] - hull_h_[j]);
        }
      }
      if (j > 0) d = std::max(d, secant(j - 1));
      if (j + 1 < m) d = std::min(d, secant(j));
      matched_q_[j] = d;
      curvature_[j] = std::max(e, 0.0);
    }
  }

  q_ = q ? std::move(*q) : matched_q_;
  values_.resize(q_.size());
  flags_.resize(q_.size());
  bracket_lo_.resize(q_.size());
  bracket_hi_.resize(q_.size());
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const double qi = q_[i];
    flags_[i] = classify(qi);
    values_[i] = q ? evaluate(qi, true) : hull_p_[i] * qi - hull_h_[i];
    const std::size_t k = argmax_vertex(qi);
    const double best = hull_p_[k] * qi - hull_h_[k];
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    std::size_t a = k, b = k;
    while (a > 0 && hull_p_[a - 1] * qi - hull_h_[a - 1] >= best - tol) --a;
    while (b + 1 < m && hull_p_[b + 1] * qi - hull_h_[b + 1] >= best - tol) ++b;
    bracket_lo_[i] = hull_p_[a];
    bracket_hi_[i] = hull_p_[b];
  }
}

LegendreFlag LegendreCurve::classify(double q) const noexcept {
  return q < q_min() || q > q_max() ? LegendreFlag::Extrapolated : LegendreFlag::Interior;
}

std::size_t LegendreCurve::argmax_vertex(double q) const noexcept {
  // Vertex values p_j q - H_j are unimodal in j on a convex hull.
  std::size_t best = 0;
  double v = hull_p_[0] * q - hull_h_[0];
  for (std::size_t j = 1; j < hull_p_.size(); ++j) {
    const double w = hull_p_[j] * q - hull_h_[j];
    if (w > v) {
      v = w;
      best = j;
    }
  }
  return best;
}

double LegendreCurve::evaluate_vertex(double q) const {
  const std::size_t k = argmax_vertex(q);
  return hull_p_[k] * q - hull_h_[k];
}

double LegendreCurve::evaluate(double q, bool allow_extrapolation) const {
  if (!std::isfinite(q)) throw RangeError("q must be finite");
  if (!allow_extrapolation && classify(q) == LegendreFlag::Extrapolated) {
    throw RangeError(fmt::format("q = {} outside the attainable slope range [{}, {}]", q, q_min(), q_max()));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hull_p_.size(); ++k) best = std::max(best, hull_p_[k] * q - hull_h_[k]);
  // Quintic Hermite piece on [0, h] matching value, slope and curvature at both ends; the
  // maximizer solves P'(s) = q, bracketed by the end slopes.
  for (std::size_t k = 0; k + 1 < hull_p_.size(); ++k) {
    const double d0 = matched_q_[k], d1 = matched_q_[k + 1];
    if (!(q > d0 && q < d1)) continue;
    const double h = hull_p_[k + 1] - hull_p_[k];
    const double a0 = hull_h_[k], a1 = d0, a2 = 0.5 * curvature_[k];
    const double r0 = hull_h_[k + 1] - (a0 + h * (a1 + h * a2));
    const double r1 = d1 - (a1 + 2.0 * a2 * h);
    const double r2 = curvature_[k + 1] - 2.0 * a2;
    const double a3 = (20.0 * r0 - 8.0 * r1 * h + r2 * h * h) / (2.0 * h * h * h);
    const double a4 = (-30.0 * r0 + 14.0 * r1 * h - 2.0 * r2 * h * h) / (2.0 * h * h * h * h);
    const double a5 = (12.0 * r0 - 6.0 * r1 * h + r2 * h * h) / (2.0 * h * h * h * h * h);
    auto slope = [&](double x) { return a1 + x * (2.0 * a2 + x * (3.0 * a3 + x * (4.0 * a4 + x * 5.0 * a5))); };
    auto curv = [&](double x) { return 2.0 * a2 + x * (6.0 * a3 + x * (12.0 * a4 + x * 20.0 * a5)); };
    double lo = 0.0, hi = h, x = h * (q - d0) / (d1 - d0);
    for (int it = 0; it < 100 && hi - lo > 1e-15 * h; ++it) {
      const double f = slope(x) - q;
      if (f == 0.0) break;
      (f < 0.0 ? lo : hi) = x;
      const double c = curv(x);
      const double next = c > 0.0 ? x - f / c : 0.5 * (lo + hi);
      x = next > lo && next < hi ? next : 0.5 * (lo + hi);
    }
    const double value = q * (hull_p_[k] + x) - (a0 + x * (a1 + x * (a2 + x * (a3 + x * (a4 + x * a5)))));
    best = std::max(best, value);
  }
  return best;
}

double LegendreCurve::biconjugate(double p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q_.size(); ++i) best = std::max(best, p * q_[i] - values_[i]);
  return best;
}

double LegendreCurve::hull_at(double p) const {
  if (p <= hull_p_.front()) return hull_h_.front();
  if (p >= hull_p_.back()) return hull_h_.back();
  const auto it = std::upper_bound(hull_p_.begin(), hull_p_.end(), p);
  const std::size_t j = static_cast<std::size_t>(it - hull_p_.begin()) - 1;
  const double w = (p - hull_p_[j]) / (hull_p_[j + 1] - hull_p_[j]);
  return (1.0 - w) * hull_h_[j] + w * hull_h_[j + 1];
}

CsvTable LegendreCurve::to_csv() const {
  CsvTable t({"q", "value", "flag"});
  for (std::size_t i = 0; i < q_.size(); ++i) t.add_row({csv_number(q_[i]), csv_number(values_[i]), flag_name(flags_[i])});
  return t;
}

LegendreCurve legendre(const HamiltonianCurve& curve, std::optional<std::vector<double>> q) {
  return LegendreCurve(curve.p, curve.values, std::move(q));
}

std::vector<double> symmetric_grid(double p_max, std::size_t n_side) {
  if (!(p_max > 0.0) || n_side == 0) throw ValidationError("symmetric grid needs p_max > 0 and n_side >= 1");
  std::vector<double> p(2 * n_side + 1);
  for (std::size_t k = 0; k <= 2 * n_side; ++k) {
    const double j = static_cast<double>(k) - static_cast<double>(n_side);
    p[k] = p_max * j / static_cast<double>(n_side);
  }
  p[n_side] = 0.0;
  return p;
}

}  // namespace svasym
