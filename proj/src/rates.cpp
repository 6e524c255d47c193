#include "svasym/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

double rate_i4(double x, double x0, double t, double sigma_bar_sq) {
  if (!(t > 0.0)) throw ValidationError("t must be positive");
  if (!(sigma_bar_sq > 0.0)) throw ValidationError("sigma_bar^2 must be positive");
  const double d = x0 - x;
  return d * d / (2.0 * sigma_bar_sq * t);
}

double rate_i2(double x, double x0, double t, const LegendreCurve& legendre, bool allow_extrapolation) {
  if (!(t > 0.0)) throw ValidationError("t must be positive");
  return t * legendre.evaluate((x0 - x) / t, allow_extrapolation);
}

RateFunction::RateFunction(Regime r, double x0, double t, double sigma_bar_sq,
                           std::shared_ptr<const LegendreCurve> l)
    : regime_(r), x0_(x0), t_(t), sigma_bar_sq_(sigma_bar_sq), legendre_(std::move(l)) {
  if (!(t > 0.0)) throw ValidationError("t must be positive");
  if (!std::isfinite(x0)) throw ValidationError("x0 must be finite");
}

RateFunction RateFunction::ultra_fast(double x0, double t, double sigma_bar_sq) {
  if (!(sigma_bar_sq > 0.0)) throw ValidationError("sigma_bar^2 must be positive");
  return RateFunction(Regime(4), x0, t, sigma_bar_sq, nullptr);
}

RateFunction RateFunction::fast(double x0, double t, std::shared_ptr<const LegendreCurve> legendre,
                                double sigma_bar_sq) {
  if (!legendre) throw ValidationError("the fast regime needs a Legendre curve");
  return RateFunction(Regime(2), x0, t, sigma_bar_sq, std::move(legendre));
}

double RateFunction::between(double start, double x) const {
  if (regime_.exponent() == 4) return rate_i4(x, start, t_, sigma_bar_sq_);
  return rate_i2(x, start, t_, *legendre_, allow_extrapolation_);
}

bool RateFunction::extrapolated(double x) const noexcept {
  if (!legendre_) return false;
  return legendre_->classify((x0_ - x) / t_) == LegendreFlag::Extrapolated;
}

CsvTable RateCurve::to_csv() const {
  CsvTable t({"x", "rate"});
  for (std::size_t i = 0; i < x.size(); ++i) t.add_row({csv_number(x[i]), csv_number(values[i])});
  return t;
}

double RateCurve::convexity_violation() const {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < x.size(); ++k) worst = std::max(worst, -convexity_defect(x, values, k));
  return worst;
}

RateCurve rate_curve(const RateFunction& rate, const std::vector<double>& x) {
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    if (!(x[k] < x[k + 1])) throw ValidationError("x grid must be strictly increasing");
  }
  RateCurve c;
  c.regime = rate.regime();
  c.x0 = rate.x0();
  c.t = rate.t();
  c.x = x;
  c.values.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) c.values[k] = rate(x[k]);
  if (rate.regime().exponent() == 4) {
    c.sigma_bar_sq = rate.sigma_bar_sq();
  } else if (rate.legendre()) {
    c.legendre = std::make_shared<const LegendreCurve>(*rate.legendre());
  }
  return c;
}

LaxValue lax_solution(const std::vector<double>& x_table, const std::vector<double>& h, const RateFunction& rate,
                      double x) {
  const std::size_t n = x_table.size();
  if (n < 3 || h.size() != n) throw ValidationError("payoff table needs at least three nodes and matching values");
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double v = h[k] - rate.between(x, x_table[k]);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  if (best == 0 || best + 1 == n) {
    throw RangeError(fmt::format("Lax supremum at x = {} sits on the table edge x' = {}; widen the table", x,
                                 x_table[best]));
  }
  LaxValue out{best_v, x_table[best]};
  // Payoff interpolated linearly between nodes; the objective is concave on each segment.
  for (std::size_t k : {best - 1, best}) {
    const double a = x_table[k], b = x_table[k + 1];
    const double ha = h[k], hb = h[k + 1];
    auto negative = [&](double y) { return -(ha + (hb - ha) * (y - a) / (b - a) - rate.between(x, y)); };
    const auto [y, v] = boost::math::tools::brent_find_minima(negative, a, b, std::numeric_limits<double>::digits);
    if (-v > out.value) out = {-v, y};
  }
  return out;
}

PriceAsymptote option_price_log_asymptote(double log_k, const RateFunction& rate, double resolution) {
  PriceAsymptote out;
  out.log_k = log_k;
  out.side = log_k >= rate.x0() ? OptionSide::Call : OptionSide::Put;
  out.atm_warning = std::abs(log_k - rate.x0()) < resolution;
  out.value = -rate(log_k);
  return out;
}

CsvTable SmileCurve::to_csv() const {
  CsvTable t({"logK", "implied_var", "regime"});
  for (std::size_t i = 0; i < log_k.size(); ++i)
    t.add_row({csv_number(log_k[i]), csv_number(implied_var[i]), std::to_string(regime.exponent())});
  return t;
}

SmileCurve implied_vol_curve(const RateFunction& rate, const std::vector<double>& log_k, double resolution) {
  SmileCurve s;
  s.regime = rate.regime();
  s.log_k = log_k;
  s.atm_value = rate.sigma_bar_sq();
  s.implied_var.resize(log_k.size());
  s.atm.resize(log_k.size());
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    const double z = log_k[i] - rate.x0();
    if (std::abs(z) < resolution) {
      s.atm[i] = true;
      s.implied_var[i] = s.atm_value;
      continue;
    }
    const double I = rate(log_k[i]);
    if (!(I > 0.0)) throw ResolutionError(fmt::format("rate vanishes at log K = {} outside the ATM band", log_k[i]));
    s.implied_var[i] = z * z / (2.0 * I * rate.t());
  }
  return s;
}

CsvTable AtmProbe::to_csv() const {
  CsvTable t({"z", "value", "label"});
  for (std::size_t i = 0; i < z.size(); ++i) t.add_row({csv_number(z[i]), csv_number(value[i]), label});
  return t;
}

AtmProbe atm_conjecture_probe(const RateFunction& rate, const std::vector<double>& z) {
  if (z.empty()) throw ValidationError("probe needs at least one offset");
  AtmProbe out;
  out.sigma_bar_sq = rate.sigma_bar_sq();
  double floor = 0.0;
  if (const LegendreCurve* l = rate.legendre()) {
    double scale = 1.0;
    for (double v : l->hull_values()) scale = std::max(scale, std::abs(v));
    floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * rate.t();
  }
  for (double zi : z) {
    if (zi == 0.0) throw ValidationError("probe offsets must be nonzero");
    const double I = rate(rate.x0() + zi);
    if (!(I > floor)) {
      throw ResolutionError(fmt::format("rate {:.3g} at offset {} is below the noise floor {:.3g}", I, zi, floor));
    }
    out.z.push_back(zi);
    out.value.push_back(zi * zi / (2.0 * I * rate.t()));
  }
  const double first = std::abs(out.value.front() - out.sigma_bar_sq);
  const double last = std::abs(out.value.back() - out.sigma_bar_sq);
  out.trends_to_sigma_bar = last <= first;
  return out;
}

TentCheck tent_family_check(const RateFunction& rate, double x, const std::vector<double>& slopes,
                            const std::vector<double>& x_table) {
  if (x_table.empty()) throw ValidationError("tent check needs a table");
  TentCheck out;
  out.slopes = slopes;
  out.rate = rate(x);
  std::vector<double> I(x_table.size());
  for (std::size_t k = 0; k < x_table.size(); ++k) I[k] = rate(x_table[k]);
  out.sup = -std::numeric_limits<double>::infinity();
  for (double a : slopes) {
    // h(x') = -a |x' - x|; h(x) - u(t, x0) = inf_x' (a |x' - x| + I(x')).
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x_table.size(); ++k) inf = std::min(inf, a * std::abs(x_table[k] - x) + I[k]);
    inf = std::min(inf, out.rate);
    out.lower_bounds.push_back(inf);
    out.sup = std::max(out.sup, inf);
  }
  out.bounded = out.sup <= out.rate * (1.0 + 1e-12) + 1e-15;
  return out;
}

}  // namespace svasym
