#include "svasym/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

namespace {

constexpr std::uint64_t kMinHits = 50;

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {hits == 0 ? 0.0 : std::max(0.0, center - half), hits == n ? 1.0 : std::min(1.0, center + half)};
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("Spearman needs two equal-length samples");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

CsvTable LdpReport::to_csv() const {
  CsvTable t({"eps", "hits", "paths", "probability", "p_lo", "p_hi", "eps_log_p", "ci_lo", "ci_hi", "predicted",
              "flag"});
  for (const auto& p : points) {
    t.add_row({csv_number(p.eps), std::to_string(p.hits), std::to_string(p.paths), csv_number(p.probability),
               csv_number(p.p_lo), csv_number(p.p_hi), csv_number(p.estimate), csv_number(p.ci_lo),
               csv_number(p.ci_hi), csv_number(predicted), p.undersampled ? "UNDERSAMPLED" : "ok"});
  }
  return t;
}

LdpReport ldp_tail(const ModelParams& params, const RateFunction& rate, double x, const std::vector<double>& eps,
                   const McConfig& mc) {
  if (eps.empty()) throw ValidationError("eps sequence is empty");
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    if (!(eps[k] > eps[k + 1])) throw ValidationError("eps sequence must be strictly decreasing");
  }
  if (x == params.x0) throw ValidationError("tail level must differ from x0");
  if (rate.x0() != params.x0) throw ValidationError("rate function and model disagree on x0");

  LdpReport r;
  r.regime = rate.regime();
  r.x = x;
  r.x0 = params.x0;
  r.t = rate.t();
  r.upper_tail = x > params.x0;
  r.predicted = -rate(x);

  for (std::size_t k = 0; k < eps.size(); ++k) {
    McConfig c = mc;
    c.seed = derive_seed(mc.seed, k);
    const PathBatch b = simulate_xy(params, rate.regime(), eps[k], rate.t(), c);
    LdpPoint pt;
    pt.eps = eps[k];
    pt.seed = c.seed;
    pt.paths = b.paths();
    for (double v : b.x_terminal) pt.hits += r.upper_tail ? (v > x) : (v < x);
    pt.probability = static_cast<double>(pt.hits) / static_cast<double>(pt.paths);
    const WilsonInterval w = wilson_interval(pt.hits, pt.paths);
    pt.p_lo = w.lo;
    pt.p_hi = w.hi;
    const double ninf = -std::numeric_limits<double>::infinity();
    pt.estimate = pt.hits ? eps[k] * std::log(pt.probability) : ninf;
    pt.ci_lo = w.lo > 0.0 ? eps[k] * std::log(w.lo) : ninf;
    pt.ci_hi = eps[k] * std::log(w.hi);
    pt.undersampled = pt.hits < kMinHits;
    r.points.push_back(pt);
  }

  std::vector<double> est, e;
  r.monotone_trend = true;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    est.push_back(r.points[k].estimate);
    e.push_back(r.points[k].eps);
    if (k > 0) {
      const double prev = std::abs(r.points[k - 1].estimate - r.predicted);
      const double cur = std::abs(r.points[k].estimate - r.predicted);
      if (!(cur < prev)) r.monotone_trend = false;
    }
  }
  if (r.points.size() >= 2) r.spearman = spearman(e, est);
  const LdpPoint& last = r.points.back();
  r.final_tolerance = std::max(0.15 * std::abs(r.predicted), last.ci_hi - last.ci_lo);
  r.final_within = std::abs(last.estimate - r.predicted) <= r.final_tolerance;
  r.pass = r.monotone_trend && r.final_within;
  return r;
}

CsvTable RegimeComparison::to_csv() const {
  CsvTable t({"x", "I2", "I4", "I2_le_I4"});
  for (const auto& row : rows) {
    t.add_row({csv_number(row.x), csv_number(row.i2), csv_number(row.i4), checked ? (row.ordered ? "1" : "0") : ""});
  }
  return t;
}

RegimeComparison regime_compare(const ModelParams& params, const RateFunction& i2, const RateFunction& i4,
                                const std::vector<double>& x, double tol) {
  if (i2.regime().exponent() != 2 || i4.regime().exponent() != 4)
    throw ValidationError("regime_compare needs a regime-2 and a regime-4 rate function");
  RegimeComparison c;
  c.checked = params.rho == 0.0;
  for (double xi : x) {
    RegimeRow row{xi, i2(xi), i4(xi), true};
    if (c.checked) row.ordered = row.i2 <= row.i4 + tol * std::max(1.0, row.i4);
    c.all_ordered = c.all_ordered && row.ordered;
    c.rows.push_back(row);
  }
  return c;
}

}  // namespace svasym
