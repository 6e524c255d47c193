#pragma once

#include <cstdint>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/model.hpp"
#include "svasym/rates.hpp"
#include "svasym/simulate.hpp"

namespace svasym {

struct LdpPoint {
  double eps = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t paths = 0;
  double probability = 0.0;
  /// Wilson 95% interval on the probability.
  double p_lo = 0.0;
  double p_hi = 0.0;
  /// eps log P and its interval (-inf when there are no hits).
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool undersampled = false;
  std::uint64_t seed = 0;
};

struct LdpReport {
  Regime regime{4};
  double x = 0.0;
  double x0 = 0.0;
  double t = 1.0;
  /// True for P(X > x), false for P(X < x).
  bool upper_tail = true;
  std::vector<LdpPoint> points;
  /// -I_r(x).
  double predicted = 0.0;
  /// Distance to the prediction shrinks at every step.
  bool monotone_trend = false;
  /// Spearman correlation of the estimates against eps.
  double spearman = 0.0;
  bool final_within = false;
  /// max(0.15 |I_r|, final CI width).
  double final_tolerance = 0.0;
  bool pass = false;

  /// (eps, hits, paths, probability, p_lo, p_hi, eps_log_p, ci_lo, ci_hi, predicted, flag) rows.
  CsvTable to_csv() const;
};

/// Plain Monte Carlo tail estimates along a strictly decreasing eps sequence; the
/// k-th point uses the seed derived from (mc.seed, k).
LdpReport ldp_tail(const ModelParams& params, const RateFunction& rate, double x, const std::vector<double>& eps,
                   const McConfig& mc);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};
WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct RegimeRow {
  double x = 0.0;
  double i2 = 0.0;
  double i4 = 0.0;
  bool ordered = true;
};

struct RegimeComparison {
  std::vector<RegimeRow> rows;
  /// Only meaningful when the correlation is zero.
  bool checked = false;
  bool all_ordered = true;

  /// (x, I2, I4, I2_le_I4) rows.
  CsvTable to_csv() const;
};

/// Side-by-side rates; with rho = 0 flags any I2 > I4 + tol (relative to max(1, I4)).
RegimeComparison regime_compare(const ModelParams& params, const RateFunction& i2, const RateFunction& i4,
                                const std::vector<double>& x, double tol = 1e-8);

}  // namespace svasym
