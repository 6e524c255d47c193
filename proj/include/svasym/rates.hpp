#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/hamiltonian.hpp"
#include "svasym/model.hpp"

namespace svasym {

/// |x0 - x|^2 / (2 sigma_bar^2 t).
double rate_i4(double x, double x0, double t, double sigma_bar_sq);

/// t L((x0 - x) / t) from a Legendre curve.
double rate_i2(double x, double x0, double t, const LegendreCurve& legendre, bool allow_extrapolation = true);

/// Rate function of one regime with its ingredients.
class RateFunction {
 public:
  static RateFunction ultra_fast(double x0, double t, double sigma_bar_sq);
  static RateFunction fast(double x0, double t, std::shared_ptr<const LegendreCurve> legendre, double sigma_bar_sq);

  Regime regime() const noexcept { return regime_; }
  double x0() const noexcept { return x0_; }
  double t() const noexcept { return t_; }
  double sigma_bar_sq() const noexcept { return sigma_bar_sq_; }
  const LegendreCurve* legendre() const noexcept { return legendre_.get(); }
  bool allow_extrapolation() const noexcept { return allow_extrapolation_; }
  void set_allow_extrapolation(bool on) noexcept { allow_extrapolation_ = on; }

  double operator()(double x) const { return between(x0_, x); }
  /// Rate of reaching x from start in time t.
  double between(double start, double x) const;
  /// Whether (x0 - x) / t lies outside the Legendre slope range (never for the quadratic rate).
  bool extrapolated(double x) const noexcept;

 private:
  RateFunction(Regime r, double x0, double t, double sigma_bar_sq, std::shared_ptr<const LegendreCurve> l);
  Regime regime_;
  double x0_;
  double t_;
  double sigma_bar_sq_;
  std::shared_ptr<const LegendreCurve> legendre_;
  bool allow_extrapolation_ = true;
};

struct RateCurve {
  Regime regime{4};
  double x0 = 0.0;
  double t = 1.0;
  std::vector<double> x;
  std::vector<double> values;
  std::optional<double> sigma_bar_sq;
  std::shared_ptr<const LegendreCurve> legendre;

  /// (x, rate) rows.
  CsvTable to_csv() const;
  /// Largest negative scaled second difference (0 when convex).
  double convexity_violation() const;
};

RateCurve rate_curve(const RateFunction& rate, const std::vector<double>& x);

/// sup over x' of h(x') - I_r(x'; x, t), with h linear between table nodes.
struct LaxValue {
  double value = 0.0;
  double argmax = 0.0;
};
/// RangeError when the supremum sits on the first or last node.
LaxValue lax_solution(const std::vector<double>& x_table, const std::vector<double>& h, const RateFunction& rate,
                      double x);

enum class OptionSide { Call, Put };

struct PriceAsymptote {
  double log_k = 0.0;
  /// Limit of eps log of the out-of-the-money price: -I_r(log K).
  double value = 0.0;
  OptionSide side = OptionSide::Call;
  bool atm_warning = false;
};

/// Calls for log K > x0, puts below; ATMWarning when |log K - x0| < resolution.
PriceAsymptote option_price_log_asymptote(double log_k, const RateFunction& rate, double resolution);

struct SmileCurve {
  Regime regime{4};
  std::vector<double> log_k;
  std::vector<double> implied_var;
  /// Points inside the ATM band, filled with sigma_bar^2.
  std::vector<bool> atm;
  double atm_value = 0.0;

  /// (logK, implied_var, regime) rows.
  CsvTable to_csv() const;
};

/// (log K - x0)^2 / (2 I_r(log K) t); the ATM band |log K - x0| < resolution holds sigma_bar^2.
SmileCurve implied_vol_curve(const RateFunction& rate, const std::vector<double>& log_k, double resolution);

/// Numerical probe of the regime-2 ATM limit; never a pass/fail criterion.
struct AtmProbe {
  std::vector<double> z;
  std::vector<double> value;
  double sigma_bar_sq = 0.0;
  /// Distance to sigma_bar^2 shrinks along the sequence.
  bool trends_to_sigma_bar = false;
  std::string label = "CONJECTURE PROBE";

  CsvTable to_csv() const;
};

/// z must be nonzero and ordered toward 0. ResolutionError when the rate falls below
/// the noise floor of the Legendre curve.
AtmProbe atm_conjecture_probe(const RateFunction& rate, const std::vector<double>& z);

/// Tent-family check: sup over slopes a of inf_x' (a |x' - x| + I_r(x')), which never
/// exceeds I_r(x) and approaches it as a grows.
struct TentCheck {
  std::vector<double> slopes;
  std::vector<double> lower_bounds;
  double sup = 0.0;
  double rate = 0.0;
  bool bounded = false;
};
TentCheck tent_family_check(const RateFunction& rate, double x, const std::vector<double>& slopes,
                            const std::vector<double>& x_table);

}  // namespace svasym
