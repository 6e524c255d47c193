#include <doctest.h>

#include <cmath>
#include <memory>

#include "svasym/acceptance.hpp"
#include "svasym/errors.hpp"
#include "svasym/measures.hpp"
#include "svasym/rates.hpp"

using namespace svasym;

namespace {

std::shared_ptr<const LegendreCurve> ou_legendre() {
  static const auto l = std::make_shared<const LegendreCurve>(
      legendre(build_curve(ou_fixture(), symmetric_grid(4.0, 16), HamiltonianMethod::Eigen)));
  return l;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

TEST_CASE("quadratic rate") {
  CHECK(rate_i4(0.1, 0.0, 1.0, 0.04) == doctest::Approx(0.125));
  CHECK(rate_i4(0.3, 0.3, 1.0, 0.04) == 0.0);
  CHECK(rate_i4(0.2, 0.0, 2.0, 0.04) == doctest::Approx(rate_i4(0.2, 0.0, 1.0, 0.04) / 2.0));
  CHECK_THROWS_AS(rate_i4(0.1, 0.0, 0.0, 0.04), ValidationError);
}

TEST_CASE("fast-regime rate") {
  const auto l = ou_legendre();
  const double sb = sigma_bar_sq(ou_fixture());
  const RateFunction i2 = RateFunction::fast(0.0, 1.0, l, sb);
  const RateFunction i4 = RateFunction::ultra_fast(0.0, 1.0, sb);
  CHECK(i2(0.0) == 0.0);
  for (double x : linspace(-0.8, 0.8, 33)) {
    CHECK(i2(x) <= i4(x) + 1e-10);
    CHECK(i2(x) == doctest::Approx(rate_i2(x, 0.0, 1.0, *l)));
  }
  const RateFunction i2t = RateFunction::fast(0.0, 2.0, l, sb);
  CHECK(i2t(0.4) == doctest::Approx(2.0 * l->evaluate(-0.2)));
}

TEST_CASE("rate curves are convex with minimum zero at x0") {
  const double sb = sigma_bar_sq(ou_fixture());
  const auto x = linspace(-0.5, 0.7, 121);
  for (const RateFunction& r : {RateFunction::ultra_fast(0.1, 1.0, sb), RateFunction::fast(0.1, 1.0, ou_legendre(), sb)}) {
    const RateCurve c = rate_curve(r, x);
    CHECK(c.convexity_violation() < 1e-8);
    const std::size_t i0 = 60;
    CHECK(c.values[i0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    for (std::size_t i = i0; i + 1 < x.size(); ++i) CHECK(c.values[i + 1] >= c.values[i]);
    for (std::size_t i = 1; i <= i0; ++i) CHECK(c.values[i - 1] >= c.values[i]);
    CHECK(c.to_csv().header() == std::vector<std::string>{"x", "rate"});
  }
}

TEST_CASE("extrapolation can be disabled") {
  RateFunction r = RateFunction::fast(0.0, 1.0, ou_legendre(), 0.8);
  const double far = 1e3;
  CHECK(r.extrapolated(far));
  CHECK_NOTHROW(r(far));
  r.set_allow_extrapolation(false);
  CHECK_THROWS_AS(r(far), RangeError);
}

TEST_CASE("Lax formula") {
  const double sb = 0.04;
  const RateFunction i4 = RateFunction::ultra_fast(0.0, 1.0, sb);
  const auto table = linspace(-3.0, 3.0, 6001);

  std::vector<double> h(table.size(), 0.7);
  CHECK(lax_solution(table, h, i4, 0.2).value == doctest::Approx(0.7));

  const RateFunction tiny = RateFunction::ultra_fast(0.0, 0.001, sb);
  for (std::size_t i = 0; i < table.size(); ++i) h[i] = std::sin(table[i]);
  CHECK(std::abs(lax_solution(table, h, tiny, 0.4).value - std::sin(0.4)) < 0.01);

  // Tent payoff: the envelope is quadratic near the kink and linear beyond s t.
  const double a = 0.3, st = sb * 1.0;
  for (std::size_t i = 0; i < table.size(); ++i) h[i] = -std::abs(table[i] - a);
  for (double x : {0.3, 0.31, 0.33, 0.5, -0.2}) {
    const double d = std::abs(x - a);
    const double exact = d > st ? -d + st / 2.0 : -d * d / (2.0 * st);
    CHECK(lax_solution(table, h, i4, x).value == doctest::Approx(exact).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("Lax formula with a linear payoff reproduces the Hamiltonian") {
  const auto l = ou_legendre();
  const double sb = sigma_bar_sq(ou_fixture());
  const RateFunction i2 = RateFunction::fast(0.0, 1.0, l, sb);
  const RateFunction i4 = RateFunction::ultra_fast(0.0, 1.0, sb);
  const auto table = linspace(-3.0, 3.0, 6001);
  for (double p : {0.5, 1.0}) {
    std::vector<double> h(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) h[i] = p * table[i];
    const double H = hbar0_eigen(ou_fixture(), p).value;
    for (double x : {-0.2, 0.1}) {
      CHECK(lax_solution(table, h, i2, x).value == doctest::Approx(p * x + H).epsilon(1e-4).scale(1.0));
      CHECK(lax_solution(table, h, i4, x).value == doctest::Approx(p * x + 0.5 * sb * p * p).epsilon(1e-6));
    }
  }
}

TEST_CASE("Lax supremum on the table edge is rejected") {
  const RateFunction i4 = RateFunction::ultra_fast(0.0, 1.0, 0.04);
  const auto table = linspace(-0.1, 0.1, 21);
  std::vector<double> h(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) h[i] = 10.0 * table[i];
  CHECK_THROWS_AS(lax_solution(table, h, i4, 0.0), RangeError);
}

TEST_CASE("option price asymptote") {
  const RateFunction i4 = RateFunction::ultra_fast(0.0, 1.0, 0.04);
  const PriceAsymptote c = option_price_log_asymptote(0.1, i4, 0.01);
  CHECK(c.value == doctest::Approx(-0.125));
  CHECK(c.side == OptionSide::Call);
  CHECK_FALSE(c.atm_warning);
  const PriceAsymptote p = option_price_log_asymptote(-0.1, i4, 0.01);
  CHECK(p.side == OptionSide::Put);
  CHECK(p.value == doctest::Approx(-0.125));
  const PriceAsymptote atm = option_price_log_asymptote(0.001, i4, 0.01);
  CHECK(atm.atm_warning);
  CHECK(atm.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-4));

  const RateFunction i2 = RateFunction::fast(0.0, 1.0, ou_legendre(), 0.8);
  CHECK(option_price_log_asymptote(0.3, i2, 0.01).value == doctest::Approx(-ou_legendre()->evaluate(-0.3)));
}

TEST_CASE("implied volatility smiles") {
  const double sb = sigma_bar_sq(ou_fixture());
  const auto k = linspace(-0.5, 0.5, 101);
  const SmileCurve s4 = implied_vol_curve(RateFunction::ultra_fast(0.0, 1.0, sb), k, 0.005);
  for (double v : s4.implied_var) CHECK(v == doctest::Approx(sb).epsilon(1e-14));
  const SmileCurve s2 = implied_vol_curve(RateFunction::fast(0.0, 1.0, ou_legendre(), sb), k, 0.005);
  for (std::size_t i = 0; i < k.size(); ++i) {
    CHECK(s2.implied_var[i] >= sb - 1e-10);
    CHECK(s2.implied_var[i] > 0.0);
  }
  CHECK(s2.atm[50]);
  CHECK(s2.implied_var[50] == sb);
  CHECK(s2.to_csv().header() == std::vector<std::string>{"logK", "implied_var", "regime"});
  CHECK(s2.to_csv().rows()[0][2] == "2");
}

TEST_CASE("ATM probe") {
  ModelParams c = ou_fixture();
  c.sigma = VolFnSpec::constant(0.2);
  const auto lc = std::make_shared<const LegendreCurve>(
      legendre(build_curve(c, symmetric_grid(4.0, 16), HamiltonianMethod::Eigen)));
  const AtmProbe flat = atm_conjecture_probe(RateFunction::fast(0.0, 1.0, lc, 0.04), {0.1, 0.01, 0.001});
  for (double v : flat.value) CHECK(v == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(flat.label == "CONJECTURE PROBE");
  const RateFunction i2 = RateFunction::fast(0.0, 1.0, ou_legendre(), sigma_bar_sq(ou_fixture()));
  CHECK_NOTHROW(atm_conjecture_probe(i2, {0.2, 0.1, 0.05}));
  CHECK_THROWS_AS(atm_conjecture_probe(i2, {1e-9}), ResolutionError);
}

TEST_CASE("tent family bounds the rate from below and closes the gap") {
  const double sb = sigma_bar_sq(ou_fixture());
  const auto table = linspace(-2.0, 2.0, 4001);
  for (const RateFunction& r : {RateFunction::ultra_fast(0.0, 1.0, sb), RateFunction::fast(0.0, 1.0, ou_legendre(), sb)}) {
    const TentCheck t = tent_family_check(r, 0.3, {0.1, 1.0, 10.0, 100.0}, table);
    CHECK(t.bounded);
    CHECK(t.sup == doctest::Approx(t.rate).epsilon(1e-6));
    CHECK(t.lower_bounds.front() < t.rate);
  }
}
