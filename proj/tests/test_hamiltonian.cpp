#include <doctest.h>

#include <cmath>
#include <numbers>

#include "svasym/acceptance.hpp"
#include "svasym/errors.hpp"
#include "svasym/hamiltonian.hpp"

using namespace svasym;

namespace {

// Square-root factor with sigma^2 = y: affine exponent gives 1 - sqrt(1 - p^2).
ModelParams affine_square_root() {
  ModelParams p = cir_fixture();
  p.sigma = VolFnSpec::power_abs(1.0, 0.5);
  return p;
}

ModelParams constant(double s0, double rho) {
  ModelParams p = ou_fixture();
  p.sigma = VolFnSpec::constant(s0);
  p.rho = rho;
  return p;
}

}  // namespace

TEST_CASE("constant volatility gives the Black-Scholes Hamiltonian") {
  for (double rho : {-0.7, 0.0, 0.4}) {
    CHECK(hbar0_eigen(constant(0.3, rho), 2.0).value == doctest::Approx(0.18).epsilon(1e-14));
  }
  CHECK(hbar0_eigen(ou_fixture(), 0.0).value == 0.0);
}

TEST_CASE("eigenvalue matches the affine closed form") {
  const ModelParams p = affine_square_root();
  for (double m : {0.3, 0.5, 0.8}) {
    const EigenEstimate e = hbar0_eigen(p, m);
    const double exact = 1.0 - std::sqrt(1.0 - m * m);
    CHECK(e.value == doctest::Approx(exact).epsilon(1e-5));
    CHECK(std::abs(e.value - exact) <= 10.0 * e.error + 1e-9);
  }
}

TEST_CASE("OU eigenvalue dominates the averaged quadratic and is symmetric") {
  const ModelParams ou = ou_fixture();
  const double sb = std::sqrt(2.0 / std::numbers::pi);
  const double h1 = hbar0_eigen(ou, 1.0).value;
  CHECK(h1 >= 0.5 * sb);
  CHECK(hbar0_eigen(ou, -1.0).value == doctest::Approx(h1).epsilon(1e-12));
  CHECK(hbar0_eigen(ou, 0.5).value < h1);
  CHECK(h1 < hbar0_eigen(ou, 1.5).value);
}

TEST_CASE("enlarging the window never lowers the discrete eigenvalue") {
  const ModelParams ou = ou_fixture();
  const Grid small = Grid::uniform(-3.0, 3.0, 601);
  const Grid large = Grid::uniform(-6.0, 6.0, 1201);
  for (double p : {0.5, 1.0, 2.0}) CHECK(hbar0_eigen_on_grid(ou, p, large) >= hbar0_eigen_on_grid(ou, p, small));
}

TEST_CASE("a fixed window that cuts the eigenfunction is rejected") {
  GridSpec g;
  g.lo = -0.5;
  g.hi = 0.5;
  CHECK_THROWS_AS(hbar0_eigen(ou_fixture(), 2.0, g), TruncationError);
}

TEST_CASE("curve construction") {
  const std::vector<double> p = symmetric_grid(2.0, 8);
  const HamiltonianCurve c = build_curve(constant(0.3, 0.2), p, HamiltonianMethod::Eigen);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(c.values[k] == doctest::Approx(0.045 * p[k] * p[k]).epsilon(1e-14));
  const HamiltonianCurve ou = build_curve(ou_fixture(), p, HamiltonianMethod::Eigen);
  CHECK(ou.values[8] == 0.0);
  CHECK(ou.convexity_violation < 1e-8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(ou.values[k] == doctest::Approx(ou.values[16 - k]).epsilon(1e-12));
    CHECK(ou.values[k] > ou.values[k + 1]);
  }
  const HamiltonianCurve cf = build_curve(ou_fixture(), p, HamiltonianMethod::ClosedForm);
  CHECK(cf.values[16] == doctest::Approx(0.5 * std::sqrt(2.0 / std::numbers::pi) * 4.0));
  CHECK_THROWS_AS(build_curve(ou_fixture(), {-1.0, 0.0, 2.0}, HamiltonianMethod::Eigen), ValidationError);
  CHECK_THROWS_AS(build_curve(ou_fixture(), {-1.0, 1.0}, HamiltonianMethod::Eigen), ValidationError);
  CHECK(c.to_csv().header() == std::vector<std::string>{"p", "value", "err"});
}

TEST_CASE("convexity defect") {
  const std::vector<double> p = {-1.0, 0.0, 1.0};
  CHECK(convexity_defect(p, {1.0, 0.0, 1.0}, 1) > 0.0);
  CHECK(convexity_defect(p, {-1.0, 0.0, -1.0}, 1) < 0.0);
}

TEST_CASE("Monte Carlo Hamiltonian") {
  McConfig mc;
  mc.paths = 10000;
  mc.seed = 7;
  const HamiltonianMc c = hbar0_mc(constant(0.3, 0.0), 2.0, mc);
  CHECK(c.estimate.value == doctest::Approx(0.18).epsilon(1e-12));
  const HamiltonianMc z = hbar0_mc(ou_fixture(), 0.0, mc);
  CHECK(z.estimate.value == 0.0);
  CHECK(z.estimate.se == 0.0);

  const HamiltonianMc m = hbar0_mc(ou_fixture(), 0.5, mc);
  const double eig = hbar0_eigen(ou_fixture(), 0.5).value;
  CHECK(std::abs(m.estimate.value - eig) <= 2.0 * m.estimate.se + 0.02);
  REQUIRE(m.girsanov.has_value());
  CHECK(std::abs(m.girsanov->value - eig) <= 3.0 * m.girsanov->se + 0.02);
  CHECK(m.estimate.seed == 7);

  mc.paths = 100;
  CHECK_THROWS_AS(hbar0_mc(ou_fixture(), 0.5, mc), ValidationError);
  mc.paths = 10000;
  HamiltonianMcOptions shortT;
  shortT.horizon = 5.0;
  CHECK_THROWS_AS(hbar0_mc(ou_fixture(), 0.5, mc, shortT), ValidationError);
}

TEST_CASE("heavy-tailed Girsanov estimate raises a variance warning") {
  McConfig mc;
  mc.paths = 10000;
  const HamiltonianMc m = hbar0_mc(ou_fixture(), 2.0, mc);
  REQUIRE(m.girsanov.has_value());
  CHECK(m.girsanov->has_warning("VarianceWarning"));
}

TEST_CASE("Legendre transform of a parabola") {
  const std::vector<double> p = symmetric_grid(4.0, 40);
  std::vector<double> h(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) h[k] = 0.045 * p[k] * p[k];
  const LegendreCurve l(p, h);
  CHECK(l.evaluate(0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(l.evaluate(0.0) == 0.0);
  CHECK(l.classify(0.3) == LegendreFlag::Interior);
  CHECK(l.classify(10.0) == LegendreFlag::Extrapolated);
  CHECK_THROWS_AS(l.evaluate(10.0, false), RangeError);
  CHECK_NOTHROW(l.evaluate(10.0, true));
  CHECK(l.to_csv().header() == std::vector<std::string>{"q", "value", "flag"});
}

TEST_CASE("Legendre curve of the OU Hamiltonian") {
  const HamiltonianCurve c = build_curve(ou_fixture(), symmetric_grid(3.0, 12), HamiltonianMethod::Eigen);
  const LegendreCurve l = legendre(c);
  for (double v : l.values()) CHECK(v >= 0.0);
  CHECK(l.evaluate(0.0) == 0.0);
  for (std::size_t k = 1; k + 1 < l.q().size(); ++k) CHECK(convexity_defect(l.q(), l.values(), k) >= -1e-10);
  for (std::size_t k = 1; k + 1 < c.p.size(); ++k)
    CHECK(l.biconjugate(c.p[k]) == doctest::Approx(c.values[k]).epsilon(1e-6).scale(1.0));
  for (std::size_t i = 0; i < c.p.size(); ++i)
    for (std::size_t j = 0; j < l.q().size(); ++j)
      CHECK(c.p[i] * l.q()[j] <= c.values[i] + l.values()[j] + 1e-10);
  for (std::size_t k = 0; k < l.hull_p().size(); ++k) {
    const double q = l.matched_q()[k];
    CHECK(l.hull_p()[k] * q - l.hull_values()[k] == doctest::Approx(l.evaluate(q)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("Legendre transform repairs a small concavity by the hull") {
  std::vector<double> p = {-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<double> h = {2.0, 0.5, 0.0, 1.2, 2.0};
  const LegendreCurve l(p, h);
  CHECK(l.hull_p().size() == 4);
  CHECK(l.hull_at(1.0) == doctest::Approx(1.0));
}
