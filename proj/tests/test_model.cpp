#include <doctest.h>

#include <cmath>

#include "svasym/acceptance.hpp"
#include "svasym/errors.hpp"
#include "svasym/model.hpp"

using namespace svasym;

namespace {

ModelParams square_root(double m, double nu) {
  ModelParams p;
  p.beta = 0.5;
  p.m = m;
  p.nu = nu;
  p.y0 = 1.0;
  p.sigma = VolFnSpec::power_abs(1.0, 0.25);
  return p;
}

bool clause_passes(const ValidationReport& r, const std::string& id) {
  const ClauseResult* c = r.find(id);
  REQUIRE(c != nullptr);
  return c->pass;
}

}  // namespace

TEST_CASE("square-root factor below the Feller level fails clause 2") {
  ModelParams p = square_root(0.5, 1.2);
  const ValidationReport r = validate(p);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(clause_passes(r, "assumption-1.2"));
  CHECK(clause_passes(r, "assumption-1.1"));
}

TEST_CASE("OU factor with constant volatility passes every clause") {
  ModelParams p = ou_fixture();
  p.sigma = VolFnSpec::constant(0.3);
  const ValidationReport r = validate(p);
  CHECK(r.passed());
  for (const auto& c : r.clauses) CHECK_MESSAGE(c.pass, c.id);
}

TEST_CASE("growth exponent at or above 1 - beta fails clause 3") {
  ModelParams p = square_root(1.0, 1.0);
  p.beta = 0.7;
  p.sigma = VolFnSpec::power_abs(1.0, 0.4);
  const ValidationReport r = validate(p);
  CHECK_FALSE(clause_passes(r, "assumption-1.3"));
  CHECK(clause_passes(r, "assumption-1.2"));
}

TEST_CASE("inadmissible beta fails clause 1") {
  ModelParams p = square_root(1.0, 1.0);
  for (double b : {0.3, 1.0, -0.5}) {
    p.beta = b;
    CHECK_FALSE(clause_passes(validate(p), "assumption-1.1"));
  }
}

TEST_CASE("validation is deterministic") {
  const ModelParams p = square_root(0.5, 1.2);
  const ValidationReport a = validate(p), b = validate(p);
  REQUIRE(a.clauses.size() == b.clauses.size());
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    CHECK(a.clauses[i].pass == b.clauses[i].pass);
    CHECK(a.clauses[i].message == b.clauses[i].message);
  }
}

TEST_CASE("boundary classification") {
  CHECK(boundary_classification(beta75_fixture()) == BoundaryClass::Inaccessible);
  CHECK(boundary_classification(square_root(1.0, 1.0)) == BoundaryClass::Inaccessible);
  CHECK_THROWS_AS(boundary_classification(ou_fixture()), NotApplicable);
  // Below the Feller level the scale integral converges.
  CHECK(boundary_classification(square_root(0.3, 1.0)) == BoundaryClass::Accessible);
}

TEST_CASE("every passing fixture with beta in [1/2, 1) has an inaccessible boundary") {
  for (double beta : {0.5, 0.6, 0.75, 0.9}) {
    for (double m : {0.8, 1.0, 2.0}) {
      ModelParams p = square_root(m, 1.0);
      p.beta = beta;
      p.sigma = VolFnSpec::power_abs(1.0, 0.5 * (1.0 - beta));
      if (!validate(p).passed()) continue;
      CHECK_MESSAGE(boundary_classification(p) == BoundaryClass::Inaccessible, "beta=" << beta << " m=" << m);
    }
  }
}

TEST_CASE("sigma evaluation") {
  CHECK(sigma_eval(VolFnSpec::constant(0.3), 5.0, StateSpace::RealLine) == 0.3);
  CHECK(sigma_eval(VolFnSpec::power_abs(1.0, 0.5), 4.0, StateSpace::RealLine) == doctest::Approx(2.0));
  const VolFnSpec tab = VolFnSpec::tabulated({1.0, 2.0}, {1.0, 2.0}, 0.2);
  CHECK(sigma_eval(tab, 1.5, StateSpace::PositiveHalfLine) == doctest::Approx(1.5));
  CHECK_THROWS_AS(sigma_eval(tab, -1.0, StateSpace::PositiveHalfLine), DomainError);
  CHECK_THROWS_AS(sigma_eval(tab, 0.0, StateSpace::PositiveHalfLine), DomainError);
}

TEST_CASE("tabulated sigma extends with its declared growth exponent") {
  const VolFnSpec tab = VolFnSpec::tabulated({0.0, 1.0}, {1.0, 2.0}, 0.5);
  const double y = 8.0;
  CHECK(tab(y) == doctest::Approx(2.0 * std::pow((1.0 + y) / 2.0, 0.5)));
}

TEST_CASE("sigma is finite and nonnegative on a wide grid for passing fixtures") {
  for (const ModelParams& p : {ou_fixture(), cir_fixture(), beta75_fixture(), constant_fixture()}) {
    const bool line = p.state_space() == StateSpace::RealLine;
    for (int i = 0; i < 10000; ++i) {
      const double y = line ? -50.0 + 100.0 * i / 9999.0 : 1e-6 + 50.0 * i / 9999.0;
      const double v = sigma_eval(p.sigma, y, p.state_space());
      CHECK((std::isfinite(v) && v >= 0.0));
    }
  }
}

TEST_CASE("model key/value round trip") {
  ModelParams p = beta75_fixture();
  p.rho = -0.3;
  p.rate = 0.05;
  p.x0 = std::log(100.0);
  CHECK(from_key_values(to_key_values(p)) == p);
  ModelParams q = ou_fixture();
  q.sigma = VolFnSpec::tabulated({-1.0, 0.0, 2.0}, {0.5, 0.1, 0.7}, 0.25);
  CHECK(from_key_values(to_key_values(q)) == q);
}

TEST_CASE("regime exponents") {
  CHECK(Regime(2).delta(0.5) == 0.25);
  CHECK(Regime(4).delta(0.5) == 0.0625);
  CHECK_THROWS_AS(Regime(3), ValidationError);
}
