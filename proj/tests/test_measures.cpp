#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "svasym/acceptance.hpp"
#include "svasym/errors.hpp"
#include "svasym/measures.hpp"

using namespace svasym;

namespace {

double normal_pdf(double y, double mean = 0.0) {
  return std::exp(-0.5 * (y - mean) * (y - mean)) / std::sqrt(2.0 * std::numbers::pi);
}

FunctionTable bump(GridPtr g, double center, double width) {
  return FunctionTable::sample(g, [=](double y) {
    const double u = (y - center) / width;
    return std::abs(u) < 1.0 ? std::pow(1.0 - u * u, 4) : 0.0;
  });
}

}  // namespace

TEST_CASE("scale density anchor and closed forms") {
  const ModelParams ou = ou_fixture();
  CHECK(scale_density(ou, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(scale_density(ou, 0.0, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(scale_density(ou, 0.0, 2.5) == doctest::Approx(std::exp(2.5 * 2.5 / 2.0 - 0.5)).epsilon(1e-12));
  const ModelParams cir = cir_fixture();
  CHECK(scale_density(cir, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(scale_density(cir, 0.0, 2.0) == doctest::Approx(0.25 * std::exp(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(scale_density(cir, 0.0, -1.0), DomainError);
}

TEST_CASE("scale density of a tilted factor matches the quadrature of its drift") {
  ModelParams p = cir_fixture();
  p.rho = -0.4;
  const double tilt = 0.7;
  const double y = 2.3;
  auto integrand = [&](double z) {
    return 2.0 * p.tilted_drift(tilt, z) / (p.nu * p.nu * std::pow(z, 2.0 * p.beta));
  };
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 1.0, y, 15, 1e-14);
  CHECK(log_scale_density(p, tilt, y) == doctest::Approx(-I).epsilon(1e-10));
}

TEST_CASE("OU invariant law is N(0, 1)") {
  const DensityTable d = invariant_density(ou_fixture());
  double worst = 0.0;
  for (std::size_t i = 0; i < d.grid().size(); ++i)
    worst = std::max(worst, std::abs(d.values()[i] - normal_pdf(d.grid()[i])));
  CHECK(worst < 1e-8);
  CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(d.tail_mass() < 1e-8);
  CHECK(d.grid().size() == 4096);
}

TEST_CASE("square-root invariant law is Gamma(2, 1/2)") {
  const DensityTable d = invariant_density(cir_fixture());
  double worst = 0.0;
  for (std::size_t i = 0; i < d.grid().size(); ++i) {
    const double y = d.grid()[i];
    worst = std::max(worst, std::abs(d.values()[i] - 4.0 * y * std::exp(-2.0 * y)));
  }
  CHECK(worst < 1e-6);
  CHECK(d.grid().kind() == GridKind::LogUniform);
  for (double v : d.values()) CHECK(v >= 0.0);
}

TEST_CASE("tilted OU law with constant volatility is a shifted normal") {
  ModelParams p = ou_fixture();
  p.sigma = VolFnSpec::constant(0.5);
  p.rho = 0.6;
  const double tilt = 1.5;
  const double shift = p.rho * tilt * 0.5 * p.nu;
  const DensityTable d = invariant_density(p, tilt);
  double worst = 0.0;
  for (std::size_t i = 0; i < d.grid().size(); ++i)
    worst = std::max(worst, std::abs(d.values()[i] - normal_pdf(d.grid()[i], shift)));
  CHECK(worst < 1e-8);
}

TEST_CASE("averaged variance") {
  ModelParams c = ou_fixture();
  c.sigma = VolFnSpec::constant(0.3);
  CHECK(sigma_bar_sq(c) == 0.09);
  CHECK(sigma_bar_sq(ou_fixture()) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-7));
  const double gamma_half = std::tgamma(2.5) / std::tgamma(2.0) / std::sqrt(2.0);
  CHECK(sigma_bar_sq(cir_fixture()) == doctest::Approx(gamma_half).epsilon(1e-7));
}

TEST_CASE("doubling the grid moves the averaged variance by less than four error estimates") {
  for (const ModelParams& p : {ou_fixture(), cir_fixture(), beta75_fixture()}) {
    GridSpec a, b;
    b.points = 2 * a.points;
    const DensityTable da = invariant_density(p, 0.0, a), db = invariant_density(p, 0.0, b);
    const QuadratureValue qa = richardson_expect(da, sigma_sq_nodes(p, da.grid()));
    const QuadratureValue qb = richardson_expect(db, sigma_sq_nodes(p, db.grid()));
    CHECK(std::abs(qa.value - qb.value) <= 4.0 * qa.error + 1e-15);
  }
}

TEST_CASE("Dirichlet form") {
  const ModelParams ou = ou_fixture();
  const DensityTable d = invariant_density(ou);
  const auto g = d.grid_ptr();
  CHECK(dirichlet_form(ou, d, FunctionTable::sample(g, [](double) { return 1.0; })) == 0.0);
  CHECK(dirichlet_form(ou, d, FunctionTable::sample(g, [](double y) { return y; })) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(dirichlet_form(ou, d, FunctionTable::sample(g, [](double y) { return std::sin(3.0 * y); })) > 0.0);
  const GridPtr other = std::make_shared<const Grid>(Grid::uniform(-1.0, 1.0, 11));
  CHECK_THROWS_AS(dirichlet_form(ou, d, FunctionTable::sample(other, [](double y) { return y; })), GridMismatch);
}

TEST_CASE("reversibility of the tilted generator") {
  auto residuals = [](const ModelParams& p, double tilt, std::size_t points) {
    GridSpec spec;
    spec.points = points;
    const DensityTable d = invariant_density(p, tilt, spec);
    const auto g = d.grid_ptr();
    const FunctionTable f = bump(g, 0.0, 1.5), h = bump(g, 0.7, 1.5);
    CHECK(reversibility_check(p, d, f, f) == 0.0);
    return std::pair{reversibility_check(p, d, f, h),
                     reversibility_check(p, d, FunctionTable::sample(g, [](double) { return 1.0; }), h)};
  };
  ModelParams smooth = constant_fixture();
  smooth.rho = 0.3;
  ModelParams kinked = ou_fixture();
  kinked.rho = 0.3;
  for (double tilt : {0.0, 1.0}) {
    const auto [a, b] = residuals(smooth, tilt, 4096);
    CHECK(a < 1e-6);
    CHECK(b < 1e-6);
  }
  const auto [a0, b0] = residuals(kinked, 0.0, 4096);
  CHECK(a0 < 1e-6);
  CHECK(b0 < 1e-6);
  // sqrt-type sigma puts a |y|^{1/2} term in the tilted drift; the residual still vanishes with the grid.
  const auto [a1, b1] = residuals(kinked, 1.0, 2048);
  const auto [a2, b2] = residuals(kinked, 1.0, 4096);
  const auto [a3, b3] = residuals(kinked, 1.0, 8192);
  CHECK(a2 < a1 / 2.5);
  CHECK(a3 < a2 / 2.5);
  CHECK(b2 < b1 / 2.5);
  CHECK(b3 < b2 / 2.5);
  CHECK(a3 < 1e-5);
}

TEST_CASE("stationarity of the invariant law") {
  for (const ModelParams& p : {ou_fixture(), cir_fixture()}) {
    const DensityTable d = invariant_density(p);
    const FunctionTable xi = bump(d.grid_ptr(), p.beta == 0.0 ? 0.3 : 1.2, 0.8);
    CHECK(stationarity_residual(p, d, xi) < 1e-6);
  }
}

TEST_CASE("density CSV has a (y, density) header") {
  const DensityTable d = invariant_density(ou_fixture(), 0.0, GridSpec{65});
  const CsvTable t = d.to_csv();
  CHECK(t.header() == std::vector<std::string>{"y", "density"});
  CHECK(t.rows().size() == 65);
}
