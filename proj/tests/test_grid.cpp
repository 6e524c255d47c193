#include <doctest.h>

#include <cmath>

#include "svasym/grid.hpp"

using namespace svasym;

TEST_CASE("trapezoid integrates linear functions exactly") {
  const Grid g = Grid::uniform(-1.0, 3.0, 101);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = 2.0 * g[i] + 1.0;
  CHECK(g.integrate(f) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(g.cumulative(f).back() == doctest::Approx(g.integrate(f)).epsilon(1e-14));
}

TEST_CASE("log-uniform grid integrates in y") {
  const Grid g = Grid::log_uniform(1e-3, 10.0, 4001);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g[i]);
  CHECK(g.integrate(f) == doctest::Approx(std::exp(-1e-3) - std::exp(-10.0)).epsilon(1e-6));
}

TEST_CASE("coarsening and refinement") {
  const Grid g = Grid::uniform(0.0, 1.0, 9);
  const Grid c = g.coarsened();
  CHECK(c.size() == 5);
  CHECK(c[1] == g[2]);
  const Grid r = g.refined();
  CHECK(r.size() == 17);
  CHECK(r[1] == doctest::Approx(1.0 / 16.0));
  CHECK(g.nearest(0.3) == 2);
}

TEST_CASE("Fornberg weights reproduce polynomial derivatives") {
  const std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto w = fd_weights(0.0, xs, 2);
  CHECK(w[1][0] == doctest::Approx(1.0 / 12.0));
  CHECK(w[1][1] == doctest::Approx(-8.0 / 12.0));
  CHECK(w[2][2] == doctest::Approx(-30.0 / 12.0));
}

TEST_CASE("nodal derivatives of a cubic are exact") {
  const Grid g = Grid::uniform(-1.0, 1.0, 41);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g[i] * g[i] * g[i];
  const NodalDerivatives d = nodal_derivatives(g, f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(d.first[i] == doctest::Approx(3.0 * g[i] * g[i]).epsilon(1e-9));
    CHECK(d.second[i] == doctest::Approx(6.0 * g[i]).epsilon(1e-9));
  }
}
