#include <doctest.h>

#include <cmath>
#include <numbers>

#include "svasym/tridiagonal.hpp"

using namespace svasym;

namespace {

SymTridiagonal laplacian(std::size_t n) {
  return {std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
}

}  // namespace

TEST_CASE("second-difference matrix spectrum") {
  const std::size_t n = 50;
  const SymTridiagonal a = laplacian(n);
  for (std::size_t k = 0; k < n; k += 7) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
    CHECK(kth_eigenvalue(a, k) == doctest::Approx(exact).epsilon(1e-13));
  }
  CHECK(largest_eigenvalue(a) == doctest::Approx(2.0 - 2.0 * std::cos(n * std::numbers::pi / (n + 1))));
  CHECK(a.count_below(2.0) == n / 2);
}

TEST_CASE("inverse iteration recovers the sine mode") {
  const std::size_t n = 40;
  const SymTridiagonal a = laplacian(n);
  const double lam = kth_eigenvalue(a, 0);
  const auto v = eigenvector(a, lam);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm += std::pow(std::sin((i + 1) * std::numbers::pi / (n + 1)), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = std::sin((i + 1) * std::numbers::pi / (n + 1)) / std::sqrt(norm);
    CHECK(std::abs(std::abs(v[i]) - exact) < 1e-10);
  }
  const auto av = a.multiply(v);
  for (std::size_t i = 0; i < n; ++i) CHECK(av[i] == doctest::Approx(lam * v[i]).epsilon(1e-9));
}

TEST_CASE("shifted solve with pivoting") {
  SymTridiagonal a{{1e-14, 3.0, 1.0, 4.0}, {2.0, -1.0, 0.5}};
  const std::vector<double> x = {1.0, -2.0, 0.5, 3.0};
  const double shift = 0.25;
  auto b = a.multiply(x);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= shift * x[i];
  const auto y = solve_shifted(a, shift, b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("Gershgorin bounds enclose the spectrum") {
  SymTridiagonal a{{1.0, -3.0, 2.0, 0.5, 7.0}, {0.3, 1.2, -0.7, 2.0}};
  const auto [lo, hi] = a.spectrum_bounds();
  CHECK(kth_eigenvalue(a, 0) >= lo);
  CHECK(largest_eigenvalue(a) <= hi);
  CHECK(a.count_below(lo) == 0);
  CHECK(a.count_below(hi) == a.size());
}
