#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svasym {

/// Symmetric tridiagonal matrix: diagonal d (n entries) and off-diagonal e (n - 1 entries).
struct SymTridiagonal {
  std::vector<double> d;
  std::vector<double> e;

  std::size_t size() const noexcept { return d.size(); }
  /// Number of eigenvalues strictly below x (Sturm sequence count).
  std::size_t count_below(double x) const noexcept;
  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> spectrum_bounds() const noexcept;
  std::vector<double> multiply(std::span<const double> v) const;
};

/// Largest eigenvalue by bisection on the Sturm count, to absolute tolerance tol
/// (default: a few ulps of the spectral radius).
double largest_eigenvalue(const SymTridiagonal& a, double tol = 0.0);

/// k-th smallest eigenvalue (k = 0 is the smallest).
double kth_eigenvalue(const SymTridiagonal& a, std::size_t k, double tol = 0.0);

/// Unit eigenvector for an eigenvalue estimate by inverse iteration.
std::vector<double> eigenvector(const SymTridiagonal& a, double lambda, int iterations = 3);

/// Solves (a - shift I) x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_shifted(const SymTridiagonal& a, double shift, std::span<const double> b);

}  // namespace svasym
