#include "svasym/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svasym/errors.hpp"

namespace svasym {

std::size_t SymTridiagonal::count_below(double x) const noexcept {
  const std::size_t n = d.size();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> SymTridiagonal::spectrum_bounds() const noexcept {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  return {lo, hi};
}

std::vector<double> SymTridiagonal::multiply(std::span<const double> v) const {
  const std::size_t n = d.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = d[i] * v[i];
    if (i > 0) s += e[i - 1] * v[i - 1];
    if (i + 1 < n) s += e[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

double kth_eigenvalue(const SymTridiagonal& a, std::size_t k, double tol) {
  const std::size_t n = a.size();
  if (n == 0) throw Error("empty matrix has no eigenvalues");
  if (a.e.size() + 1 != n) throw Error("off-diagonal length must be n - 1");
  if (k >= n) throw Error("eigenvalue index out of range");
  auto [lo, hi] = a.spectrum_bounds();
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (tol <= 0.0) tol = 8.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  // Invariant: count_below(lo) <= k < count_below(hi).
  hi += tol;
  lo -= tol;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (a.count_below(mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double largest_eigenvalue(const SymTridiagonal& a, double tol) { return kth_eigenvalue(a, a.size() - 1, tol); }

std::vector<double> solve_shifted(const SymTridiagonal& a, double shift, std::span<const double> b) {
  const std::size_t n = a.size();
  // Row i of the eliminated system holds u0 (diagonal), u1, u2 (fill-in from pivoting).
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), rhs(b.begin(), b.end());
  std::vector<double> sub(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    u0[i] = a.d[i] - shift;
    if (i + 1 < n) {
      u1[i] = a.e[i];
      sub[i + 1] = a.e[i];
    }
  }
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1.0, std::abs(a.spectrum_bounds().second) + std::abs(shift));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Candidate pivot rows: i (u0, u1, u2) and i+1 (sub, d - shift, e).
    double r0 = u0[i], r1 = u1[i], r2 = u2[i], rb = rhs[i];
    double s0 = sub[i + 1], s1 = u0[i + 1], s2 = u1[i + 1], sb = rhs[i + 1];
    if (std::abs(s0) > std::abs(r0)) {
      std::swap(r0, s0);
      std::swap(r1, s1);
      std::swap(r2, s2);
      std::swap(rb, sb);
    }
    if (r0 == 0.0) r0 = tiny;
    const double f = s0 / r0;
    u0[i] = r0;
    u1[i] = r1;
    u2[i] = r2;
    rhs[i] = rb;
    u0[i + 1] = s1 - f * r1;
    u1[i + 1] = s2 - f * r2;
    rhs[i + 1] = sb - f * rb;
  }
  if (u0[n - 1] == 0.0) u0[n - 1] = tiny;
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    if (k + 1 < n) s -= u1[k] * x[k + 1];
    if (k + 2 < n) s -= u2[k] * x[k + 2];
    x[k] = s / u0[k];
  }
  return x;
}

std::vector<double> eigenvector(const SymTridiagonal& a, double lambda, int iterations) {
  const std::size_t n = a.size();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < iterations; ++it) {
    v = solve_shifted(a, lambda, v);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("inverse iteration broke down");
    for (double& x : v) x /= norm;
  }
  return v;
}

}  // namespace svasym
