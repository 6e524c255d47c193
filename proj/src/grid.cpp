#include "svasym/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

Grid::Grid(std::vector<double> y, GridKind kind) : y_(std::move(y)), kind_(kind) {
  const std::size_t n = y_.size();
  if (n < 3) throw Error("grid needs at least 3 nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(y_[i] > y_[i - 1])) throw Error("grid nodes must be strictly increasing");
  if (kind_ == GridKind::LogUniform && !(y_.front() > 0.0))
    throw Error("log-uniform grid needs positive nodes");
  w_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (u(i + 1) - u(i));
    w_[i] += half * jacobian(i);
    w_[i + 1] += half * jacobian(i + 1);
  }
}

Grid Grid::uniform(double lo, double hi, std::size_t n) {
  std::vector<double> y(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) y[i] = lo + h * static_cast<double>(i);
  y.back() = hi;
  return Grid(std::move(y), GridKind::Uniform);
}

Grid Grid::log_uniform(double lo, double hi, std::size_t n) {
  std::vector<double> y(n);
  const double a = std::log(lo);
  const double h = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(a + h * static_cast<double>(i));
  y.front() = lo;
  y.back() = hi;
  return Grid(std::move(y), GridKind::LogUniform);
}

Grid Grid::from_points(std::vector<double> points) { return Grid(std::move(points), GridKind::Uniform); }

double Grid::u(std::size_t i) const noexcept {
  return kind_ == GridKind::LogUniform ? std::log(y_[i]) : y_[i];
}

double Grid::jacobian(std::size_t i) const noexcept {
  return kind_ == GridKind::LogUniform ? y_[i] : 1.0;
}

double Grid::integrate(std::span<const double> f) const {
  if (f.size() != y_.size()) throw GridMismatch("integrand length differs from grid size");
  double s = 0.0;
  for (std::size_t i = 0; i < y_.size(); ++i) s += w_[i] * f[i];
  return s;
}

std::vector<double> Grid::cumulative(std::span<const double> f) const {
  if (f.size() != y_.size()) throw GridMismatch("integrand length differs from grid size");
  std::vector<double> c(y_.size(), 0.0);
  long double acc = 0.0L;
  for (std::size_t i = 0; i + 1 < y_.size(); ++i) {
    acc += 0.5L * (u(i + 1) - u(i)) * (f[i] * jacobian(i) + f[i + 1] * jacobian(i + 1));
    c[i + 1] = static_cast<double>(acc);
  }
  return c;
}

Grid Grid::coarsened() const {
  std::vector<double> y;
  y.reserve(y_.size() / 2 + 2);
  for (std::size_t i = 0; i < y_.size(); i += 2) y.push_back(y_[i]);
  if ((y_.size() - 1) % 2 != 0) y.push_back(y_.back());
  return Grid(std::move(y), kind_);
}

std::vector<double> Grid::restrict_to_coarse(std::span<const double> f) const {
  std::vector<double> out;
  out.reserve(f.size() / 2 + 2);
  for (std::size_t i = 0; i < f.size(); i += 2) out.push_back(f[i]);
  if ((f.size() - 1) % 2 != 0) out.push_back(f.back());
  return out;
}

Grid Grid::refined() const {
  std::vector<double> y;
  y.reserve(2 * y_.size() - 1);
  for (std::size_t i = 0; i < y_.size(); ++i) {
    y.push_back(y_[i]);
    if (i + 1 < y_.size()) {
      y.push_back(kind_ == GridKind::LogUniform ? std::sqrt(y_[i] * y_[i + 1])
                                                : 0.5 * (y_[i] + y_[i + 1]));
    }
  }
  return Grid(std::move(y), kind_);
}

std::size_t Grid::nearest(double y) const {
  auto it = std::lower_bound(y_.begin(), y_.end(), y);
  if (it == y_.begin()) return 0;
  if (it == y_.end()) return y_.size() - 1;
  const std::size_t i = static_cast<std::size_t>(it - y_.begin());
  return (y - y_[i - 1] <= y_[i] - y) ? i - 1 : i;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (&a == &b) return;
  if (!(a == b)) throw GridMismatch(fmt::format("{}: tables live on different grids", what));
}

std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> xs, int max_order) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

NodalDerivatives nodal_derivatives(const Grid& g, std::span<const double> f,
                                   std::span<const double> breakpoints) {
  const std::size_t n = g.size();
  if (f.size() != n) throw GridMismatch("values length differs from grid size");
  constexpr std::size_t width = 5;
  NodalDerivatives d{std::vector<double>(n), std::vector<double>(n)};
  const auto& y = g.points();
  auto straddles = [&](std::size_t s) {
    for (double b : breakpoints)
      if (y[s] < b && b < y[s + width - 1]) return true;
    return false;
  };
  const std::size_t last_start = n >= width ? n - width : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t centered = std::min(i >= 2 ? i - 2 : 0, last_start);
    std::size_t best = centered;
    if (straddles(centered)) {
      const std::size_t lo = i >= width - 1 ? i - (width - 1) : 0;
      const std::size_t hi = std::min(i, last_start);
      std::size_t best_dist = n;
      for (std::size_t s = lo; s <= hi; ++s) {
        if (straddles(s)) continue;
        const std::size_t dist = s > centered ? s - centered : centered - s;
        if (dist < best_dist) {
          best_dist = dist;
          best = s;
        }
      }
    }
    const std::span<const double> xs(y.data() + best, width);
    const auto w = fd_weights(y[i], xs, 2);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const double df = f[best + k] - f[i];
      d1 += w[1][k] * df;
      d2 += w[2][k] * df;
    }
    d.first[i] = d1;
    d.second[i] = d2;
  }
  return d;
}

}  // namespace svasym
