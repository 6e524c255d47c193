#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace svasym {

enum class GridKind { Uniform, LogUniform };

/// Strictly increasing nodes with trapezoid weights taken in the grid variable
/// u = y (uniform) or u = log y (log-uniform).
class Grid {
 public:
  static Grid uniform(double lo, double hi, std::size_t n);
  static Grid log_uniform(double lo, double hi, std::size_t n);
  /// Arbitrary increasing nodes, trapezoid in y.
  static Grid from_points(std::vector<double> points);

  std::size_t size() const noexcept { return y_.size(); }
  double operator[](std::size_t i) const noexcept { return y_[i]; }
  const std::vector<double>& points() const noexcept { return y_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  GridKind kind() const noexcept { return kind_; }
  double lo() const noexcept { return y_.front(); }
  double hi() const noexcept { return y_.back(); }

  /// Grid variable at node i and dy/du there.
  double u(std::size_t i) const noexcept;
  double jacobian(std::size_t i) const noexcept;

  double integrate(std::span<const double> f) const;
  /// Running trapezoid integral from the left end; last entry equals integrate(f).
  std::vector<double> cumulative(std::span<const double> f) const;

  /// Even-indexed nodes plus the last node; its weights give the coarse trapezoid rule.
  Grid coarsened() const;
  /// Values of f restricted to the nodes of coarsened().
  std::vector<double> restrict_to_coarse(std::span<const double> f) const;
  /// Inserts midpoints (in the grid variable) between consecutive nodes.
  Grid refined() const;

  /// Index of the node closest to y.
  std::size_t nearest(double y) const;

  bool operator==(const Grid& other) const noexcept { return y_ == other.y_ && kind_ == other.kind_; }

 private:
  Grid(std::vector<double> y, GridKind kind);
  std::vector<double> y_;
  std::vector<double> w_;
  GridKind kind_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values of a function on a shared grid.
struct FunctionTable {
  GridPtr grid;
  std::vector<double> values;

  template <class F>
  static FunctionTable sample(GridPtr g, F&& f) {
    FunctionTable t{g, std::vector<double>(g->size())};
    for (std::size_t i = 0; i < g->size(); ++i) t.values[i] = f((*g)[i]);
    return t;
  }
};

/// Throws GridMismatch unless both grids hold the same nodes.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Fornberg finite-difference weights at x0 for derivatives 0..max_order on nodes xs.
/// Result is indexed [order][node].
std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> xs, int max_order);

/// First and second derivatives at every node using 5-point stencils that do not
/// straddle any of the given breakpoints.
struct NodalDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};
NodalDerivatives nodal_derivatives(const Grid& g, std::span<const double> f,
                                   std::span<const double> breakpoints = {});

}  // namespace svasym
