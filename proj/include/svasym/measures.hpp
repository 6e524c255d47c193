#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/grid.hpp"
#include "svasym/model.hpp"

namespace svasym {

/// Discretization request for densities on E0.
struct GridSpec {
  std::size_t points = 4096;
  /// Fixed window; when both are set no automatic expansion happens.
  std::optional<double> lo;
  std::optional<double> hi;
  /// Admissible tail mass outside the window relative to the total.
  double tail_tolerance = 1e-10;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Normalized density on a truncated window of E0.
class DensityTable {
 public:
  DensityTable(GridPtr grid, std::vector<double> log_unnormalized, double tilt);

  const Grid& grid() const noexcept { return *grid_; }
  GridPtr grid_ptr() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// log of the unnormalized speed density at each node.
  const std::vector<double>& log_speed() const noexcept { return log_speed_; }
  double log_norm_constant() const noexcept { return log_z_; }
  double norm_constant() const noexcept;
  double tilt() const noexcept { return tilt_; }
  /// Analytic tail mass estimate outside the window (relative).
  double tail_mass() const noexcept { return tail_mass_; }
  void set_tail_mass(double t) noexcept { tail_mass_ = t; }

  double integral() const;
  /// Trapezoid expectation of nodal values f.
  double expect(std::span<const double> f) const;
  /// Index of the node with the largest density.
  std::size_t mode_index() const;

  CsvTable to_csv() const;

 private:
  GridPtr grid_;
  std::vector<double> log_speed_;
  std::vector<double> values_;
  double log_z_ = 0.0;
  double tilt_ = 0.0;
  double tail_mass_ = 0.0;
};

/// Drift of the tilted factor and its scale/speed densities.
double log_scale_density(const ModelParams& params, double p, double y);
double scale_density(const ModelParams& params, double p, double y);
/// log m_p(y) = log(2 / (nu^2 |y|^{2 beta} s_p(y))).
double log_speed_density(const ModelParams& params, double p, double y);
/// d/dy log m_p(y).
double log_speed_slope(const ModelParams& params, double p, double y);

/// Selects the truncation window so the analytic tail estimate is below tolerance.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double tail_mass = 0.0;
};
Window choose_window(const ModelParams& params, double p, const GridSpec& spec);

/// Grid for a window, aligned so that a sigma kink at 0 falls on an even node.
GridPtr make_grid(const ModelParams& params, double lo, double hi, std::size_t points);

DensityTable invariant_density(const ModelParams& params, double p = 0.0, const GridSpec& spec = {});
/// Density of the same tilt on a given grid (no window search).
DensityTable density_on_grid(const ModelParams& params, double p, GridPtr grid);

/// Reweighted density proportional to exp(2h) times the given density.
DensityTable exp_tilted_density(const DensityTable& base, std::span<const double> h);

struct QuadratureValue {
  double value = 0.0;
  double error = 0.0;
  std::size_t points = 0;
};

/// Richardson-extrapolated expectation of nodal values against a density, with error estimate.
QuadratureValue richardson_expect(const DensityTable& density, std::span<const double> f);

/// Averaged variance: the integral of sigma^2 against the invariant law.
QuadratureValue sigma_bar_sq_estimate(const ModelParams& params, const GridSpec& spec = {});
double sigma_bar_sq(const ModelParams& params, const GridSpec& spec = {});

/// Nodal values of sigma^2 on the density grid.
std::vector<double> sigma_sq_nodes(const ModelParams& params, const Grid& grid);

/// (nu^2/2) int |y|^{2 beta} |h'|^2 d pi^p.
double dirichlet_form(const ModelParams& params, const DensityTable& density, const FunctionTable& h);

/// B^p f = mu_p f' + (nu^2/2) |y|^{2 beta} f'' at each node.
std::vector<double> apply_generator(const ModelParams& params, double p, const Grid& grid,
                                    std::span<const double> f);

/// |int f B^p g d pi^p - int g B^p f d pi^p|.
double reversibility_check(const ModelParams& params, const DensityTable& density,
                           const FunctionTable& f, const FunctionTable& g);

/// |int B^p xi d pi^p|.
double stationarity_residual(const ModelParams& params, const DensityTable& density,
                             const FunctionTable& xi);

}  // namespace svasym
