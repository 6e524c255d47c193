#pragma once

#include <optional>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/grid.hpp"
#include "svasym/measures.hpp"
#include "svasym/model.hpp"

namespace svasym {

/// Solution of B chi = (p^2/2)(sigma_bar^2 - sigma^2) on the density grid, gauged by chi(m) = 0.
struct Corrector {
  GridPtr grid;
  std::vector<double> chi;
  std::vector<double> chi_prime;
  double p = 0.0;
  double sigma_bar_sq = 0.0;
  double y_ref = 0.0;
  /// Largest gap between the left- and right-anchored forms of chi' (scaled back by the flux weight).
  double representation_gap = 0.0;
  /// Richardson error estimate of the centering integral.
  double quadrature_error = 0.0;

  CsvTable to_csv() const;
};

/// Uses the discretely centered sigma_bar^2 of the density grid.
Corrector solve_corrector(const ModelParams& params, double p, const GridSpec& spec = {});
/// Uses the supplied sigma_bar^2; throws CenteringError when it leaves a defect above 1e-5.
Corrector solve_corrector(const ModelParams& params, double p, double sigma_bar_sq,
                          const GridSpec& spec = {});
/// Solve on an existing invariant density (p = 0 law).
Corrector solve_corrector_on(const ModelParams& params, double p, const DensityTable& density,
                             std::optional<double> sigma_bar_sq = std::nullopt);

/// Right-hand side (p^2/2)(sigma_bar^2 - sigma^2) at the nodes.
std::vector<double> corrector_rhs(const ModelParams& params, const Corrector& c);

/// max |B chi - rhs| over the middle half of the window (in the grid variable).
double corrector_residual(const ModelParams& params, const Corrector& c);

struct GrowthReport {
  /// Largest ratio |chi'(y)| / y^{2g - 1} over the outer quartile.
  double c1 = 0.0;
  bool pass = false;
  bool trivial = false;
  std::vector<double> y;
  std::vector<double> ratio;
};

/// Throws NotApplicable for beta = 0 or a non-positive growth exponent unless chi' vanishes.
GrowthReport growth_bound_check(const Corrector& c, const ModelParams& params);

}  // namespace svasym
