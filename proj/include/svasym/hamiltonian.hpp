#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/grid.hpp"
#include "svasym/measures.hpp"
#include "svasym/model.hpp"
#include "svasym/simulate.hpp"

namespace svasym {

enum class HamiltonianMethod { Eigen, MonteCarlo, ClosedForm };

const char* method_name(HamiltonianMethod m) noexcept;
HamiltonianMethod parse_method(const std::string& name);

/// Principal eigenvalue of the tilted generator plus potential (p^2/2) sigma^2.
struct EigenEstimate {
  /// Richardson value from the fine and coarse grids.
  double value = 0.0;
  double error = 0.0;
  double fine = 0.0;
  double coarse = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
  /// Share of the eigenvector's weighted mass on the outer 5% of nodes at each end.
  double edge_mass = 0.0;
};

/// Window is chosen from the tilted invariant law and widened until the eigenvector
/// mass near the edges is below 1e-10. A fixed window (spec.lo and spec.hi) is not
/// widened; TruncationError is thrown instead.
EigenEstimate hbar0_eigen(const ModelParams& params, double p, const GridSpec& spec = {});

/// Largest discrete eigenvalue with zero boundary values at the two end nodes.
double hbar0_eigen_on_grid(const ModelParams& params, double p, const Grid& grid);

struct HamiltonianMcOptions {
  double horizon = 20.0;
  /// Importance tilt by the Poisson corrector of the potential.
  bool importance = true;
  /// Also run the untilted Girsanov-form estimate under the base factor.
  bool girsanov_pair = true;
  GridSpec grid;
};

/// Primary value: growth rate between horizons T/2 and T of log E[exp((p^2/2) int sigma^2)]
/// under the tilted factor started at the mode of its invariant law after a T/10 burn-in.
struct HamiltonianMc {
  McEstimate estimate;
  /// T^{-1} log E at the full horizon.
  McEstimate single_horizon;
  /// Same growth rate from the Girsanov form under the base factor.
  std::optional<McEstimate> girsanov;
  double horizon = 0.0;
  double start = 0.0;
};

HamiltonianMc hbar0_mc(const ModelParams& params, double p, const McConfig& mc,
                       const HamiltonianMcOptions& options = {});

struct CurveOptions {
  GridSpec grid;
  McConfig mc;
  HamiltonianMcOptions mc_options;
  /// Convexity tolerance on scaled second differences.
  double convexity_tolerance = 1e-8;
};

struct HamiltonianCurve {
  std::vector<double> p;
  std::vector<double> values;
  std::vector<double> errors;
  HamiltonianMethod method = HamiltonianMethod::Eigen;
  /// Largest violation of discrete convexity (0 when convex).
  double convexity_violation = 0.0;
  /// Interior indices whose violation exceeds the tolerance.
  std::vector<std::size_t> flagged;
  std::uint64_t seed = 0;

  CsvTable to_csv() const;
};

/// p must be increasing, symmetric about 0 and contain 0. ConvexityError if a
/// violation exceeds three times its propagated error estimate and the tolerance.
HamiltonianCurve build_curve(const ModelParams& params, const std::vector<double>& p, HamiltonianMethod method,
                             const CurveOptions& options = {});

/// Scaled second difference at interior index k (non-negative for convex data).
double convexity_defect(const std::vector<double>& p, const std::vector<double>& h, std::size_t k);

enum class LegendreFlag { Interior, Extrapolated };

const char* flag_name(LegendreFlag f) noexcept;

class LegendreCurve {
 public:
  /// Conjugate of the lower convex hull of (p, values).
  LegendreCurve(const std::vector<double>& p, const std::vector<double>& values,
                std::optional<std::vector<double>> q = std::nullopt);

  const std::vector<double>& q() const noexcept { return q_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<LegendreFlag>& flags() const noexcept { return flags_; }
  /// Subdifferential bracket: smallest and largest maximizing p.
  const std::vector<double>& bracket_lo() const noexcept { return bracket_lo_; }
  const std::vector<double>& bracket_hi() const noexcept { return bracket_hi_; }
  /// Hull vertices and the slope matched to each vertex (finite-difference derivative
  /// clamped to the hull's subdifferential).
  const std::vector<double>& hull_p() const noexcept { return hull_p_; }
  const std::vector<double>& hull_values() const noexcept { return hull_h_; }
  const std::vector<double>& matched_q() const noexcept { return matched_q_; }

  double q_min() const noexcept { return matched_q_.front(); }
  double q_max() const noexcept { return matched_q_.back(); }
  LegendreFlag classify(double q) const noexcept;

  /// sup_p (p q - H(p)) for the C2 quintic Hermite interpolant through the hull vertices
  /// with the matched slopes and finite-difference curvatures.
  /// RangeError when q is outside the slope range and extrapolation is off.
  double evaluate(double q, bool allow_extrapolation = true) const;
  /// Vertex maximum only: the exact conjugate of the piecewise-linear hull.
  double evaluate_vertex(double q) const;
  /// sup over the stored (q, value) pairs of (p q - value).
  double biconjugate(double p) const;
  /// Hull value at p by linear interpolation between vertices.
  double hull_at(double p) const;

  CsvTable to_csv() const;

 private:
  std::size_t argmax_vertex(double q) const noexcept;
  std::vector<double> hull_p_, hull_h_, matched_q_, curvature_;
  std::vector<double> q_, values_, bracket_lo_, bracket_hi_;
  std::vector<LegendreFlag> flags_;
};

LegendreCurve legendre(const HamiltonianCurve& curve, std::optional<std::vector<double>> q = std::nullopt);

/// Symmetric grid -p_max..p_max with n points on each side of 0.
std::vector<double> symmetric_grid(double p_max, std::size_t n_side);

}  // namespace svasym
