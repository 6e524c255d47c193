#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace svasym {

/// State space of the volatility factor: the real line (beta = 0) or (0, inf).
enum class StateSpace { RealLine, PositiveHalfLine };

struct ConstantVol {
  double s0 = 0.0;
  friend bool operator==(const ConstantVol&, const ConstantVol&) = default;
};

/// sigma(y) = c * (a + |y|)^q
struct PowerAbsVol {
  double c = 1.0;
  double q = 0.0;
  double a = 0.0;
  friend bool operator==(const PowerAbsVol&, const PowerAbsVol&) = default;
};

/// Piecewise-linear table; outside the table the edge value is extended
/// with the declared growth exponent, v_edge * ((1+|y|)/(1+|y_edge|))^g.
struct TabulatedVol {
  std::vector<double> grid;
  std::vector<double> values;
  friend bool operator==(const TabulatedVol&, const TabulatedVol&) = default;
};

/// Volatility function sigma(.) together with its declared growth exponent.
class VolFnSpec {
 public:
  using Kind = std::variant<ConstantVol, PowerAbsVol, TabulatedVol>;

  VolFnSpec() : VolFnSpec(constant(0.2)) {}

  static VolFnSpec constant(double s0);
  static VolFnSpec power_abs(double c, double q, double a = 0.0);
  static VolFnSpec tabulated(std::vector<double> grid, std::vector<double> values,
                             double growth_exponent);

  /// Overrides the declared growth exponent (PowerAbs defaults to q, Constant to 0).
  VolFnSpec with_growth(double growth_exponent) const;

  const Kind& kind() const noexcept { return kind_; }
  double growth_exponent() const noexcept { return growth_; }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantVol>(kind_); }
  const char* kind_name() const noexcept;

  /// Unchecked evaluation; continuous on the closure of E0.
  double operator()(double y) const noexcept;

  /// Points where sigma (hence sigma^2) is not smooth.
  std::vector<double> breakpoints() const;

  friend bool operator==(const VolFnSpec&, const VolFnSpec&) = default;

 private:
  VolFnSpec(Kind kind, double growth) : kind_(std::move(kind)), growth_(growth) {}
  Kind kind_;
  double growth_ = 0.0;
};

/// Coefficients of the two-scale system
///   dX = (r - sigma^2(Y)/2) dt + sigma(Y) dW1
///   dY = (m - Y)/delta dt + nu/sqrt(delta) Y^beta dW2,  <W1, W2> = rho t.
struct ModelParams {
  double m = 0.0;
  double nu = 1.0;
  double beta = 0.0;
  double rho = 0.0;
  double rate = 0.0;
  VolFnSpec sigma;
  double y0 = 0.0;
  double x0 = 0.0;

  StateSpace state_space() const noexcept {
    return beta == 0.0 ? StateSpace::RealLine : StateSpace::PositiveHalfLine;
  }
  bool in_state_space(double y) const noexcept;

  /// |y|^beta with the convention 0^0 = 1.
  double y_pow_beta(double y) const noexcept;

  /// Drift of the tilted factor Y^p: (m - y) + rho p sigma(y) nu y^beta.
  double tilted_drift(double p, double y) const noexcept;

  /// Half the squared diffusion coefficient: nu^2 |y|^{2 beta} / 2.
  double half_diffusion_sq(double y) const noexcept;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// delta = eps^r with r in {2, 4}.
class Regime {
 public:
  explicit Regime(int r);
  int exponent() const noexcept { return r_; }
  double delta(double eps) const noexcept;
  friend bool operator==(Regime, Regime) = default;

 private:
  int r_;
};

struct ClauseResult {
  std::string id;
  bool pass = false;
  std::string message;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;
  bool passed() const noexcept;
  const ClauseResult* find(const std::string& id) const noexcept;
};

/// Checks every clause of the well-posedness assumption plus basic parameter sanity.
/// Never throws; failures are reported per clause.
ValidationReport validate(const ModelParams& params);

enum class BoundaryClass { Inaccessible, Accessible };

struct BoundaryReport {
  BoundaryClass verdict = BoundaryClass::Accessible;
  /// S(2^-k) for k = 1..40, stored as log(-S) so that double overflow cannot occur.
  std::vector<double> log_minus_scale;
  /// Local power-law exponent of the scale density at 2^-k (s ~ y^-a).
  std::vector<double> local_exponent;
};

/// Classifies the left boundary y = 0 of E0 via divergence of S(eps) = int_1^eps s(y) dy.
/// Throws NotApplicable when beta = 0.
BoundaryReport boundary_report(const ModelParams& params);
BoundaryClass boundary_classification(const ModelParams& params);

/// log s(y) for the untilted factor, anchored so that s(1) = 1 (closed form).
double log_base_scale(const ModelParams& params, double y);

/// sigma(y) with the domain check y in E0; throws DomainError otherwise.
double sigma_eval(const VolFnSpec& spec, double y, StateSpace space);

/// Flat key/value serialization with canonical keys
/// m, nu, beta, rho, rate, sigma.kind, sigma.s0, sigma.c, sigma.q, sigma.a, sigma.growth, y0, x0
/// (tabulated sigma adds sigma.grid and sigma.values as comma lists).
std::map<std::string, std::string> to_key_values(const ModelParams& params);
ModelParams from_key_values(const std::map<std::string, std::string>& kv);

/// Keys that belong to the model document.
bool is_model_key(const std::string& key);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
/// Parses a number for the named key; ValidationError on malformed text.
double parse_number(const std::string& key, const std::string& text);
/// Comma-separated numbers.
std::vector<double> parse_number_list(const std::string& key, const std::string& text);
std::string format_list(const std::vector<double>& xs);

}  // namespace svasym
