#include "svasym/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double table_lookup(const TabulatedVol& t, double growth, double y) {
  const auto& g = t.grid;
  const auto& v = t.values;
  if (g.empty()) return 0.0;
  if (g.size() == 1 || y <= g.front()) {
    if (y == g.front()) return v.front();
    return v.front() * std::pow((1.0 + std::abs(y)) / (1.0 + std::abs(g.front())), growth);
  }
  if (y >= g.back()) {
    return v.back() * std::pow((1.0 + std::abs(y)) / (1.0 + std::abs(g.back())), growth);
  }
  auto it = std::upper_bound(g.begin(), g.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - g.begin());
  const double w = (y - g[i - 1]) / (g[i] - g[i - 1]);
  return (1.0 - w) * v[i - 1] + w * v[i];
}

ClauseResult clause(std::string id, bool pass, std::string message) {
  return ClauseResult{std::move(id), pass, std::move(message)};
}

// Sampled check of sigma(y) <= C (1 + |y|^g): the envelope ratio far out must not
// exceed the ratio seen on the bulk by more than a modest factor.
bool growth_sampled_ok(const VolFnSpec& s, double g, bool real_line) {
  double bulk = 0.0;
  double far = 0.0;
  for (int k = -40; k <= 120; ++k) {
    const double y = std::pow(10.0, k / 10.0);
    for (double sy : {y, real_line ? -y : y}) {
      const double v = s(sy);
      if (!std::isfinite(v) || v < 0.0) return false;
      const double ratio = v / (1.0 + std::pow(std::abs(sy), g));
      if (k <= 60)
        bulk = std::max(bulk, ratio);
      else
        far = std::max(far, ratio);
    }
  }
  return far <= 1.5 * std::max(bulk, 1e-300);
}

std::string kind_tag(const VolFnSpec& s) { return s.kind_name(); }

const std::set<std::string>& model_keys() {
  static const std::set<std::string> keys = {
      "m",       "nu",      "beta",    "rho",          "rate",          "sigma.kind",
      "sigma.s0", "sigma.c", "sigma.q", "sigma.a",      "sigma.growth",  "sigma.grid",
      "sigma.values", "y0",  "x0"};
  return keys;
}

}  // namespace

VolFnSpec VolFnSpec::constant(double s0) { return VolFnSpec(ConstantVol{s0}, 0.0); }

VolFnSpec VolFnSpec::power_abs(double c, double q, double a) {
  return VolFnSpec(PowerAbsVol{c, q, a}, q);
}

VolFnSpec VolFnSpec::tabulated(std::vector<double> grid, std::vector<double> values,
                               double growth_exponent) {
  return VolFnSpec(TabulatedVol{std::move(grid), std::move(values)}, growth_exponent);
}

VolFnSpec VolFnSpec::with_growth(double growth_exponent) const {
  VolFnSpec out = *this;
  out.growth_ = growth_exponent;
  return out;
}

const char* VolFnSpec::kind_name() const noexcept {
  return std::visit(overloaded{[](const ConstantVol&) { return "constant"; },
                               [](const PowerAbsVol&) { return "power_abs"; },
                               [](const TabulatedVol&) { return "tabulated"; }},
                    kind_);
}

double VolFnSpec::operator()(double y) const noexcept {
  return std::visit(
      overloaded{[](const ConstantVol& k) { return k.s0; },
                 [y](const PowerAbsVol& k) {
                   if (k.q == 0.0) return k.c;
                   if (k.q == 0.5) return k.c * std::sqrt(k.a + std::abs(y));
                   return k.c * std::pow(k.a + std::abs(y), k.q);
                 },
                 [this, y](const TabulatedVol& k) { return table_lookup(k, growth_, y); }},
      kind_);
}

std::vector<double> VolFnSpec::breakpoints() const {
  return std::visit(overloaded{[](const ConstantVol&) { return std::vector<double>{}; },
                               [](const PowerAbsVol& k) {
                                 return k.q == 0.0 ? std::vector<double>{}
                                                   : std::vector<double>{0.0};
                               },
                               [](const TabulatedVol& k) { return k.grid; }},
                    kind_);
}

bool ModelParams::in_state_space(double y) const noexcept {
  if (!std::isfinite(y)) return false;
  return state_space() == StateSpace::RealLine || y > 0.0;
}

double ModelParams::y_pow_beta(double y) const noexcept {
  if (beta == 0.0) return 1.0;
  if (beta == 0.5) return std::sqrt(std::abs(y));
  return std::pow(std::abs(y), beta);
}

double ModelParams::tilted_drift(double p, double y) const noexcept {
  const double base = m - y;
  if (p == 0.0 || rho == 0.0) return base;
  return base + rho * p * sigma(y) * nu * y_pow_beta(y);
}

double ModelParams::half_diffusion_sq(double y) const noexcept {
  const double yb = y_pow_beta(y);
  return 0.5 * nu * nu * yb * yb;
}

Regime::Regime(int r) : r_(r) {
  if (r != 2 && r != 4) throw ValidationError(fmt::format("regime must be 2 or 4, got {}", r));
}

double Regime::delta(double eps) const noexcept { return r_ == 2 ? eps * eps : eps * eps * eps * eps; }

bool ValidationReport::passed() const noexcept {
  return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.pass; });
}

const ClauseResult* ValidationReport::find(const std::string& id) const noexcept {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

ValidationReport validate(const ModelParams& p) {
  ValidationReport rep;
  const double b = p.beta;

  const bool beta_ok = b == 0.0 || (b >= 0.5 && b < 1.0);
  rep.clauses.push_back(clause("assumption-1.1", beta_ok,
                               beta_ok ? fmt::format("beta = {} is admissible", b)
                                       : fmt::format("beta = {} is not in {{0}} U [1/2, 1)", b)));

  {
    bool ok = true;
    std::string msg;
    if (b == 0.0) {
      msg = "no boundary condition for beta = 0";
    } else if (b == 0.5) {
      const double half_nu2 = 0.5 * p.nu * p.nu;
      if (!(p.m > half_nu2)) {
        ok = false;
        msg = fmt::format("beta = 1/2 requires m > nu^2/2 = {}, got m = {}", half_nu2, p.m);
      } else if (!(p.y0 > 0.0)) {
        ok = false;
        msg = fmt::format("beta = 1/2 requires y0 > 0, got {}", p.y0);
      } else {
        msg = fmt::format("m = {} > nu^2/2 = {} and y0 > 0", p.m, half_nu2);
      }
    } else if (beta_ok) {
      if (!(p.m > 0.0)) {
        ok = false;
        msg = fmt::format("1/2 < beta < 1 requires m > 0, got m = {}", p.m);
      } else if (!(p.y0 > 0.0)) {
        ok = false;
        msg = fmt::format("1/2 < beta < 1 requires y0 > 0, got {}", p.y0);
      } else {
        msg = "m > 0 and y0 > 0";
      }
    } else {
      ok = false;
      msg = "not checked: beta is inadmissible";
    }
    rep.clauses.push_back(clause("assumption-1.2", ok, msg));
  }

  {
    const double g = p.sigma.growth_exponent();
    const double cap = 1.0 - b;
    bool ok = std::isfinite(g) && g >= 0.0 && g < cap;
    std::string msg;
    if (!ok) {
      msg = fmt::format("sigma growth exponent {} violates 0 <= g < 1 - beta = {}", g, cap);
    } else if (!growth_sampled_ok(p.sigma, g, b == 0.0)) {
      ok = false;
      msg = fmt::format("sampled sigma exceeds C(1 + |y|^{}) envelope or is not finite", g);
    } else {
      msg = fmt::format("0 <= {} < {}", g, cap);
    }
    rep.clauses.push_back(clause("assumption-1.3", ok, msg));
  }

  rep.clauses.push_back(clause("nu", std::isfinite(p.nu) && p.nu > 0.0,
                               fmt::format("nu = {} must be positive", p.nu)));
  rep.clauses.push_back(clause("rho", std::isfinite(p.rho) && std::abs(p.rho) < 1.0,
                               fmt::format("rho = {} must lie in (-1, 1)", p.rho)));
  rep.clauses.push_back(clause("rate", std::isfinite(p.rate) && p.rate >= 0.0,
                               fmt::format("r = {} must be nonnegative", p.rate)));
  rep.clauses.push_back(clause("m", std::isfinite(p.m), fmt::format("m = {} must be finite", p.m)));
  rep.clauses.push_back(
      clause("x0", std::isfinite(p.x0), fmt::format("x0 = {} must be finite", p.x0)));
  rep.clauses.push_back(clause("y0", p.in_state_space(p.y0),
                               fmt::format("y0 = {} must lie in the state space", p.y0)));

  {
    bool ok = true;
    std::string msg = "ok";
    std::visit(overloaded{[&](const ConstantVol& k) {
                            if (!(k.s0 > 0.0) || !std::isfinite(k.s0)) {
                              ok = false;
                              msg = fmt::format("constant sigma needs s0 > 0, got {}", k.s0);
                            }
                          },
                          [&](const PowerAbsVol& k) {
                            if (!(k.c > 0.0) || !(k.q >= 0.0 && k.q < 1.0) || !(k.a >= 0.0)) {
                              ok = false;
                              msg = fmt::format(
                                  "power_abs sigma needs c > 0, q in [0,1), a >= 0; got c={}, "
                                  "q={}, a={}",
                                  k.c, k.q, k.a);
                            }
                          },
                          [&](const TabulatedVol& k) {
                            if (k.grid.size() < 2 || k.grid.size() != k.values.size()) {
                              ok = false;
                              msg = "tabulated sigma needs >= 2 nodes and matching values";
                              return;
                            }
                            for (std::size_t i = 0; i < k.grid.size(); ++i) {
                              if (!std::isfinite(k.grid[i]) || !std::isfinite(k.values[i]) ||
                                  k.values[i] < 0.0 ||
                                  (i > 0 && !(k.grid[i] > k.grid[i - 1]))) {
                                ok = false;
                                msg = "tabulated sigma needs an increasing grid and values >= 0";
                                return;
                              }
                            }
                          }},
               p.sigma.kind());
    rep.clauses.push_back(clause("sigma", ok, msg));
  }
  return rep;
}

double log_base_scale(const ModelParams& p, double y) {
  const double k = 2.0 / (p.nu * p.nu);
  auto anti = [&](double z) {
    if (p.beta == 0.0) return k * (p.m * z - 0.5 * z * z);
    if (p.beta == 0.5) return k * (p.m * std::log(z) - z);
    const double a = 1.0 - 2.0 * p.beta;
    const double c = 2.0 - 2.0 * p.beta;
    return k * (p.m * std::pow(z, a) / a - std::pow(z, c) / c);
  };
  return -(anti(y) - anti(1.0));
}

BoundaryReport boundary_report(const ModelParams& p) {
  if (p.beta == 0.0) throw NotApplicable("beta = 0: the state space is the real line");
  using boost::math::quadrature::gauss_kronrod;
  BoundaryReport rep;
  // -S(2^-k) = int_{2^-k}^1 s(y) dy accumulated dyadic piece by piece in log space.
  double acc = -std::numeric_limits<double>::infinity();
  constexpr int kMax = 40;
  for (int k = 1; k <= kMax; ++k) {
    const double lo = std::ldexp(1.0, -k);
    const double ulo = std::log(lo);
    const double uhi = std::log(2.0 * lo);
    double shift = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 32; ++j) {
      const double u = ulo + (uhi - ulo) * j / 32.0;
      shift = std::max(shift, log_base_scale(p, std::exp(u)) + u);
    }
    auto f = [&](double u) { return std::exp(log_base_scale(p, std::exp(u)) + u - shift); };
    const double piece = gauss_kronrod<double, 31>::integrate(f, ulo, uhi, 8, 1e-12);
    const double lp = std::log(piece) + shift;
    const double hi = std::max(acc, lp);
    acc = hi + std::log(std::exp(acc - hi) + std::exp(lp - hi));
    rep.log_minus_scale.push_back(acc);
    const double yk = lo;
    const double yb2 = std::pow(yk, 2.0 * p.beta);
    rep.local_exponent.push_back(yk * 2.0 * (p.m - yk) / (p.nu * p.nu * yb2));
  }

  const double threshold = std::log(1e6);
  bool diverged = false;
  for (int k = 5; k <= kMax && !diverged; ++k) {
    if (rep.log_minus_scale[k - 1] <= threshold) continue;
    bool monotone = true;
    for (int j = k - 4; j < k; ++j)
      if (!(rep.log_minus_scale[j] > rep.log_minus_scale[j - 1])) monotone = false;
    diverged = monotone;
  }
  // s ~ y^-a with a >= 1 near zero is not integrable, even if S stays below the threshold.
  if (!diverged) {
    const auto& a = rep.local_exponent;
    bool nondecreasing = true;
    for (int j = kMax - 4; j < kMax; ++j)
      if (a[j] < a[j - 1] - 1e-12) nondecreasing = false;
    diverged = nondecreasing && a.back() >= 1.0 - 1e-9;
  }
  rep.verdict = diverged ? BoundaryClass::Inaccessible : BoundaryClass::Accessible;
  return rep;
}

BoundaryClass boundary_classification(const ModelParams& params) {
  return boundary_report(params).verdict;
}

double sigma_eval(const VolFnSpec& spec, double y, StateSpace space) {
  if (!std::isfinite(y) || (space == StateSpace::PositiveHalfLine && !(y > 0.0))) {
    throw DomainError(fmt::format("y = {} is outside the state space", y));
  }
  return spec(y);
}

std::string format_double(double v) { return fmt::format("{}", v); }

double parse_number(const std::string& key, const std::string& text) {
  std::string t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  std::size_t b = 0;
  while (b < t.size() && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
  if (b < t.size() && t[b] == '+') ++b;
  double v = 0.0;
  const char* first = t.data() + b;
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ValidationError(fmt::format("key '{}': '{}' is not a number", key, text));
  }
  return v;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_number(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}


bool is_model_key(const std::string& key) { return model_keys().count(key) > 0; }

std::map<std::string, std::string> to_key_values(const ModelParams& p) {
  std::map<std::string, std::string> kv;
  kv["m"] = format_double(p.m);
  kv["nu"] = format_double(p.nu);
  kv["beta"] = format_double(p.beta);
  kv["rho"] = format_double(p.rho);
  kv["rate"] = format_double(p.rate);
  kv["sigma.kind"] = kind_tag(p.sigma);
  kv["sigma.growth"] = format_double(p.sigma.growth_exponent());
  std::visit(overloaded{[&](const ConstantVol& k) { kv["sigma.s0"] = format_double(k.s0); },
                        [&](const PowerAbsVol& k) {
                          kv["sigma.c"] = format_double(k.c);
                          kv["sigma.q"] = format_double(k.q);
                          kv["sigma.a"] = format_double(k.a);
                        },
                        [&](const TabulatedVol& k) {
                          kv["sigma.grid"] = format_list(k.grid);
                          kv["sigma.values"] = format_list(k.values);
                        }},
             p.sigma.kind());
  kv["y0"] = format_double(p.y0);
  kv["x0"] = format_double(p.x0);
  return kv;
}

ModelParams from_key_values(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv)
    if (!is_model_key(k)) throw UnknownKeyError(k);

  auto num = [&](const char* key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_number(key, it->second);
  };

  ModelParams p;
  p.m = num("m", p.m);
  p.nu = num("nu", p.nu);
  p.beta = num("beta", p.beta);
  p.rho = num("rho", p.rho);
  p.rate = num("rate", p.rate);
  p.y0 = num("y0", p.y0);
  p.x0 = num("x0", p.x0);

  auto kind_it = kv.find("sigma.kind");
  const std::string kind = kind_it == kv.end() ? "constant" : kind_it->second;
  const bool has_growth = kv.count("sigma.growth") > 0;
  if (kind == "constant") {
    p.sigma = VolFnSpec::constant(num("sigma.s0", 0.2));
  } else if (kind == "power_abs") {
    p.sigma = VolFnSpec::power_abs(num("sigma.c", 1.0), num("sigma.q", 0.0), num("sigma.a", 0.0));
  } else if (kind == "tabulated") {
    auto g = kv.find("sigma.grid");
    auto v = kv.find("sigma.values");
    if (g == kv.end() || v == kv.end())
      throw ValidationError("tabulated sigma needs sigma.grid and sigma.values");
    p.sigma = VolFnSpec::tabulated(parse_number_list("sigma.grid", g->second),
                                   parse_number_list("sigma.values", v->second), 0.0);
  } else {
    throw ValidationError(fmt::format("sigma.kind '{}' is not one of constant, power_abs, tabulated", kind));
  }
  if (has_growth) p.sigma = p.sigma.with_growth(num("sigma.growth", 0.0));
  return p;
}

}  // namespace svasym
