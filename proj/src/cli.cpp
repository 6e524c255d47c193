#include "svasym/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "svasym/acceptance.hpp"
#include "svasym/csv.hpp"
#include "svasym/errors.hpp"
#include "svasym/hamiltonian.hpp"
#include "svasym/poisson.hpp"
#include "svasym/rates.hpp"
#include "svasym/verify.hpp"

namespace svasym {

using nlohmann::json;

namespace {

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys = {
      "regime",        "t",           "grid.points",    "grid.lo",
      "grid.hi",       "grid.tail_tolerance", "p_grid", "x_grid",
      "logK_grid",     "mc.paths",    "mc.steps_per_unit_time", "mc.seed",
      "mc.scheme",     "mc.per_step_increments", "output", "hamiltonian.method",
      "hamiltonian.horizon", "poisson.p", "ldp.x", "ldp.eps",
      "simulate.eps"};
  return keys;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
    throw ValidationError(fmt::format("key '{}': '{}' is not a non-negative integer", key, text));
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError(fmt::format("key '{}': '{}' is not true or false", key, text));
}

void require_sorted(const std::string& key, const std::vector<double>& v) {
  if (v.empty()) throw ValidationError(fmt::format("key '{}': grid is empty", key));
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) throw ValidationError(fmt::format("key '{}': grid must be strictly increasing", key));
  }
}

void write_json(const std::filesystem::path& file, const json& j) { write_text_file(file, j.dump(2) + "\n"); }

class Emitter {
 public:
  Emitter(std::filesystem::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  void csv(const std::string& name, const CsvTable& t, const std::string& summary) {
    t.save(dir_ / name);
    line(name, summary);
  }
  void json_file(const std::string& name, const json& j, const std::string& summary) {
    write_json(dir_ / name, j);
    line(name, summary);
  }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void line(const std::string& name, const std::string& summary) {
    out_ << "wrote " << (dir_ / name).string() << ": " << summary << "\n";
  }

 private:
  std::filesystem::path dir_;
  std::ostream& out_;
};

json validation_json(const ModelParams& model) {
  const ValidationReport rep = validate(model);
  json clauses = json::array();
  for (const auto& c : rep.clauses) clauses.push_back({{"id", c.id}, {"pass", c.pass}, {"message", c.message}});
  json j = {{"passed", rep.passed()}, {"clauses", clauses}};
  if (model.beta != 0.0 && rep.passed()) {
    j["boundary"] = boundary_classification(model) == BoundaryClass::Inaccessible ? "inaccessible" : "accessible";
  }
  return j;
}

std::vector<double> logk_grid(const RunConfig& c) {
  return c.logk_grid.empty() ? default_x_grid(c.model.x0) : c.logk_grid;
}

double min_spacing(const std::vector<double>& v) {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) h = std::min(h, v[i + 1] - v[i]);
  return std::isfinite(h) ? h : 0.0;
}

CurveOptions curve_options(const RunConfig& c) {
  CurveOptions o;
  o.grid = c.grid;
  o.mc = c.mc;
  o.mc_options.horizon = c.horizon;
  o.mc_options.grid = c.grid;
  return o;
}

HamiltonianCurve curve_for(const RunConfig& c) {
  const auto p = c.p_grid.empty() ? default_p_grid() : c.p_grid;
  return build_curve(c.model, p, parse_method(c.method), curve_options(c));
}

RateFunction rate_for(const RunConfig& c, int regime) {
  const double sb = sigma_bar_sq(c.model, c.grid);
  if (regime == 4) return RateFunction::ultra_fast(c.model.x0, c.t, sb);
  auto l = std::make_shared<const LegendreCurve>(legendre(curve_for(c)));
  return RateFunction::fast(c.model.x0, c.t, std::move(l), sb);
}

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<unsigned> threads;
  std::optional<int> regime;
  std::optional<double> t;
  std::optional<double> p;
  std::optional<double> x;
  std::optional<double> eps;
  std::optional<std::string> method;
  std::optional<double> horizon;
  std::optional<std::size_t> points;
  std::size_t record = 0;
  std::vector<std::string> only;
};

void add_common(CLI::App* sub, Overrides& o, bool config_required) {
  auto* opt = sub->add_option("--config", o.config, "run configuration file");
  if (config_required) opt->required();
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--paths", o.paths, "Monte Carlo paths");
  sub->add_option("--threads", o.threads, "worker threads (0 = SVASYM_THREADS or hardware)");
  sub->add_option("--regime", o.regime, "regime exponent (2 or 4)");
  sub->add_option("--t", o.t, "scaled time");
  sub->add_option("--points", o.points, "grid points");
}

}  // namespace

std::vector<double> default_p_grid() { return symmetric_grid(4.0, 16); }

std::vector<double> default_x_grid(double x0) {
  std::vector<double> x(101);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0 - 0.5 + 0.01 * static_cast<double>(i);
  x[50] = x0;
  return x;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> model_kv;
  std::map<std::string, std::pair<std::string, std::size_t>> run_kv;
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, fmt::format("expected 'key = value', got '{}'", line));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");
    if (value.empty()) throw ParseError(line_no, fmt::format("missing value for key '{}'", key));
    if (model_kv.count(key) || run_kv.count(key)) throw ParseError(line_no, fmt::format("duplicate key '{}'", key));
    if (is_model_key(key)) {
      model_kv[key] = value;
    } else if (run_keys().count(key)) {
      run_kv[key] = {value, line_no};
    } else {
      throw UnknownKeyError(key);
    }
  }

  RunConfig c;
  c.model = from_key_values(model_kv);
  if (c.model.beta != 0.0 && !model_kv.count("y0")) {
    throw ValidationError("Assumption 1(2): y0 is required and must be positive when beta > 0");
  }
  for (const auto& [key, entry] : run_kv) {
    const std::string& v = entry.first;
    if (key == "regime") {
      const double r = parse_number(key, v);
      if (r != 2.0 && r != 4.0) throw ValidationError(fmt::format("key 'regime': must be 2 or 4, got {}", v));
      c.regime = static_cast<int>(r);
    } else if (key == "t") {
      c.t = parse_number(key, v);
    } else if (key == "grid.points") {
      c.grid.points = parse_count(key, v);
    } else if (key == "grid.lo") {
      c.grid.lo = parse_number(key, v);
    } else if (key == "grid.hi") {
      c.grid.hi = parse_number(key, v);
    } else if (key == "grid.tail_tolerance") {
      c.grid.tail_tolerance = parse_number(key, v);
    } else if (key == "p_grid") {
      c.p_grid = parse_number_list(key, v);
      require_sorted(key, c.p_grid);
    } else if (key == "x_grid") {
      c.x_grid = parse_number_list(key, v);
      require_sorted(key, c.x_grid);
    } else if (key == "logK_grid") {
      c.logk_grid = parse_number_list(key, v);
      require_sorted(key, c.logk_grid);
    } else if (key == "mc.paths") {
      c.mc.paths = parse_count(key, v);
    } else if (key == "mc.steps_per_unit_time") {
      c.mc.steps_per_unit_time = parse_count(key, v);
    } else if (key == "mc.seed") {
      c.mc.seed = parse_count(key, v);
    } else if (key == "mc.scheme") {
      c.mc.scheme = parse_scheme(v);
    } else if (key == "mc.per_step_increments") {
      c.mc.per_step_increments = parse_bool(key, v);
    } else if (key == "output") {
      c.output = v;
    } else if (key == "hamiltonian.method") {
      parse_method(v);
      c.method = v;
    } else if (key == "hamiltonian.horizon") {
      c.horizon = parse_number(key, v);
    } else if (key == "poisson.p") {
      c.p = parse_number(key, v);
    } else if (key == "ldp.x") {
      c.ldp_x = parse_number(key, v);
    } else if (key == "ldp.eps") {
      c.eps = parse_number_list(key, v);
    } else if (key == "simulate.eps") {
      c.sim_eps = parse_number(key, v);
    }
  }
  if (!(c.t > 0.0)) throw ValidationError("key 't': must be positive");
  if (c.grid.points < 5) throw ValidationError("key 'grid.points': need at least 5");
  if (c.mc.paths < 1) throw ValidationError("key 'mc.paths': need at least one path");
  if (c.mc.steps_per_unit_time < 1) throw ValidationError("key 'mc.steps_per_unit_time': must be positive");
  if (!(c.grid.tail_tolerance > 0.0)) throw ValidationError("key 'grid.tail_tolerance': must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError(fmt::format("config file '{}' not found", path.string()));
  return parse_config(read_text_file(path));
}

std::string write_config(const RunConfig& c) {
  std::string s;
  auto put = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  for (const auto& [k, v] : to_key_values(c.model)) put(k, v);
  put("regime", std::to_string(c.regime));
  put("t", format_double(c.t));
  put("grid.points", std::to_string(c.grid.points));
  if (c.grid.lo) put("grid.lo", format_double(*c.grid.lo));
  if (c.grid.hi) put("grid.hi", format_double(*c.grid.hi));
  put("grid.tail_tolerance", format_double(c.grid.tail_tolerance));
  if (!c.p_grid.empty()) put("p_grid", format_list(c.p_grid));
  if (!c.x_grid.empty()) put("x_grid", format_list(c.x_grid));
  if (!c.logk_grid.empty()) put("logK_grid", format_list(c.logk_grid));
  put("mc.paths", std::to_string(c.mc.paths));
  put("mc.steps_per_unit_time", std::to_string(c.mc.steps_per_unit_time));
  put("mc.seed", std::to_string(c.mc.seed));
  put("mc.scheme", scheme_name(c.mc.scheme));
  put("mc.per_step_increments", c.mc.per_step_increments ? "true" : "false");
  put("output", c.output.string());
  put("hamiltonian.method", c.method);
  put("hamiltonian.horizon", format_double(c.horizon));
  put("poisson.p", format_double(c.p));
  if (c.ldp_x) put("ldp.x", format_double(*c.ldp_x));
  put("ldp.eps", format_list(c.eps));
  put("simulate.eps", format_double(c.sim_eps));
  return s;
}

namespace {

int run_command(const std::string& name, RunConfig& c, const Overrides& o, std::ostream& out, std::ostream& err) {
  Emitter emit(c.output, out);

  if (name == "validate") {
    const json j = validation_json(c.model);
    emit.json_file("validation.json", j, j["passed"].get<bool>() ? "all clauses pass" : "validation failed");
    if (!j["passed"].get<bool>()) {
      for (const auto& cl : j["clauses"])
        if (!cl["pass"].get<bool>()) err << cl["id"].get<std::string>() << ": " << cl["message"].get<std::string>() << "\n";
      return 1;
    }
    return 0;
  }

  const ValidationReport rep = validate(c.model);
  if (!rep.passed()) {
    for (const auto& cl : rep.clauses)
      if (!cl.pass) err << cl.id << ": " << cl.message << "\n";
    return 1;
  }

  if (name == "invariant") {
    const DensityTable d = invariant_density(c.model, 0.0, c.grid);
    emit.csv("invariant.csv", d.to_csv(), fmt::format("{} nodes", d.grid().size()));
    const json j = {{"points", d.grid().size()},   {"lo", d.grid().lo()}, {"hi", d.grid().hi()},
                    {"tail_mass", d.tail_mass()}, {"integral", d.integral()},
                    {"mode", d.grid()[d.mode_index()]}};
    emit.json_file("invariant.json", j, fmt::format("window [{}, {}]", d.grid().lo(), d.grid().hi()));
  } else if (name == "sigma-bar") {
    const QuadratureValue q = sigma_bar_sq_estimate(c.model, c.grid);
    out << "sigma_bar_sq = " << format_double(q.value) << "\n";
    emit.json_file("sigma_bar.json", {{"sigma_bar_sq", q.value}, {"error", q.error}, {"points", q.points}},
                   fmt::format("sigma_bar_sq={}", format_double(q.value)));
  } else if (name == "poisson") {
    const Corrector cor = solve_corrector(c.model, c.p, c.grid);
    const double res = corrector_residual(c.model, cor);
    emit.csv("corrector.csv", cor.to_csv(), fmt::format("{} nodes", cor.grid->size()));
    json growth;
    try {
      const GrowthReport g = growth_bound_check(cor, c.model);
      growth = {{"c1", g.c1}, {"pass", g.pass}, {"trivial", g.trivial}};
    } catch (const NotApplicable& e) {
      growth = {{"not_applicable", e.what()}};
    }
    emit.json_file("poisson.json",
                   {{"p", c.p}, {"sigma_bar_sq", cor.sigma_bar_sq}, {"residual", res}, {"growth", growth}},
                   fmt::format("residual={:.3g}", res));
  } else if (name == "hamiltonian") {
    const HamiltonianCurve curve = curve_for(c);
    const LegendreCurve l = legendre(curve);
    emit.csv("hamiltonian.csv", curve.to_csv(), fmt::format("{} momenta ({})", curve.p.size(), c.method));
    emit.csv("legendre.csv", l.to_csv(), fmt::format("{} slopes", l.q().size()));
    json j = {{"method", c.method},
              {"convexity_violation", curve.convexity_violation},
              {"flagged", curve.flagged.size()}};
    if (curve.method == HamiltonianMethod::MonteCarlo) {
      j["seed"] = curve.seed;
      j["paths"] = c.mc.paths;
      j["horizon"] = c.horizon;
    }
    emit.json_file("hamiltonian.json", j, fmt::format("convexity violation {:.3g}", curve.convexity_violation));
  } else if (name == "rate") {
    const auto x = c.x_grid.empty() ? default_x_grid(c.model.x0) : c.x_grid;
    const RateFunction r = rate_for(c, c.regime);
    const RateCurve curve = rate_curve(r, x);
    emit.csv("rate.csv", curve.to_csv(), fmt::format("I{} on {} points", c.regime, x.size()));
    std::size_t extrapolated = 0;
    for (double xi : x) extrapolated += r.extrapolated(xi);
    if (c.regime == 2) {
      const RateFunction r4 = RateFunction::ultra_fast(c.model.x0, c.t, r.sigma_bar_sq());
      const RegimeComparison cmp = regime_compare(c.model, r, r4, x);
      emit.csv("compare.csv", cmp.to_csv(), cmp.checked ? (cmp.all_ordered ? "I2 <= I4 everywhere" : "I2 > I4 somewhere")
                                                        : "unchecked (rho != 0)");
    }
    emit.json_file("rate.json",
                   {{"regime", c.regime},
                    {"x0", c.model.x0},
                    {"t", c.t},
                    {"sigma_bar_sq", r.sigma_bar_sq()},
                    {"extrapolated_points", extrapolated},
                    {"convexity_violation", curve.convexity_violation()}},
                   fmt::format("sigma_bar_sq={}", format_double(r.sigma_bar_sq())));
  } else if (name == "price") {
    const auto k = logk_grid(c);
    const RateFunction r = rate_for(c, c.regime);
    const double res = min_spacing(k);
    CsvTable t({"logK", "value", "side", "atm_warning"});
    std::size_t warnings = 0;
    for (double lk : k) {
      const PriceAsymptote a = option_price_log_asymptote(lk, r, res);
      warnings += a.atm_warning;
      t.add_row({csv_number(lk), csv_number(a.value), a.side == OptionSide::Call ? "call" : "put",
                 a.atm_warning ? "ATMWarning" : ""});
    }
    emit.csv("price.csv", t, fmt::format("{} strikes, {} ATM warnings", k.size(), warnings));
  } else if (name == "smile") {
    const auto k = logk_grid(c);
    const RateFunction r = rate_for(c, c.regime);
    const SmileCurve s = implied_vol_curve(r, k, min_spacing(k));
    emit.csv("smile.csv", s.to_csv(), fmt::format("regime {}, {} strikes", c.regime, k.size()));
    json j = {{"regime", c.regime}, {"atm_value", s.atm_value}, {"t", c.t}};
    if (c.regime == 2) {
      try {
        const AtmProbe probe = atm_conjecture_probe(r, {0.2, 0.1, 0.05, 0.02, 0.01});
        emit.csv("atm_probe.csv", probe.to_csv(), probe.label);
        j["atm_probe_trend"] = probe.trends_to_sigma_bar;
      } catch (const ResolutionError& e) {
        j["atm_probe_error"] = e.what();
      }
    }
    emit.json_file("smile.json", j, fmt::format("atm value {}", format_double(s.atm_value)));
  } else if (name == "simulate") {
    PathRecording rec;
    const PathRecording* recp = nullptr;
    if (o.record > 0) {
      rec.file = emit.path("paths.bin");
      rec.paths = o.record;
      recp = &rec;
    }
    const PathBatch b = simulate_xy(c.model, Regime(c.regime), c.sim_eps, c.t, c.mc, recp);
    emit.csv("summary.csv", b.summary_csv(), fmt::format("{} paths, seed {}", b.paths(), b.seed));
    if (recp) emit.line("paths.bin", fmt::format("{} recorded paths", std::min(o.record, b.paths())));
    emit.json_file("simulate.json",
                   {{"seed", b.seed},
                    {"scheme", scheme_name(c.mc.scheme)},
                    {"regime", c.regime},
                    {"eps", c.sim_eps},
                    {"t", c.t},
                    {"paths", b.paths()},
                    {"steps_per_path", b.steps_per_path},
                    {"per_step_increments", c.mc.per_step_increments || recp != nullptr}},
                   fmt::format("seed {}", b.seed));
  } else if (name == "verify-ldp") {
    const double x = c.ldp_x.value_or(c.model.x0 + 0.15);
    const RateFunction r = rate_for(c, c.regime);
    const LdpReport rep2 = ldp_tail(c.model, r, x, c.eps, c.mc);
    emit.csv("ldp.csv", rep2.to_csv(), fmt::format("{} eps values", rep2.points.size()));
    emit.json_file("ldp.json",
                   {{"regime", c.regime},
                    {"x", x},
                    {"x0", c.model.x0},
                    {"t", c.t},
                    {"predicted", rep2.predicted},
                    {"monotone_trend", rep2.monotone_trend},
                    {"spearman", rep2.spearman},
                    {"final_within", rep2.final_within},
                    {"final_tolerance", rep2.final_tolerance},
                    {"pass", rep2.pass},
                    {"seed", c.mc.seed},
                    {"paths", c.mc.paths}},
                   rep2.pass ? "trend PASS" : "trend FAIL");
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-time asymptotics for fast mean-reverting stochastic volatility", "svasym"};
  app.require_subcommand(1, 1);
  Overrides o;
  const std::vector<std::string> names = {"validate", "invariant", "sigma-bar",  "poisson", "hamiltonian", "rate",
                                          "price",    "smile",     "simulate",   "verify-ldp", "accept"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n);
    add_common(sub, o, n != "accept");
    subs[n] = sub;
  }
  subs["poisson"]->add_option("--p", o.p, "momentum");
  subs["hamiltonian"]->add_option("--method", o.method, "eigen, mc or closed_form");
  subs["hamiltonian"]->add_option("--horizon", o.horizon, "Monte Carlo horizon");
  for (const char* n : {"rate", "price", "smile", "verify-ldp"}) {
    subs[n]->add_option("--method", o.method, "Hamiltonian method for regime 2");
  }
  subs["verify-ldp"]->add_option("--x", o.x, "tail level");
  subs["simulate"]->add_option("--eps", o.eps, "scale parameter");
  subs["simulate"]->add_option("--record", o.record, "record this many raw paths to paths.bin");
  subs["accept"]->add_option("--only", o.only, "criterion ids to run")->delimiter(',');

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  RunConfig c;
  try {
    if (!o.config.empty()) c = load_config(o.config);
  } catch (const ParseError& e) {
    err << o.config << ": " << e.what() << "\n";
    return 2;
  } catch (const UnknownKeyError& e) {
    err << o.config << ": " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << o.config << ": " << e.what() << "\n";
    return 1;
  }
  if (o.out) c.output = *o.out;
  if (o.seed) c.mc.seed = *o.seed;
  if (o.paths) c.mc.paths = *o.paths;
  if (o.threads) c.mc.threads = *o.threads;
  if (o.regime) {
    if (*o.regime != 2 && *o.regime != 4) {
      err << "usage error: --regime must be 2 or 4\n";
      return 2;
    }
    c.regime = *o.regime;
  }
  if (o.t) c.t = *o.t;
  if (o.p) c.p = *o.p;
  if (o.x) c.ldp_x = *o.x;
  if (o.eps) c.sim_eps = *o.eps;
  if (o.method) c.method = *o.method;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.points) c.grid.points = *o.points;

  try {
    if (name == "accept") {
      AcceptanceOptions ao;
      ao.seed = c.mc.seed;
      ao.only = o.only;
      if (!o.config.empty()) ao.extra_fixture = c.model;
      const auto results = run_acceptance(ao);
      Emitter emit(c.output, out);
      std::size_t passed = 0;
      for (const auto& r : results) {
        passed += r.pass;
        out << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.description << "\n";
      }
      emit.json_file("acceptance.json", acceptance_report(results),
                     fmt::format("{}/{} criteria pass", passed, results.size()));
      return passed == results.size() ? 0 : 1;
    }
    return run_command(name, c, o, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace svasym
