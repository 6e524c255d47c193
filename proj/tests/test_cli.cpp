#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "svasym/acceptance.hpp"
#include "svasym/cli.hpp"
#include "svasym/csv.hpp"
#include "svasym/errors.hpp"
#include "svasym/hamiltonian.hpp"

using namespace svasym;
namespace fs = std::filesystem;

namespace {

const char* kOu =
    "# OU factor\n"
    "m = 0\n"
    "nu = 1.4142135623730951\n"
    "beta = 0\n"
    "sigma.kind = power_abs\n"
    "sigma.c = 1\n"
    "sigma.q = 0.5\n";

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("svasym-cli-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path config(const std::string& text, const std::string& name = "run.cfg") const {
    write_text_file(dir / name, text);
    return dir / name;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int code = dispatch(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("minimal document takes the defaults") {
  const RunConfig c = parse_config(kOu);
  CHECK(c.grid.points == 4096);
  CHECK(c.mc.paths == 10000);
  CHECK(c.mc.seed == 42);
  CHECK(c.regime == 4);
  CHECK(c.model == ou_fixture());
}

TEST_CASE("config errors") {
  try {
    parse_config(std::string(kOu) + "sigm.kind = constant\n");
    FAIL("expected UnknownKeyError");
  } catch (const UnknownKeyError& e) {
    CHECK(e.key() == "sigm.kind");
  }
  try {
    parse_config("m = 1\nnu = 1\nbeta = 0.5\nsigma.kind = constant\nsigma.s0 = 0.2\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Assumption 1(2)") != std::string::npos);
  }
  try {
    parse_config("m = 0\nthis line is wrong\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_config("m = 0\nm = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config(std::string(kOu) + "regime = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(std::string(kOu) + "x_grid = 0.2, 0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(std::string(kOu) + "mc.paths = many\n"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ValidationError);
}

TEST_CASE("config round trip for every fixture") {
  for (const ModelParams& m : {ou_fixture(), cir_fixture(), beta75_fixture(), constant_fixture()}) {
    RunConfig c;
    c.model = m;
    CHECK(parse_config(write_config(c)) == c);
  }
  RunConfig c = parse_config(kOu);
  c.regime = 2;
  c.t = 0.37;
  c.grid.points = 1025;
  c.grid.lo = -5.0;
  c.grid.hi = 5.0;
  c.p_grid = {-1.0, 0.0, 1.0};
  c.x_grid = {-0.1, 0.1};
  c.logk_grid = {0.05, 0.15};
  c.mc.paths = 1234;
  c.mc.seed = 99;
  c.mc.scheme = Scheme::EulerReflect;
  c.mc.per_step_increments = true;
  c.output = "elsewhere";
  c.method = "mc";
  c.horizon = 30.0;
  c.p = 0.7;
  c.ldp_x = 0.2;
  c.eps = {0.4, 0.2};
  c.sim_eps = 0.3;
  CHECK(parse_config(write_config(c)) == c);
}

TEST_CASE("sigma-bar prints the value and writes JSON") {
  Workspace w;
  const auto cfg = w.config(kOu);
  const Run r = run({"sigma-bar", "--config", cfg.string(), "--out", (w.dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("sigma_bar_sq = 0.797884560") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(w.dir / "o" / "sigma_bar.json"));
  CHECK(j["sigma_bar_sq"].get<double>() == doctest::Approx(0.7978845608));
}

TEST_CASE("smile writes an RFC 4180 table") {
  Workspace w;
  const auto cfg = w.config(std::string(kOu) + "p_grid = " + format_list(symmetric_grid(4.0, 16)) + "\n");
  const Run r = run({"smile", "--config", cfg.string(), "--regime", "2", "--t", "1.0", "--out", (w.dir / "o").string()});
  CHECK(r.code == 0);
  const auto rows = parse_csv(read_text_file(w.dir / "o" / "smile.csv"));
  REQUIRE(rows.size() == 102);
  CHECK(rows[0] == std::vector<std::string>{"logK", "implied_var", "regime"});
  CHECK(rows[1][2] == "2");
  CHECK(fs::exists(w.dir / "o" / "atm_probe.csv"));
  CHECK_NOTHROW(nlohmann::json::parse(read_text_file(w.dir / "o" / "smile.json")));
}

TEST_CASE("usage errors exit with 2 and name the flag") {
  Workspace w;
  const auto cfg = w.config(kOu);
  const Run r = run({"smile", "--config", cfg.string(), "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"rate", "--config", cfg.string(), "--regime", "3"}).code == 2);
  const auto bad = w.config("m = 0\nsigm.kind = constant\n", "bad.cfg");
  const Run u = run({"rate", "--config", bad.string()});
  CHECK(u.code == 2);
  CHECK(u.err.find("sigm.kind") != std::string::npos);
}

TEST_CASE("validation failures exit with 1") {
  Workspace w;
  const auto cfg = w.config("m = 0.5\nnu = 1.2\nbeta = 0.5\ny0 = 1\nsigma.kind = constant\nsigma.s0 = 0.2\n");
  const Run v = run({"validate", "--config", cfg.string(), "--out", (w.dir / "o").string()});
  CHECK(v.code == 1);
  CHECK(v.err.find("assumption-1.2") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(w.dir / "o" / "validation.json"));
  CHECK_FALSE(j["passed"].get<bool>());
  CHECK(run({"sigma-bar", "--config", cfg.string(), "--out", (w.dir / "p").string()}).code == 1);
}

TEST_CASE("every subcommand writes parseable artifacts") {
  Workspace w;
  const auto cfg = w.config(std::string(kOu) +
                            "grid.points = 1025\n"
                            "p_grid = -2, -1, -0.5, 0, 0.5, 1, 2\n"
                            "x_grid = -0.3, -0.1, 0, 0.1, 0.3\n"
                            "logK_grid = -0.2, 0.1, 0.2\n"
                            "mc.paths = 2000\n"
                            "ldp.eps = 0.5, 0.35\n");
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"validate", {"validation.json"}},
      {"invariant", {"invariant.csv", "invariant.json"}},
      {"poisson", {"corrector.csv", "poisson.json"}},
      {"hamiltonian", {"hamiltonian.csv", "legendre.csv", "hamiltonian.json"}},
      {"rate", {"rate.csv", "rate.json"}},
      {"price", {"price.csv"}},
      {"simulate", {"summary.csv", "simulate.json"}},
      {"verify-ldp", {"ldp.csv", "ldp.json"}},
  };
  for (const auto& [cmd, files] : cases) {
    const fs::path out = w.dir / cmd;
    const Run r = run({cmd, "--config", cfg.string(), "--out", out.string()});
    CHECK_MESSAGE(r.code == 0, cmd << ": " << r.err);
    for (const auto& f : files) {
      REQUIRE_MESSAGE(fs::exists(out / f), f);
      const std::string text = read_text_file(out / f);
      if (f.ends_with(".csv")) {
        const auto rows = parse_csv(text);
        CHECK(rows.size() >= 2);
        for (const auto& row : rows) CHECK(row.size() == rows[0].size());
      } else {
        CHECK_NOTHROW(nlohmann::json::parse(text));
      }
      CHECK(r.out.find(f) != std::string::npos);
    }
  }
  const auto sim = nlohmann::json::parse(read_text_file(w.dir / "simulate" / "simulate.json"));
  CHECK(sim["seed"].get<std::uint64_t>() == 42);
  const auto ldp = nlohmann::json::parse(read_text_file(w.dir / "verify-ldp" / "ldp.json"));
  CHECK(ldp.contains("seed"));

  const Run r2 = run({"rate", "--config", cfg.string(), "--regime", "2", "--out", (w.dir / "r2").string()});
  CHECK(r2.code == 0);
  CHECK(fs::exists(w.dir / "r2" / "compare.csv"));

  const Run mc = run({"hamiltonian", "--config", cfg.string(), "--method", "mc", "--paths", "10000", "--horizon",
                      "11", "--out", (w.dir / "mc").string()});
  CHECK(mc.code == 0);
  const auto hj = nlohmann::json::parse(read_text_file(w.dir / "mc" / "hamiltonian.json"));
  CHECK(hj["seed"].get<std::uint64_t>() == 42);
}

TEST_CASE("simulate can record raw paths") {
  Workspace w;
  const auto cfg = w.config(std::string(kOu) + "mc.paths = 50\n");
  const Run r = run({"simulate", "--config", cfg.string(), "--record", "2", "--out", (w.dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(w.dir / "o" / "paths.bin"));
}

TEST_CASE("accept writes the suite report") {
  Workspace w;
  const Run r = run({"accept", "--only", "AC10", "--out", (w.dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("AC10 PASS") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(w.dir / "o" / "acceptance.json"));
  CHECK(j["criteria"].size() == 1);
}
