#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svasym/measures.hpp"
#include "svasym/model.hpp"
#include "svasym/simulate.hpp"

namespace svasym {

/// Everything a subcommand needs; flat dotted keys in the config file.
struct RunConfig {
  ModelParams model;
  int regime = 4;
  double t = 1.0;
  GridSpec grid;
  /// Empty grids are filled with defaults around x0 (or symmetric in p) when used.
  std::vector<double> p_grid;
  std::vector<double> x_grid;
  std::vector<double> logk_grid;
  McConfig mc;
  std::filesystem::path output = "out";
  std::string method = "eigen";
  double horizon = 20.0;
  /// Momentum for the poisson subcommand.
  double p = 1.0;
  /// Tail level for verify-ldp; defaults to x0 + 0.15.
  std::optional<double> ldp_x;
  std::vector<double> eps = {0.5, 0.35, 0.25, 0.18};
  /// Scale parameter for the simulate subcommand.
  double sim_eps = 0.5;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses key = value lines; '#' starts a comment. ParseError (with line number) on
/// malformed lines or duplicate keys, UnknownKeyError for unknown keys, ValidationError
/// for bad values or a missing y0 when beta > 0.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical document; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& config);

std::vector<double> default_p_grid();
std::vector<double> default_x_grid(double x0);

/// Runs one subcommand. Exit code 0 on success, 1 on validation failure, 2 on usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace svasym
