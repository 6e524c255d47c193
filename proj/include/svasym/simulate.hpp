#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svasym/csv.hpp"
#include "svasym/grid.hpp"
#include "svasym/model.hpp"

namespace svasym {

enum class Scheme { EulerFullTruncation, EulerReflect };

const char* scheme_name(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

struct McConfig {
  std::size_t paths = 10000;
  std::size_t steps_per_unit_time = 100;
  std::uint64_t seed = 42;
  Scheme scheme = Scheme::EulerFullTruncation;
  /// 0 defers to SVASYM_THREADS, then to the hardware.
  unsigned threads = 0;
  /// Draws the X noise at every step instead of once per path given the Y path.
  bool per_step_increments = false;

  /// Throws ValidationError when the configuration cannot resolve the fast factor.
  void check(const ModelParams& params) const;

  friend bool operator==(const McConfig&, const McConfig&) = default;
};

/// Monte Carlo value with its standard error and provenance.
struct McEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  bool has_warning(std::string_view tag) const;
};

/// Terminal values and per-path functionals of the two-scale system.
struct PathBatch {
  std::vector<double> x_terminal;
  std::vector<double> y_terminal;
  /// int_0^t sigma^2(Y) dt and int_0^t sigma(Y) dW1 in the slow clock.
  std::vector<double> int_sigma_sq;
  std::vector<double> int_sigma_dw;
  std::size_t steps_per_path = 0;
  double dt = 0.0;
  std::uint64_t truncated_steps = 0;
  std::uint64_t negative_y_records = 0;
  std::uint64_t negative_sigma_evals = 0;
  std::uint64_t nonfinite_values = 0;
  double min_recorded_y = 0.0;
  /// Sample correlation of the normal increments driving X and Y: per step, or of the
  /// per-path Brownian totals when the X noise is sampled per path.
  double increment_correlation = 0.0;
  std::uint64_t increment_count = 0;
  std::uint64_t seed = 0;

  std::size_t paths() const noexcept { return x_terminal.size(); }
  double truncated_fraction() const noexcept;
  /// (statistic, value) rows; deterministic for a fixed seed.
  CsvTable summary_csv() const;
};

/// Optional raw trajectory dump of the first few paths.
struct PathRecording {
  std::filesystem::path file;
  std::size_t paths = 0;
  std::size_t stride = 1;
};

/// Binary record: 8-byte magic "SVAPATH1", uint64 rows, uint64 cols, then rows*cols
/// little-endian float64 values in row-major order. Row k holds
/// (t_k, X_1..X_n, Y_1..Y_n) for n recorded paths.
void write_path_file(const std::filesystem::path& file, std::size_t rows, std::size_t cols,
                     const std::vector<double>& values);
struct PathFile {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};
PathFile read_path_file(const std::filesystem::path& file);

/// Simulates (X, Y) of the rescaled system with delta = eps^r on [0, t].
PathBatch simulate_xy(const ModelParams& params, Regime regime, double eps, double t,
                      const McConfig& mc, const PathRecording* recording = nullptr);

/// C^1 function h given through nodal values of h' on a uniform or log-uniform grid;
/// h' is linear between nodes and constant beyond the table.
class TiltTable {
 public:
  TiltTable(const Grid& grid, std::vector<double> h_prime);

  double h(double y) const noexcept;
  double h_prime(double y) const noexcept;
  double h_second(double y) const noexcept;

  const std::vector<double>& nodes() const noexcept { return y_; }

 private:
  std::size_t cell(double y) const noexcept;
  std::vector<double> y_;
  std::vector<double> hp_;
  std::vector<double> h_;
  bool log_axis_ = false;
  double u0_ = 0.0;
  double inv_du_ = 0.0;
};

/// Fast factor under the tilted generator: drift mu_p(y) + nu^2 |y|^{2 beta} h'(y),
/// run in its own clock (delta = 1).
struct TiltedRequest {
  double p = 0.0;
  const TiltTable* h = nullptr;
  double y0 = 0.0;
  double burn_in = 0.0;
  /// Accumulation horizons measured from the end of the burn-in, increasing.
  std::vector<double> checkpoints;
};

struct TiltedBatch {
  std::size_t paths = 0;
  std::size_t horizons = 0;
  /// Row-major [path][checkpoint] accumulators.
  std::vector<double> int_sigma_sq;
  std::vector<double> int_psi;
  std::vector<double> int_sigma_dw;
  /// Log likelihood ratio of the untilted to the tilted discrete chain.
  std::vector<double> log_weight;
  std::vector<double> h_start;
  std::vector<double> h_end;
  std::vector<double> y_terminal;
  std::uint64_t truncated_steps = 0;
  std::uint64_t total_steps = 0;

  double at(const std::vector<double>& v, std::size_t path, std::size_t k) const noexcept {
    return v[path * horizons + k];
  }
};

TiltedBatch simulate_tilted(const ModelParams& params, const TiltedRequest& req, const McConfig& mc);

struct ErgodicRequest {
  double p = 0.0;
  const TiltTable* h = nullptr;
  double horizon = 20.0;
  /// Defaults to horizon / 10.
  std::optional<double> burn_in;
  /// Defaults to params.y0.
  std::optional<double> y0;
};

/// (1/T) int phi(Y_s) ds averaged over paths; SE from the per-path averages.
McEstimate ergodic_average(const ModelParams& params, const ErgodicRequest& req,
                           const std::function<double(double)>& phi, const McConfig& mc);
McEstimate ergodic_average(const ModelParams& params, const ErgodicRequest& req,
                           const FunctionTable& phi, const McConfig& mc);

struct MomentRow {
  double eps = 0.0;
  McEstimate estimate;
  /// Lognormal value for constant sigma, if available.
  std::optional<double> closed_form;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  bool decreasing = false;
};

/// eps log E[S^p] along a sequence of eps.
MomentReport moment_check(const ModelParams& params, Regime regime, const std::vector<double>& eps,
                          double p, double t, const McConfig& mc);

/// Seed for the k-th independent experiment derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) noexcept;

}  // namespace svasym
