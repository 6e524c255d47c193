#include "svasym/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

#include "svasym/errors.hpp"
#include "svasym/parallel.hpp"
#include "svasym/rng.hpp"

namespace svasym {

namespace {

constexpr std::size_t kChunk = 256;
using Normal = boost::random::normal_distribution<double>;

// One step of the fast factor: the linear relaxation towards m is integrated exactly over the
// step, any extra drift is frozen over the step, and the noise carries the matching OU variance.
class FastStepper {
 public:
  FastStepper(const ModelParams& params, double ds, Scheme scheme)
      : m_(params.m),
        nu_(params.nu),
        beta_(params.beta),
        positive_(params.beta != 0.0),
        reflect_(scheme == Scheme::EulerReflect),
        gain_(-std::expm1(-ds)),
        noise_(std::sqrt(-0.5 * std::expm1(-2.0 * ds))),
        sqrt_ds_(std::sqrt(ds)),
        nu_noise_(nu_ * noise_),
        limit_(10.0 * nu_ * sqrt_ds_) {}

  double recorded(double y) const noexcept { return positive_ && y < 0.0 ? 0.0 : y; }

  double pow_beta(double y) const noexcept {
    if (beta_ == 0.0) return 1.0;
    if (beta_ == 0.5) return std::sqrt(y);
    return std::pow(y, beta_);
  }

  double advance(double y, double extra_drift, double z) {
    if (beta_ == 0.0 && extra_drift == 0.0) {
      const double shock = nu_noise_ * z;
      if (std::abs(shock) > limit_) throw_unstable(shock, limit_ / 10.0);
      return y + (m_ - y) * gain_ + shock;
    }
    const double yr = recorded(y);
    const double shock = extra_drift * gain_ + nu_ * pow_beta(yr) * noise_ * z;
    const double scale = nu_ * pow_beta(positive_ ? std::max(yr, m_) : yr) * sqrt_ds_;
    if (std::abs(shock) > 10.0 * scale && shock != 0.0) throw_unstable(shock, scale);
    double next = y + (m_ - yr) * gain_ + shock;
    if (positive_ && next < 0.0) {
      ++truncated_;
      if (reflect_) next = -next;
    }
    return next;
  }

  double sqrt_ds() const noexcept { return sqrt_ds_; }
  /// Ratio of the drift gain to the noise scale of one step.
  double gain_over_noise() const noexcept { return gain_ / noise_; }

  [[noreturn]] static void throw_unstable(double shock, double scale) {
    throw StabilityError(fmt::format(
        "fast-factor step of {:.3g} exceeds 10 local standard deviations ({:.3g}); raise steps per unit time",
        shock, scale));
  }
  std::uint64_t truncated() const noexcept { return truncated_; }

 private:
  double m_, nu_, beta_;
  bool positive_, reflect_;
  double gain_, noise_, sqrt_ds_, nu_noise_, limit_;
  std::uint64_t truncated_ = 0;
};

double log_mean_exp(const std::vector<double>& v, double& se_log, double& rel_se) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    const double w = std::exp(x - mx);
    s += w;
    s2 += w * w;
  }
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  const double var = v.size() > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
  rel_se = std::sqrt(var / n) / mean;
  se_log = rel_se;
  return mx + std::log(mean);
}

std::size_t steps_for(double horizon, std::size_t spu) {
  return static_cast<std::size_t>(std::llround(horizon * static_cast<double>(spu)));
}

double interp_table(const FunctionTable& t, double y) {
  const auto& g = t.grid->points();
  if (y <= g.front()) return t.values.front();
  if (y >= g.back()) return t.values.back();
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), y) - g.begin());
  const double w = (y - g[j - 1]) / (g[j] - g[j - 1]);
  return (1.0 - w) * t.values[j - 1] + w * t.values[j];
}

}  // namespace

const char* scheme_name(Scheme s) noexcept {
  return s == Scheme::EulerReflect ? "euler_reflect" : "euler_full_truncation";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "euler_full_truncation" || name == "full_truncation") return Scheme::EulerFullTruncation;
  if (name == "euler_reflect" || name == "reflect") return Scheme::EulerReflect;
  throw ValidationError(fmt::format("unknown scheme '{}'", name));
}

void McConfig::check(const ModelParams& params) const {
  if (paths < 1) throw ValidationError("mc.paths must be at least 1");
  if (steps_per_unit_time < 1) throw ValidationError("mc.steps_per_unit_time must be at least 1");
  if (params.beta != 0.0 && steps_per_unit_time < 100)
    throw ValidationError("mc.steps_per_unit_time must be at least 100 when beta > 0");
}

bool McEstimate::has_warning(std::string_view tag) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const std::string& w) { return w.rfind(tag, 0) == 0; });
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double PathBatch::truncated_fraction() const noexcept {
  const double total = static_cast<double>(paths()) * static_cast<double>(steps_per_path);
  return total > 0.0 ? static_cast<double>(truncated_steps) / total : 0.0;
}

CsvTable PathBatch::summary_csv() const {
  const double n = static_cast<double>(paths());
  double mx = 0.0, my = 0.0, ms = 0.0;
  for (std::size_t i = 0; i < paths(); ++i) {
    mx += x_terminal[i];
    my += y_terminal[i];
    ms += int_sigma_sq[i];
  }
  mx /= n;
  my /= n;
  ms /= n;
  double vx = 0.0;
  for (double x : x_terminal) vx += (x - mx) * (x - mx);
  vx = paths() > 1 ? vx / (n - 1.0) : 0.0;

  CsvTable t({"statistic", "value"});
  auto row = [&](const char* k, const std::string& v) { t.add_row({k, v}); };
  row("paths", std::to_string(paths()));
  row("steps_per_path", std::to_string(steps_per_path));
  row("dt", csv_number(dt));
  row("seed", std::to_string(seed));
  row("mean_x", csv_number(mx));
  row("var_x", csv_number(vx));
  row("se_mean_x", csv_number(std::sqrt(vx / n)));
  row("mean_y", csv_number(my));
  row("mean_int_sigma_sq", csv_number(ms));
  row("min_recorded_y", csv_number(min_recorded_y));
  row("truncated_steps", std::to_string(truncated_steps));
  row("truncated_fraction", csv_number(truncated_fraction()));
  row("negative_y_records", std::to_string(negative_y_records));
  row("negative_sigma_evals", std::to_string(negative_sigma_evals));
  row("nonfinite_values", std::to_string(nonfinite_values));
  row("increment_correlation", csv_number(increment_correlation));
  return t;
}

void write_path_file(const std::filesystem::path& file, std::size_t rows, std::size_t cols,
                     const std::vector<double>& values) {
  if (values.size() != rows * cols) throw Error("path record size mismatch");
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(fmt::format("cannot open '{}' for writing", file.string()));
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
  };
  os.write("SVAPATH1", 8);
  put_u64(rows);
  put_u64(cols);
  for (double v : values) put_u64(std::bit_cast<std::uint64_t>(v));
  if (!os) throw Error(fmt::format("write to '{}' failed", file.string()));
}

PathFile read_path_file(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error(fmt::format("cannot open '{}'", file.string()));
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "SVAPATH1", 8) != 0) throw Error("not a path record file");
  auto get_u64 = [&]() {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw Error("truncated path record file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
  };
  PathFile pf;
  pf.rows = get_u64();
  pf.cols = get_u64();
  pf.values.resize(pf.rows * pf.cols);
  for (double& v : pf.values) v = std::bit_cast<double>(get_u64());
  return pf;
}

PathBatch simulate_xy(const ModelParams& params, Regime regime, double eps, double t,
                      const McConfig& mc, const PathRecording* recording) {
  mc.check(params);
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError(fmt::format("eps = {} must lie in (0, 1]", eps));
  if (!(t > 0.0)) throw ValidationError("t must be positive");
  if (!params.in_state_space(params.y0)) throw ValidationError("y0 must lie in the state space");

  const double kappa = eps / regime.delta(eps);
  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(t * kappa * static_cast<double>(mc.steps_per_unit_time) - 1e-9)));
  const double dt = t / static_cast<double>(n);
  const double ds = kappa * dt;
  const double sqrt_eps_dt = std::sqrt(eps * dt);
  const double sqrt_dt = std::sqrt(dt);
  const double rho = params.rho;
  const double rho_c = std::sqrt(1.0 - rho * rho);

  PathBatch b;
  b.x_terminal.resize(mc.paths);
  b.y_terminal.resize(mc.paths);
  b.int_sigma_sq.resize(mc.paths);
  b.int_sigma_dw.resize(mc.paths);
  b.steps_per_path = n;
  b.dt = dt;
  b.seed = mc.seed;

  const std::size_t rec_paths = recording ? std::min(recording->paths, mc.paths) : 0;
  const std::size_t stride = recording ? std::max<std::size_t>(1, recording->stride) : 1;
  const std::size_t rec_rows = n / stride + 1;
  const std::size_t rec_cols = 1 + 2 * rec_paths;
  std::vector<double> rec(rec_paths ? rec_rows * rec_cols : 0, 0.0);
  if (rec_paths) {
    for (std::size_t r = 0; r < rec_rows; ++r) rec[r * rec_cols] = static_cast<double>(r * stride) * dt;
  }

  struct ChunkStats {
    std::uint64_t truncated = 0, negative_y = 0, negative_sigma = 0, nonfinite = 0;
    double min_y = std::numeric_limits<double>::infinity();
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  };
  std::vector<ChunkStats> stats(chunk_count(mc.paths, kChunk));
  const bool per_step = mc.per_step_increments || rec_paths > 0;
  const bool positive = params.beta != 0.0;
  const double nd = static_cast<double>(n);

  parallel_chunks(mc.paths, kChunk, worker_count(mc.threads), [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkStats st;
    FastStepper fast(params, ds, mc.scheme);
    Normal normal;
    for (std::size_t i = begin; i < end; ++i) {
      Philox4x64 eng(mc.seed, i);
      double x = params.x0;
      double y = params.y0;
      double isq = 0.0, isw = 0.0;
      const bool record = i < rec_paths;
      if (record) {
        rec[1 + i] = x;
        rec[1 + rec_paths + i] = fast.recorded(y);
      }
      if (per_step) {
        for (std::size_t k = 0; k < n; ++k) {
          const double yr = fast.recorded(y);
          if (yr < 0.0 && params.beta != 0.0) ++st.negative_y;
          st.min_y = std::min(st.min_y, yr);
          const double s = params.sigma(yr);
          if (s < 0.0) ++st.negative_sigma;
          const double z1 = normal(eng);
          const double zp = normal(eng);
          const double z2 = rho * z1 + rho_c * zp;
          x += eps * (params.rate - 0.5 * s * s) * dt + sqrt_eps_dt * s * z1;
          isq += s * s * dt;
          isw += s * sqrt_dt * z1;
          y = fast.advance(y, 0.0, z2);
          st.s11 += z1 * z1;
          st.s22 += z2 * z2;
          st.s12 += z1 * z2;
          if (record && (k + 1) % stride == 0) {
            const std::size_t r = (k + 1) / stride;
            rec[r * rec_cols + 1 + i] = x;
            rec[r * rec_cols + 1 + rec_paths + i] = fast.recorded(y);
          }
        }
      } else {
        double s_sum = 0.0, a = 0.0, z2_sum = 0.0;
        auto run = [&](auto&& sigma) {
          for (std::size_t k = 0; k < n; ++k) {
            const double yr = fast.recorded(y);
            if (yr < 0.0 && positive) ++st.negative_y;
            st.min_y = std::min(st.min_y, yr);
            const double s = sigma(yr);
            if (s < 0.0) ++st.negative_sigma;
            const double z2 = normal(eng);
            isq += s * s;
            s_sum += s;
            a += s * z2;
            z2_sum += z2;
            y = fast.advance(y, 0.0, z2);
          }
        };
        if (const auto* k = std::get_if<PowerAbsVol>(&params.sigma.kind()); k && k->q == 0.5) {
          const double c0 = k->c, a0 = k->a;
          run([c0, a0](double v) { return c0 * std::sqrt(a0 + std::abs(v)); });
        } else if (const auto* k0 = std::get_if<ConstantVol>(&params.sigma.kind())) {
          const double s0 = k0->s0;
          run([s0](double) { return s0; });
        } else {
          run([&](double v) { return params.sigma(v); });
        }
        // Given the Y path, the orthogonal noise enters through two jointly normal sums.
        const double u_var = isq;
        const double cov = s_sum;
        const double z_u = normal(eng);
        const double z_v = normal(eng);
        const double u = std::sqrt(u_var) * z_u;
        const double v = u_var > 0.0 ? cov / u_var * u + std::sqrt(std::max(0.0, nd - cov * cov / u_var)) * z_v
                                     : std::sqrt(nd) * z_v;
        isq *= dt;
        isw = sqrt_dt * (rho * a + rho_c * u);
        x += eps * (params.rate * t - 0.5 * isq) + std::sqrt(eps) * isw;
        const double w1 = rho * z2_sum + rho_c * v;
        st.s11 += w1 * w1;
        st.s22 += z2_sum * z2_sum;
        st.s12 += w1 * z2_sum;
      }
      const double yt = fast.recorded(y);
      st.min_y = std::min(st.min_y, yt);
      if (!std::isfinite(x) || !std::isfinite(y)) ++st.nonfinite;
      b.x_terminal[i] = x;
      b.y_terminal[i] = yt;
      b.int_sigma_sq[i] = isq;
      b.int_sigma_dw[i] = isw;
    }
    st.truncated = fast.truncated();
    stats[c] = st;
  });

  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  b.min_recorded_y = std::numeric_limits<double>::infinity();
  for (const auto& st : stats) {
    b.truncated_steps += st.truncated;
    b.negative_y_records += st.negative_y;
    b.negative_sigma_evals += st.negative_sigma;
    b.nonfinite_values += st.nonfinite;
    b.min_recorded_y = std::min(b.min_recorded_y, st.min_y);
    s11 += st.s11;
    s22 += st.s22;
    s12 += st.s12;
  }
  b.increment_count = static_cast<std::uint64_t>(mc.paths) * (per_step ? n : 1);
  b.increment_correlation = s12 / std::sqrt(s11 * s22);
  if (rec_paths) write_path_file(recording->file, rec_rows, rec_cols, rec);
  return b;
}

TiltTable::TiltTable(const Grid& grid, std::vector<double> h_prime)
    : y_(grid.points()), hp_(std::move(h_prime)), log_axis_(grid.kind() == GridKind::LogUniform) {
  const std::size_t n = y_.size();
  if (hp_.size() != n) throw GridMismatch("tilt derivative length differs from grid");
  h_.assign(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) h_[j + 1] = h_[j] + 0.5 * (hp_[j] + hp_[j + 1]) * (y_[j + 1] - y_[j]);
  u0_ = log_axis_ ? std::log(y_.front()) : y_.front();
  const double u1 = log_axis_ ? std::log(y_.back()) : y_.back();
  inv_du_ = static_cast<double>(n - 1) / (u1 - u0_);
}

std::size_t TiltTable::cell(double y) const noexcept {
  const double u = log_axis_ ? std::log(y) : y;
  const double f = (u - u0_) * inv_du_;
  std::size_t j = f <= 0.0 ? 0 : std::min(static_cast<std::size_t>(f), y_.size() - 2);
  // Guard against rounding of the index arithmetic on non-exact grids.
  while (j > 0 && y < y_[j]) --j;
  while (j + 2 < y_.size() && y >= y_[j + 1]) ++j;
  return j;
}

double TiltTable::h(double y) const noexcept {
  if (y <= y_.front()) return h_.front() + hp_.front() * (y - y_.front());
  if (y >= y_.back()) return h_.back() + hp_.back() * (y - y_.back());
  const std::size_t j = cell(y);
  const double d = y - y_[j];
  const double slope = (hp_[j + 1] - hp_[j]) / (y_[j + 1] - y_[j]);
  return h_[j] + hp_[j] * d + 0.5 * slope * d * d;
}

double TiltTable::h_prime(double y) const noexcept {
  if (y <= y_.front()) return hp_.front();
  if (y >= y_.back()) return hp_.back();
  const std::size_t j = cell(y);
  const double w = (y - y_[j]) / (y_[j + 1] - y_[j]);
  return (1.0 - w) * hp_[j] + w * hp_[j + 1];
}

double TiltTable::h_second(double y) const noexcept {
  if (y <= y_.front() || y >= y_.back()) return 0.0;
  const std::size_t j = cell(y);
  return (hp_[j + 1] - hp_[j]) / (y_[j + 1] - y_[j]);
}

namespace {

// Shared driver for the fast factor under B^p with an optional Doob tilt h.
template <class PathFn>
void run_tilted(const ModelParams& params, double p, const TiltTable* h, double y0, std::size_t burn_steps,
                const McConfig& mc, std::vector<std::uint64_t>& truncated, PathFn&& on_path) {
  const double ds = 1.0 / static_cast<double>(mc.steps_per_unit_time);
  const double rho = params.rho;
  const double nu = params.nu;
  const double nu2 = nu * nu;
  truncated.assign(chunk_count(mc.paths, kChunk), 0);
  parallel_chunks(mc.paths, kChunk, worker_count(mc.threads), [&](std::size_t c, std::size_t begin, std::size_t end) {
    FastStepper fast(params, ds, mc.scheme);
    Normal normal;
    for (std::size_t i = begin; i < end; ++i) {
      Philox4x64 eng(mc.seed, i);
      double y = y0;
      auto step = [&](auto&& observe) {
        const double yr = fast.recorded(y);
        const double yb = fast.pow_beta(std::abs(yr));
        const double s = params.sigma(yr);
        double extra = 0.0;
        double hp = 0.0;
        if (p != 0.0 && rho != 0.0) extra += rho * p * s * nu * yb;
        if (h) {
          hp = h->h_prime(yr);
          extra += nu2 * yb * yb * hp;
        }
        const double z = normal(eng);
        observe(yr, yb, s, hp, z);
        y = fast.advance(y, extra, z);
      };
      auto ignore = [](double, double, double, double, double) {};
      for (std::size_t k = 0; k < burn_steps; ++k) step(ignore);
      on_path(i, fast, y, step);
    }
    truncated[c] = fast.truncated();
  });
}

}  // namespace

TiltedBatch simulate_tilted(const ModelParams& params, const TiltedRequest& req, const McConfig& mc) {
  mc.check(params);
  if (req.checkpoints.empty()) throw ValidationError("simulate_tilted needs at least one horizon");
  if (!params.in_state_space(req.y0)) throw ValidationError("start point must lie in the state space");
  const std::size_t spu = mc.steps_per_unit_time;
  std::vector<std::size_t> marks;
  for (double c : req.checkpoints) {
    const std::size_t s = steps_for(c, spu);
    if (s == 0 || (!marks.empty() && s <= marks.back()))
      throw ValidationError("checkpoints must be positive and increasing");
    marks.push_back(s);
  }
  const std::size_t K = marks.size();
  const double ds = 1.0 / static_cast<double>(spu);
  const double p = req.p;
  const double half_nu2 = 0.5 * params.nu * params.nu;

  TiltedBatch b;
  b.paths = mc.paths;
  b.horizons = K;
  b.int_sigma_sq.assign(mc.paths * K, 0.0);
  b.int_psi.assign(mc.paths * K, 0.0);
  b.int_sigma_dw.assign(mc.paths * K, 0.0);
  b.log_weight.assign(mc.paths * K, 0.0);
  b.h_start.assign(mc.paths, 0.0);
  b.h_end.assign(mc.paths * K, 0.0);
  b.y_terminal.assign(mc.paths, 0.0);

  std::vector<std::uint64_t> truncated;
  const TiltTable* h = req.h;
  run_tilted(params, p, h, req.y0, steps_for(req.burn_in, spu), mc, truncated,
             [&](std::size_t i, FastStepper& fast, double& y, auto& step) {
               if (h) b.h_start[i] = h->h(fast.recorded(y));
               double a = 0.0, psi = 0.0, sw = 0.0, lw = 0.0;
               std::size_t next = 0;
               const double sq = fast.sqrt_ds();
               const double gn = fast.gain_over_noise();
               for (std::size_t k = 1; k <= marks.back(); ++k) {
                 step([&](double yr, double yb, double s, double hp, double z) {
                   a += s * s * ds;
                   sw += s * sq * z;
                   if (h) {
                     const double drift = params.tilted_drift(p, yr);
                     psi += (drift * hp + half_nu2 * yb * yb * (h->h_second(yr) + hp * hp)) * ds;
                     const double shift = params.nu * yb * hp * gn;
                     lw -= shift * z + 0.5 * shift * shift;
                   }
                 });
                 if (k == marks[next]) {
                   b.int_sigma_sq[i * K + next] = a;
                   b.int_psi[i * K + next] = psi;
                   b.int_sigma_dw[i * K + next] = sw;
                   b.log_weight[i * K + next] = lw;
                   b.h_end[i * K + next] = h ? h->h(fast.recorded(y)) : 0.0;
                   ++next;
                 }
               }
               b.y_terminal[i] = fast.recorded(y);
             });
  for (auto t : truncated) b.truncated_steps += t;
  b.total_steps = static_cast<std::uint64_t>(mc.paths) * (marks.back() + steps_for(req.burn_in, spu));
  return b;
}

McEstimate ergodic_average(const ModelParams& params, const ErgodicRequest& req,
                           const std::function<double(double)>& phi, const McConfig& mc) {
  mc.check(params);
  if (!(req.horizon > 0.0)) throw ValidationError("ergodic horizon must be positive");
  const std::size_t spu = mc.steps_per_unit_time;
  const double burn = req.burn_in.value_or(req.horizon / 10.0);
  const double y0 = req.y0.value_or(params.y0);
  if (!params.in_state_space(y0)) throw ValidationError("start point must lie in the state space");
  const std::size_t steps = steps_for(req.horizon - burn, spu);
  if (steps == 0) throw ValidationError("burn-in consumes the whole horizon");
  constexpr std::size_t batches = 10;
  const std::size_t per_batch = std::max<std::size_t>(1, steps / batches);

  std::vector<double> means(mc.paths);
  std::vector<double> batch_means(mc.paths * batches, 0.0);
  std::vector<std::uint64_t> truncated;
  run_tilted(params, req.p, req.h, y0, steps_for(burn, spu), mc, truncated,
             [&](std::size_t i, FastStepper&, double&, auto& step) {
               double total = 0.0;
               double part = 0.0;
               std::size_t in_part = 0, b = 0;
               for (std::size_t k = 0; k < steps; ++k) {
                 step([&](double yr, double, double, double, double) {
                   const double v = phi(yr);
                   total += v;
                   part += v;
                 });
                 if (++in_part == per_batch && b < batches) {
                   batch_means[i * batches + b] = part / static_cast<double>(in_part);
                   ++b;
                   part = 0.0;
                   in_part = 0;
                 }
               }
               means[i] = total / static_cast<double>(steps);
             });

  McEstimate est;
  est.seed = mc.seed;
  est.samples = mc.paths;
  double s = 0.0;
  for (double v : means) s += v;
  est.value = s / static_cast<double>(mc.paths);
  double v2 = 0.0;
  for (double v : means) v2 += (v - est.value) * (v - est.value);
  const double n = static_cast<double>(mc.paths);
  est.se = mc.paths > 1 ? std::sqrt(v2 / (n - 1.0) / n) : 0.0;

  const std::size_t used = std::min(batches, steps / per_batch);
  if (used >= 3) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < mc.paths; ++i) {
      for (std::size_t b = 0; b < used; ++b) {
        const double d = batch_means[i * batches + b] - est.value;
        den += d * d;
        if (b + 1 < used) num += d * (batch_means[i * batches + b + 1] - est.value);
      }
    }
    const double lag1 = den > 0.0 ? num / den : 0.0;
    if (lag1 > 0.5) est.warnings.push_back(fmt::format("VarianceWarning: batch means lag-1 correlation {:.3f}", lag1));
  }
  return est;
}

McEstimate ergodic_average(const ModelParams& params, const ErgodicRequest& req, const FunctionTable& phi,
                           const McConfig& mc) {
  return ergodic_average(params, req, [&phi](double y) { return interp_table(phi, y); }, mc);
}

MomentReport moment_check(const ModelParams& params, Regime regime, const std::vector<double>& eps,
                          double p, double t, const McConfig& mc) {
  if (!(p > 1.0)) throw ValidationError("moment_check needs p > 1");
  for (std::size_t k = 1; k < eps.size(); ++k)
    if (!(eps[k] < eps[k - 1])) throw ValidationError("eps sequence must be strictly decreasing");
  MomentReport rep;
  const auto* constant = std::get_if<ConstantVol>(&params.sigma.kind());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    McConfig c = mc;
    c.seed = derive_seed(mc.seed, k);
    const PathBatch b = simulate_xy(params, regime, eps[k], t, c);
    std::vector<double> v(b.paths());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p * b.x_terminal[i];
    double se_log = 0.0, rel = 0.0;
    const double lm = log_mean_exp(v, se_log, rel);
    MomentRow row;
    row.eps = eps[k];
    row.estimate.value = eps[k] * lm;
    row.estimate.se = eps[k] * se_log;
    row.estimate.samples = b.paths();
    row.estimate.seed = c.seed;
    if (rel > 0.25) row.estimate.warnings.push_back(fmt::format("VarianceWarning: relative SE {:.3f}", rel));
    if (constant) {
      const double s2 = constant->s0 * constant->s0;
      row.closed_form = eps[k] * (p * params.x0 + eps[k] * t * (p * (params.rate - 0.5 * s2) + 0.5 * p * p * s2));
    }
    rep.rows.push_back(std::move(row));
  }
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (!(std::abs(rep.rows[k].estimate.value) < std::abs(rep.rows[k - 1].estimate.value))) rep.decreasing = false;
  return rep;
}

}  // namespace svasym
