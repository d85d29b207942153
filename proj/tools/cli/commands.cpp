#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <numbers>

#include "airydim/airy.hpp"
#include "airydim/ensemble.hpp"
#include "airydim/errors.hpp"
#include "airydim/fractal.hpp"
#include "airydim/io.hpp"
#include "airydim/levelset.hpp"
#include "airydim/lpp.hpp"
#include "airydim/parallel.hpp"
#include "airydim/path_cache.hpp"
#include "airydim/stats.hpp"
#include "json.hpp"

#ifndef AIRYDIM_VERSION
#define AIRYDIM_VERSION "unknown"
#endif

namespace airydim::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using airy::Process;
using levelset::Side;

namespace {

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, std::string_view contents) {
    io::write_file_atomic(dir_ / name, contents);
    files_.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  const fs::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string stream_tag(std::uint64_t stream) {
  std::string s = std::to_string(stream);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

std::vector<fs::path> files_matching(const fs::path& dir, std::string_view prefix, std::string_view suffix) {
  if (!fs::is_directory(dir)) throw ConfigError({"input directory '" + dir.string() + "' does not exist"});
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() && name.starts_with(prefix) && name.ends_with(suffix))
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

stats::Ensemble ensemble_for(const SimConfig& cfg, stats::EnsembleSpec spec) {
  spec.N = cfg.integer("N");
  spec.master_seed = cfg.uinteger("master_seed");
  spec.first_stream = cfg.uinteger("first_stream");
  spec.replicas = static_cast<std::size_t>(cfg.integer("replicas"));
  spec.threads = static_cast<int>(cfg.integer("threads"));
  if (cfg.has("cache_dir")) return stats::cached_ensemble(spec, cfg.text("cache_dir"));
  return stats::run_ensemble(spec);
}

// --- sample ---------------------------------------------------------------

void cmd_sample(const SimConfig& cfg, Outputs& out) {
  const Process p = airy::parse_process(cfg.text("process"));
  const auto paths = cfg.integer("paths");
  const int threads = static_cast<int>(cfg.integer("threads"));
  airy::SamplerOptions opt;
  opt.centering = airy::parse_centering(cfg.text("centering"));
  opt.horizon_fraction = cfg.real("horizon_fraction");
  opt.window_halfwidth = cfg.integer("window_halfwidth");
  // Many paths: one per thread. One path: split its diagonals instead.
  opt.threads = paths > 1 ? 1 : threads;
  std::vector<airy::PathSample> samples(static_cast<std::size_t>(paths));
  parallel_for(paths, paths > 1 ? threads : 1, [&](std::int64_t i) {
    const lpp::WeightOracle oracle(cfg.uinteger("master_seed"), cfg.uinteger("first_stream") + static_cast<std::uint64_t>(i));
    const auto N = cfg.integer("N");
    samples[static_cast<std::size_t>(i)] =
        p == Process::Airy2
            ? airy::sample_airy2(oracle, N, cfg.real("t_start"), cfg.real("t_end"), cfg.integer("stride"), opt)
            : airy::sample_airy1(oracle, N, cfg.real("t_start"), cfg.real("t_end"), cfg.integer("stride"), opt);
  });
  for (const auto& s : samples) out.write("path_" + stream_tag(s.stream_id) + ".txt", airy::render_path(s));
}

// --- extract --------------------------------------------------------------

void cmd_extract(const SimConfig& cfg, Outputs& out) {
  const auto inputs = files_matching(cfg.text("input_dir"), "path_", ".txt");
  if (inputs.empty()) throw ConfigError({"input_dir: no path_*.txt files in '" + cfg.text("input_dir") + "'"});
  std::vector<Side> sides;
  if (cfg.text("side") != "lower") sides.push_back(Side::Upper);
  if (cfg.text("side") != "upper") sides.push_back(Side::Lower);
  for (const auto& file : inputs) {
    const airy::PathSample s = airy::cache_read(file);
    for (Side side : sides)
      for (double g : cfg.reals("gammas")) {
        const auto set = levelset::extract(s, {s.process, side, g});
        const std::string name = "levelset_" + std::string(airy::to_string(s.process)) + "_" +
                                 std::string(levelset::to_string(side)) + "_g" + io::format_double(g) + "_s" +
                                 stream_tag(s.stream_id) + ".csv";
        out.write(name, levelset::render_point_set(set));
      }
  }
}

// --- dim ------------------------------------------------------------------

double asymptotic_dimension(Side side, double gamma) {
  return side == Side::Upper ? 1.0 - std::pow(gamma, 1.5) : 1.0 - gamma * gamma * gamma;
}

json estimate_json(const fractal::DimensionEstimate& est) {
  json j;
  j["rho_hat"] = est.rho_hat;
  j["zero_flag"] = est.zero_flag;
  j["low_confidence"] = est.low_confidence;
  j["shells_in_range"] = est.shells_in_range;
  j["shells_used"] = est.shells_used;
  j["slope_at_rho_hat"] = est.slope_at_rho_hat;
  json nu = json::array(), res = json::array();
  for (double v : est.nu_at_rho_hat) nu.push_back(num(v));
  for (double v : est.residuals) res.push_back(num(v));
  j["nu_at_rho_hat"] = nu;
  j["residuals"] = res;
  return j;
}

void cmd_dim(const SimConfig& cfg, Outputs& out) {
  const int n_min = static_cast<int>(cfg.integer("n_min"));
  const int n_max = static_cast<int>(cfg.integer("n_max"));
  const auto rho = cfg.reals("rho_grid");
  fractal::DimensionOptions opt;
  opt.rho_tolerance = cfg.real("rho_tolerance");
  opt.slope_tolerance = cfg.real("slope_tolerance");
  opt.min_shells = static_cast<std::size_t>(cfg.integer("min_shells"));
  opt.threads = static_cast<int>(cfg.integer("threads"));

  json summary;
  summary["estimates"] = json::array();
  if (cfg.has("synthetic_theta")) {
    const double theta = cfg.real("synthetic_theta");
    const auto set = fractal::make_synthetic(theta, n_min, n_max);
    out.write("shell_table.csv", fractal::render_shell_table_csv(
                                     fractal::shell_table(set, n_min, n_max, rho, false, opt.threads)));
    json e;
    e["source"] = "synthetic";
    e["theta"] = theta;
    e["expected"] = 1.0 - theta;
    e.update(estimate_json(fractal::estimate_dimension(set, n_min, n_max, opt)));
    summary["estimates"].push_back(e);
    out.write_json("dimension.json", summary);
    return;
  }

  // Group level sets by (process, side, gamma).
  struct Group {
    std::string process, side;
    double gamma = 0.0;
    std::vector<levelset::PointSet> sets;
    std::vector<std::string> streams;
  };
  std::map<std::string, Group> groups;
  const auto inputs = files_matching(cfg.text("input_dir"), "levelset_", ".csv");
  if (inputs.empty()) throw ConfigError({"input_dir: no levelset_*.csv files in '" + cfg.text("input_dir") + "'"});
  for (const auto& file : inputs) {
    auto set = levelset::read_point_set(file);
    const auto& m = set.metadata();
    for (const char* k : {"process", "side", "gamma"})
      if (!m.count(k)) throw ParseError(file.string() + ": header key '" + k + "' is missing", 0);
    const std::string id = m.at("process") + "_" + m.at("side") + "_g" + m.at("gamma");
    Group& g = groups[id];
    g.process = m.at("process");
    g.side = m.at("side");
    g.gamma = *io::parse_double(m.at("gamma"));
    g.streams.push_back(m.count("stream_id") ? m.at("stream_id") : file.filename().string());
    g.sets.push_back(std::move(set));
  }

  for (auto& [id, g] : groups) {
    const Side side = levelset::parse_side(g.side);
    // Pooled shell table: mean content per shell, summed cover sizes.
    fractal::ShellTable pooled;
    for (std::size_t i = 0; i < g.sets.size(); ++i) {
      const auto t = fractal::shell_table(g.sets[i], n_min, n_max, rho, false, opt.threads);
      if (i == 0) {
        pooled = t;
        continue;
      }
      for (std::size_t s = 0; s < t.nu.size(); ++s)
        for (std::size_t r = 0; r < rho.size(); ++r) {
          pooled.nu[s][r] += t.nu[s][r];
          pooled.cover_size[s][r] += t.cover_size[s][r];
        }
    }
    for (auto& row : pooled.nu)
      for (double& v : row) v /= static_cast<double>(g.sets.size());
    out.write("shell_table_" + id + ".csv", fractal::render_shell_table_csv(pooled));

    auto entry_base = [&] {
      json e;
      e["process"] = g.process;
      e["side"] = g.side;
      e["gamma"] = g.gamma;
      e["asymptotic_dimension"] = asymptotic_dimension(side, g.gamma);
      return e;
    };
    auto add = [&](json e, auto&& estimate) {
      try {
        e.update(estimate_json(estimate()));
      } catch (const InsufficientDataError& err) {
        e["rho_hat"] = nullptr;
        e["error"] = err.what();
      }
      summary["estimates"].push_back(e);
    };
    if (cfg.boolean("pooled")) {
      json e = entry_base();
      e["sets"] = g.sets.size();
      add(e, [&] { return fractal::estimate_dimension_pooled(g.sets, n_min, n_max, opt); });
    } else {
      for (std::size_t i = 0; i < g.sets.size(); ++i) {
        json e = entry_base();
        e["stream_id"] = g.streams[i];
        add(e, [&] { return fractal::estimate_dimension(g.sets[i], n_min, n_max, opt); });
      }
    }
  }
  out.write_json("dimension.json", summary);
}

// --- thick ----------------------------------------------------------------

void cmd_thick(const SimConfig& cfg, Outputs& out) {
  const int n_min = static_cast<int>(cfg.integer("n_min"));
  const int n_max = static_cast<int>(cfg.integer("n_max"));
  const auto set = cfg.has("synthetic_theta") ? fractal::make_synthetic(cfg.real("synthetic_theta"), n_min, n_max)
                                              : levelset::read_point_set(cfg.text("input"));
  const auto grid = cfg.reals("theta_grid");
  json j;
  j["n_min"] = n_min;
  j["n_max"] = n_max;
  j["lower_bound"] = fractal::thickness_lower_bound(set, grid, n_min, n_max);
  j["reports"] = json::array();
  for (double th : grid)
    j["reports"].push_back(json::parse(fractal::render_thickness_json(fractal::check_thickness(set, th, n_min, n_max))));
  out.write_json("thickness.json", j);
}

// --- tails ----------------------------------------------------------------

struct TailPlan {
  stats::EnsembleSpec spec;
  double target = 0.0;
  double band_lo = 0.65, band_hi = 1.35;
  bool inclusive = false;
  Side side = Side::Upper;
  Process process = Process::Airy2;
};

TailPlan plan_tails(const SimConfig& cfg) {
  TailPlan plan;
  const std::string stat = cfg.text("statistic");
  const auto N = cfg.integer("N");
  plan.process = airy::parse_process(cfg.text("process"));
  plan.side = levelset::parse_side(cfg.text("side"));
  auto mode_for = [](Process p) {
    return p == Process::Airy2 ? lpp::SweepMode::PointToPoint : lpp::SweepMode::LineToPoint;
  };
  bool cubic_lemma = false;
  if (stat == "one_point" || stat == "running_extreme") {
    plan.spec.mode = mode_for(plan.process);
    const double t0 = stat == "one_point" ? 0.0 : cfg.real("t0");
    const double t1 = stat == "one_point" ? 0.0 : cfg.real("t1");
    plan.spec.offsets = {airy::offset_for_time(plan.process, N, t0), airy::offset_for_time(plan.process, N, t1)};
    if (plan.side == Side::Upper) plan.target = plan.process == Process::Airy1 ? 4.0 * std::numbers::sqrt2 / 3.0 : 4.0 / 3.0;
    else plan.target = plan.process == Process::Airy1 ? 1.0 / 3.0 : 1.0 / 12.0;
    cubic_lemma = plan.process == Process::Airy2 && plan.side == Side::Lower;
  } else if (stat == "interval_min") {
    const bool line = cfg.text("mode") == "l2p";
    plan.spec.mode = line ? lpp::SweepMode::LineToPoint : lpp::SweepMode::PointToPoint;
    plan.spec.offsets = stats::interval_offsets(N, cfg.real("delta"), cfg.real("m_offset"));
    plan.side = Side::Lower;
    plan.inclusive = true;
    plan.target = line ? 1.0 / 6.0 : 1.0 / 12.0;
    cubic_lemma = true;
  } else {
    plan.spec.mode = lpp::SweepMode::PointToPoint;
    plan.process = Process::Airy2;
    plan.side = Side::Upper;
    plan.inclusive = true;
    plan.spec.offsets = {0, airy::offset_for_time(Process::Airy2, N, cfg.real("horizon"))};
  }
  if (cubic_lemma) {
    plan.band_lo = 0.6;
    plan.band_hi = 1.4;
  }
  if (cfg.has("target")) plan.target = cfg.real("target");
  if (cfg.has("band_lo")) plan.band_lo = cfg.real("band_lo");
  if (cfg.has("band_hi")) plan.band_hi = cfg.real("band_hi");
  return plan;
}

void cmd_tails(const SimConfig& cfg, Outputs& out, RunResult& result) {
  const TailPlan plan = plan_tails(cfg);
  const std::string stat = cfg.text("statistic");
  const auto x = cfg.reals("x_grid");
  const stats::Ensemble e = ensemble_for(cfg, plan.spec);

  if (stat == "modulus") {
    const auto report = stats::modulus_check(e, x, cfg.real("horizon"));
    out.write("tail.csv", stats::render_tail_csv(report.tail));
    json j;
    j["horizon"] = cfg.real("horizon");
    j["x_grid"] = x;
    j["p_hat"] = report.tail.p_hat;
    j["stderr"] = report.tail.stderr_;
    j["bound"] = report.bound;
    json within = json::array();
    for (bool w : report.within) within.push_back(w);
    j["within"] = within;
    j["holds"] = report.holds;
    j["power"] = report.tail.power;
    j["coefficient"] = num(report.tail.coefficient);
    out.write_json("modulus.json", j);
    return;
  }

  std::vector<double> samples;
  if (stat == "one_point") samples = stats::one_point_samples(e, plan.process);
  else if (stat == "running_extreme")
    samples = stats::running_extreme_samples(e, plan.process, plan.side, cfg.real("t0"), cfg.real("t1"));
  else samples = stats::interval_min_samples(e, cfg.real("delta"), cfg.real("m_offset"));

  stats::TailFit tail = stats::tail_estimate(samples, plan.side, x, plan.inclusive);
  tail.N = e.N();
  tail.master_seed = e.spec().master_seed;
  const double power = stat == "interval_min" ? 3.0 : stats::tail_power(plan.side);
  try {
    stats::fit(tail, power);
  } catch (const FitImpossibleError& err) {
    tail.power = power;
    out.write("tail.csv", stats::render_tail_csv(tail));
    result.exit_code = 4;
    result.message = err.what();
    return;
  }
  out.write("tail.csv", stats::render_tail_csv(tail));
  out.write("fit.json", stats::render_fit_json(tail, {plan.target, plan.band_lo, plan.band_hi}));

  if (stat == "running_extreme") {
    std::string csv = "stride,coefficient\n";
    for (std::int64_t s : cfg.integers("strides")) {
      stats::TailFit coarse = stats::tail_estimate(
          stats::running_extreme_samples(e, plan.process, plan.side, cfg.real("t0"), cfg.real("t1"), s), plan.side, x);
      double c = std::nan("");
      try {
        stats::fit(coarse, power);
        c = coarse.coefficient;
      } catch (const FitImpossibleError&) {
      }
      csv += std::to_string(s) + "," + (std::isfinite(c) ? io::format_double(c) : "nan") + "\n";
    }
    out.write("stride_sensitivity.csv", csv);
  }
}

// --- cov / assoc ----------------------------------------------------------

void cmd_cov(const SimConfig& cfg, Outputs& out) {
  const auto t = cfg.reals("t_grid");
  const auto N = cfg.integer("N");
  const auto k = airy::offset_for_time(Process::Airy1, N, 0.5 * t.back());
  stats::EnsembleSpec spec;
  spec.mode = lpp::SweepMode::LineToPoint;
  spec.offsets = {-k, k};
  const auto e = ensemble_for(cfg, spec);
  const auto c = stats::covariance_airy1(e, t);

  std::string csv = "t,cov_hat,stderr\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    csv += io::format_double(t[i]) + "," + io::format_double(c.cov_hat[i]) + "," + io::format_double(c.stderr_[i]) + "\n";
  out.write("cov.csv", csv);

  json j;
  j["replicas"] = c.replicas;
  j["t_grid"] = c.t_grid;
  j["cov_hat"] = c.cov_hat;
  j["stderr"] = c.stderr_;
  j["diff_stderr"] = c.diff_stderr;
  json dec = json::array();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] <= 0.0) continue;
    const double d = c.cov_hat[i] - c.cov_hat[i + 1];
    dec.push_back({{"t_from", t[i]}, {"t_to", t[i + 1]}, {"drop", d}, {"drop_stderr", c.diff_stderr[i]},
                   {"beyond_2se", d > 2.0 * c.diff_stderr[i]}});
  }
  j["decrease"] = dec;
  j["last_within_3se"] = std::abs(c.cov_hat.back()) <= 3.0 * c.stderr_.back();
  out.write_json("cov.json", j);
}

void cmd_assoc(const SimConfig& cfg, Outputs& out) {
  const auto times = cfg.reals("times");
  const auto levels = cfg.reals("thresholds");
  const auto N = cfg.integer("N");
  // Stationarity: read the time window centred on offset 0.
  const double shift = -0.5 * (times.front() + times.back());
  stats::EnsembleSpec spec;
  spec.mode = lpp::SweepMode::LineToPoint;
  spec.offsets = {airy::offset_for_time(Process::Airy1, N, times.front() + shift),
                  airy::offset_for_time(Process::Airy1, N, times.back() + shift)};
  const auto e = ensemble_for(cfg, spec);
  std::vector<std::pair<double, double>> pairs, thresholds;
  for (double s : times)
    for (double t : times) pairs.emplace_back(s, t);
  for (double a : levels)
    for (double b : levels) thresholds.emplace_back(a, b);
  const auto report = stats::association_check(e, pairs, thresholds, shift);

  std::string csv = "s,t,a,b,cov,stderr,flagged\n";
  for (const auto& en : report.entries)
    csv += io::format_double(en.s) + "," + io::format_double(en.t) + "," + io::format_double(en.a) + "," +
           io::format_double(en.b) + "," + io::format_double(en.cov) + "," + io::format_double(en.stderr_) + "," +
           (en.flagged ? "1" : "0") + "\n";
  out.write("assoc.csv", csv);
  json j;
  j["replicas"] = e.replicas();
  j["entries"] = report.entries.size();
  j["flagged"] = report.flagged;
  out.write_json("assoc.json", j);
}

// --- lpp-checks -----------------------------------------------------------

void cmd_lpp_checks(const SimConfig& cfg, Outputs& out) {
  const auto seed = cfg.uinteger("master_seed");
  const int threads = static_cast<int>(cfg.integer("threads"));
  json j;

  {
    const auto envs = cfg.integer("environments");
    const auto side = cfg.integer("max_grid");
    std::vector<double> worst(static_cast<std::size_t>(envs), 0.0);
    const lpp::LatticeVertex origin{0, 0};
    parallel_for(envs, threads, [&](std::int64_t env) {
      const lpp::WeightOracle w(seed, static_cast<std::uint64_t>(env));
      double d = 0.0;
      for (std::int64_t a = 1; a <= side; ++a)
        for (std::int64_t b = 1; b <= side; ++b) {
          if (a == 1 && b == 1) continue;
          const auto g = lpp::GridWeights::from_oracle(w, a, b);
          const lpp::LatticeVertex t{a - 1, b - 1};
          d = std::max(d, std::abs(lpp::passage_time(g, t) - lpp::brute_force_passage(g, std::span(&origin, 1), t)));
        }
      worst[static_cast<std::size_t>(env)] = d;
    });
    const double m = *std::max_element(worst.begin(), worst.end());
    j["brute_force"] = {{"environments", envs}, {"max_grid", side}, {"max_abs_diff", m}, {"pass", m <= 1e-9}};
  }

  {
    const auto N = cfg.integer("geodesic_N");
    const auto seeds = cfg.integer("geodesic_seeds");
    std::vector<double> worst(static_cast<std::size_t>(seeds), 0.0);
    parallel_for(seeds, threads, [&](std::int64_t s) {
      const lpp::WeightOracle w(seed, static_cast<std::uint64_t>(s));
      lpp::SweepOptions keep;
      keep.retain_field = true;
      const auto half = N / 2;
      const auto r = lpp::sweep_point_to_point(w, N, {-half, half}, keep);
      double d = 0.0;
      for (std::int64_t k : {-half, std::int64_t{0}, half}) {
        const auto g = lpp::backtrack_geodesic(r, {N - k, N + k});
        d = std::max(d, std::abs(lpp::path_weight(w, g) - r.at_offset(k)));
      }
      worst[static_cast<std::size_t>(s)] = d;
    });
    const double m = worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
    j["geodesic"] = {{"N", N}, {"environments", seeds}, {"max_abs_diff", m}, {"pass", m <= 1e-9}};
  }

  {
    const auto shapes = cfg.shapes("shapes");
    const auto est = stats::expectation_estimate(shapes, static_cast<std::size_t>(cfg.integer("replicas")), seed,
                                                 cfg.real("gamma"), threads);
    std::string csv = "m,n,mean,stderr,mean_over_shape,scaled_deviation,scaled_stderr\n";
    json arr = json::array();
    for (const auto& s : est) {
      const double root = std::sqrt(static_cast<double>(s.m)) + std::sqrt(static_cast<double>(s.n));
      const double ratio = s.mean / (root * root);
      csv += std::to_string(s.m) + "," + std::to_string(s.n) + "," + io::format_double(s.mean) + "," +
             io::format_double(s.stderr_) + "," + io::format_double(ratio) + "," +
             io::format_double(s.scaled_deviation) + "," + io::format_double(s.scaled_stderr) + "\n";
      arr.push_back({{"m", s.m}, {"n", s.n}, {"mean", s.mean}, {"stderr", s.stderr_}, {"mean_over_shape", ratio},
                     {"scaled_deviation", s.scaled_deviation}, {"scaled_stderr", s.scaled_stderr}});
    }
    out.write("expectation.csv", csv);
    j["expectation"] = arr;
  }

  if (const auto seeds = cfg.integer("window_seeds"); seeds > 0) {
    const auto N = cfg.integer("window_N");
    const auto W = lpp::window_floor(N);
    std::vector<int> changed(static_cast<std::size_t>(seeds), 0);
    parallel_for(seeds, threads, [&](std::int64_t s) {
      const lpp::WeightOracle w(seed, static_cast<std::uint64_t>(s));
      const double a = lpp::sweep_line_to_point(w, N, {0, 0}, W).at_offset(0);
      const double b = lpp::sweep_line_to_point(w, N, {0, 0}, 2 * W).at_offset(0);
      changed[static_cast<std::size_t>(s)] = a != b;
    });
    std::size_t total = 0;
    for (int c : changed) total += static_cast<std::size_t>(c);
    const double freq = static_cast<double>(total) / static_cast<double>(seeds);
    j["window_sensitivity"] = {{"N", N}, {"window_halfwidth", W}, {"environments", seeds},
                               {"changed", total}, {"frequency", freq}, {"pass", freq < 1e-2}};
  }
  out.write_json("lpp_checks.json", j);
}

// --- report ---------------------------------------------------------------

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

void cmd_report(const SimConfig& cfg, Outputs& out) {
  json dims = json::array(), tails = json::array(), other = json::array();
  std::string md = "# airydim report\n";
  std::string dim_rows, tail_rows, other_rows;
  for (const auto& dir_text : io::split(cfg.text("inputs"), ',')) {
    const fs::path dir(dir_text);
    if (!fs::exists(dir / "manifest.json"))
      throw ConfigError({"inputs: '" + dir_text + "' has no manifest.json"});
    const json manifest = read_json(dir / "manifest.json");
    const std::string command = manifest.at("command");
    const json& conf = manifest.at("config");
    if (command == "dim") {
      const json dimension = read_json(dir / "dimension.json");
      for (const auto& e : dimension.at("estimates")) {
        json row = e;
        row.erase("nu_at_rho_hat");
        row.erase("residuals");
        row["run"] = dir_text;
        dims.push_back(row);
        const auto rho = e.at("rho_hat");
        const std::string rho_text = rho.is_null() ? "n/a" : io::format_double(rho.get<double>());
        if (e.contains("gamma"))
          dim_rows += "| " + e.at("process").get<std::string>() + " | " + e.at("side").get<std::string>() + " | " +
                      io::format_double(e.at("gamma")) + " | " + rho_text + " | " +
                      io::format_double(e.at("asymptotic_dimension")) + " |\n";
        else
          dim_rows += "| synthetic | - | theta=" + io::format_double(e.at("theta")) + " | " + rho_text + " | " +
                      io::format_double(e.at("expected")) + " |\n";
      }
    } else if (command == "tails") {
      const std::string label = conf.at("statistic").get<std::string>() +
                                (conf.at("statistic") == "interval_min" ? " " + conf.at("mode").get<std::string>()
                                                                        : " " + conf.at("process").get<std::string>() +
                                                                              " " + conf.at("side").get<std::string>());
      json row;
      row["run"] = dir_text;
      row["label"] = label;
      if (fs::exists(dir / "fit.json")) {
        const json fit = read_json(dir / "fit.json");
        row["fit"] = fit;
        tail_rows += "| " + label + " | " +
                     (fit.at("coefficient").is_null() ? "n/a" : io::format_double(fit.at("coefficient"))) + " | " +
                     io::format_double(fit.at("target")) + " | [" + io::format_double(fit.at("band_lo")) + ", " +
                     io::format_double(fit.at("band_hi")) + "] | " + (fit.at("pass").get<bool>() ? "PASS" : "FAIL") +
                     " |\n";
      } else if (fs::exists(dir / "modulus.json")) {
        const json mod = read_json(dir / "modulus.json");
        row["modulus_holds"] = mod.at("holds");
        tail_rows += "| " + label + " | - | e^{-x^2/16} | - | " + (mod.at("holds").get<bool>() ? "PASS" : "FAIL") + " |\n";
      } else {
        row["fit"] = nullptr;
        tail_rows += "| " + label + " | n/a | - | - | FIT IMPOSSIBLE |\n";
      }
      tails.push_back(row);
    } else if (command == "cov") {
      const json c = read_json(dir / "cov.json");
      bool ok = c.at("last_within_3se").get<bool>();
      for (const auto& d : c.at("decrease")) ok = ok && d.at("beyond_2se").get<bool>();
      other.push_back({{"run", dir_text}, {"command", command}, {"pass", ok}});
      other_rows += "| cov | " + std::string(ok ? "PASS" : "FAIL") + " |\n";
    } else if (command == "assoc") {
      const json a = read_json(dir / "assoc.json");
      const bool ok = a.at("flagged").get<std::size_t>() == 0;
      other.push_back({{"run", dir_text}, {"command", command}, {"flagged", a.at("flagged")}, {"pass", ok}});
      other_rows += "| assoc | " + std::string(ok ? "PASS" : "FAIL") + " |\n";
    } else if (command == "lpp-checks") {
      const json l = read_json(dir / "lpp_checks.json");
      bool ok = l.at("brute_force").at("pass").get<bool>() && l.at("geodesic").at("pass").get<bool>();
      if (l.contains("window_sensitivity")) ok = ok && l.at("window_sensitivity").at("pass").get<bool>();
      other.push_back({{"run", dir_text}, {"command", command}, {"pass", ok}});
      other_rows += "| lpp-checks | " + std::string(ok ? "PASS" : "FAIL") + " |\n";
    } else if (command == "thick") {
      const json t = read_json(dir / "thickness.json");
      other.push_back({{"run", dir_text}, {"command", command}, {"lower_bound", t.at("lower_bound")}});
      other_rows += "| thick (lower bound " + io::format_double(t.at("lower_bound")) + ") | - |\n";
    }
  }
  if (!dim_rows.empty())
    md += "\n## Dimension estimates\n\n| process | side | gamma | rho_hat | asymptotic |\n|---|---|---|---|---|\n" + dim_rows;
  if (!tail_rows.empty())
    md += "\n## Tail fits\n\n| statistic | coefficient | target | band | result |\n|---|---|---|---|---|\n" + tail_rows;
  if (!other_rows.empty()) md += "\n## Other checks\n\n| check | result |\n|---|---|\n" + other_rows;
  out.write_json("report.json", {{"dimensions", dims}, {"tails", tails}, {"checks", other}});
  out.write("report.md", md);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunResult run(const SimConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Outputs out(cfg.text("output_dir"));
  RunResult result;
  switch (cfg.command()) {
    case Command::Sample: cmd_sample(cfg, out); break;
    case Command::Extract: cmd_extract(cfg, out); break;
    case Command::Dim: cmd_dim(cfg, out); break;
    case Command::Thick: cmd_thick(cfg, out); break;
    case Command::Tails: cmd_tails(cfg, out, result); break;
    case Command::Cov: cmd_cov(cfg, out); break;
    case Command::Assoc: cmd_assoc(cfg, out); break;
    case Command::LppChecks: cmd_lpp_checks(cfg, out); break;
    case Command::Report: cmd_report(cfg, out); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json m;
  m["tool"] = "airydim";
  m["version"] = AIRYDIM_VERSION;
  m["schema_version"] = kConfigSchemaVersion;
  m["path_schema_version"] = airy::kPathSchemaVersion;
  m["command"] = std::string(to_string(cfg.command()));
  json conf;
  for (const auto& [k, v] : cfg.values()) conf[k] = v;
  m["config"] = conf;
  m["master_seed"] = cfg.uinteger("master_seed");
  if (cfg.has("first_stream")) {
    const char* count_key = cfg.has("replicas") ? "replicas" : (cfg.has("paths") ? "paths" : nullptr);
    m["streams"] = {{"first", cfg.uinteger("first_stream")},
                    {"count", count_key ? cfg.integer(count_key) : 0},
                    {"rule", "replica r uses stream_id = first + r"}};
  }
  m["outputs"] = out.files();
  m["exit_code"] = result.exit_code;
  m["wall_time_s"] = wall;
  m["created_utc"] = utc_now();
  io::write_file_atomic(out.dir() / "manifest.json", m.dump(2) + "\n");

  result.output_dir = out.dir();
  result.files = out.files();
  return result;
}

int exit_code_for(const std::exception& error) noexcept {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const WindowError*>(&error)) return 2;
  if (dynamic_cast<const SizingError*>(&error)) return 3;
  if (dynamic_cast<const FitImpossibleError*>(&error)) return 4;
  return 1;
}

RawConfig config_from_manifest(const fs::path& manifest, Command& command) {
  json m;
  try {
    m = json::parse(io::read_file(manifest));
    command = parse_command(m.at("command").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError({"manifest '" + manifest.string() + "': " + e.what()});
  }
  RawConfig raw;
  for (const auto& [k, v] : m.at("config").items()) raw.entries.emplace_back(k, v.get<std::string>());
  return raw;
}

}  // namespace airydim::cli
