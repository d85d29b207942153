// Acceptance run: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated (red ones included); --strict exits 1 on any
// FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "airydim/airy.hpp"
#include "airydim/errors.hpp"
#include "airydim/fractal.hpp"
#include "airydim/io.hpp"
#include "airydim/levelset.hpp"
#include "airydim/lpp.hpp"
#include "airydim/parallel.hpp"
#include "airydim/path_cache.hpp"
#include "airydim/stats.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "shared_ensembles.hpp"

using namespace airydim;
using airy::Process;
using levelset::Side;
namespace fs = std::filesystem;

namespace {

int g_threads = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid(double from, double to, double step) {
  std::vector<double> g;
  for (int i = 0; from + i * step <= to + 1e-12; ++i) g.push_back(from + i * step);
  return g;
}

// ---------------------------------------------------------------------------

Verdict dp_vs_brute_force() {
  double worst = 0.0;
  const lpp::LatticeVertex origin{0, 0};
  for (std::uint64_t env = 0; env < 100; ++env) {
    const lpp::WeightOracle w(testing::kSeed, env);
    for (std::int64_t a = 1; a <= 5; ++a)
      for (std::int64_t b = 1; b <= 5; ++b) {
        if (a == 1 && b == 1) continue;
        const auto g = lpp::GridWeights::from_oracle(w, a, b);
        const lpp::LatticeVertex t{a - 1, b - 1};
        worst = std::max(worst, std::abs(lpp::passage_time(g, t) - lpp::brute_force_passage(g, std::span(&origin, 1), t)));
      }
  }
  return {worst <= 1e-9, "max |diff| = " + fmt(worst) + " over 100 environments, grids up to 5x5"};
}

Verdict covering_vs_exhaustive() {
  std::mt19937_64 rng(testing::kSeed);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const double lo = std::exp(n), hi = std::exp(n + 1);
    std::uniform_real_distribution<double> u(lo, hi);
    const std::size_t k = 1 + rng() % 10;
    std::set<double> pts;
    while (pts.size() < k) pts.insert(u(rng));
    const fractal::Shell shell{n, {pts.begin(), pts.end()}};
    for (double rho : {0.3, 0.5, 0.8}) {
      const double brute = fractal::shell_content_bruteforce(shell, rho);
      for (auto algo : {fractal::ContentAlgorithm::Quadratic, fractal::ContentAlgorithm::Concave})
        worst = std::max(worst, std::abs(fractal::shell_content(shell, rho, algo).nu - brute));
    }
  }
  return {worst <= 1e-12, "max |diff| = " + fmt(worst) + " over 200 shells, rho in {0.3, 0.5, 0.8}"};
}

Verdict synthetic_dimension() {
  bool ok = true;
  std::string d;
  fractal::DimensionOptions opt;
  opt.threads = g_threads;
  for (double theta : {0.25, 0.5, 0.75}) {
    const double r = fractal::estimate_dimension(fractal::make_synthetic(theta, 6, 12), 6, 12, opt).rho_hat;
    ok = ok && std::abs(r - (1 - theta)) <= 0.05;
    d += "theta=" + fmt(theta) + ": " + fmt(r) + " (want " + fmt(1 - theta) + "); ";
  }
  std::vector<double> one, ints;
  for (int n = 6; n <= 12; ++n) {
    one.push_back(std::exp(n) + 0.5);
    for (double t = std::ceil(std::exp(n)); t < std::exp(n + 1); t += 1.0) ints.push_back(t);
  }
  const double r1 = fractal::estimate_dimension(levelset::PointSet(one), 6, 12, opt).rho_hat;
  const double ri = fractal::estimate_dimension(levelset::PointSet(ints), 6, 12, opt).rho_hat;
  ok = ok && r1 <= 0.05 && std::abs(ri - 1.0) <= 0.05;
  d += "one per shell: " + fmt(r1) + "; all integers: " + fmt(ri);
  return {ok, d};
}

Verdict thickness_consistency() {
  bool ok = true;
  std::string d;
  const auto thetas = grid(0.05, 0.95, 0.05);
  for (double theta : {0.25, 0.5, 0.75}) {
    const auto set = fractal::make_synthetic(theta, 6, 12);
    for (double tp : thetas) {
      const bool holds = fractal::check_thickness(set, tp, 6, 12).holds;
      if (tp >= theta + 0.1 - 1e-9 && !holds) ok = false, d += "S_" + fmt(theta) + " fails theta'=" + fmt(tp) + "; ";
      if (tp <= theta - 0.1 + 1e-9 && holds) ok = false, d += "S_" + fmt(theta) + " passes theta'=" + fmt(tp) + "; ";
    }
    const double lb = fractal::thickness_lower_bound(set, thetas, 6, 12);
    ok = ok && std::abs(lb - (1 - theta)) <= 0.1;
    d += "lower bound(S_" + fmt(theta) + ") = " + fmt(lb) + "; ";
  }
  return {ok, d};
}

Verdict lpp_expectation() {
  const std::vector<std::pair<std::int64_t, std::int64_t>> shapes{{200, 200}, {500, 500}};
  const auto est = stats::expectation_estimate(shapes, 500, testing::kSeed, 0.5, g_threads);
  bool ok = true;
  std::string d;
  for (const auto& s : est) {
    const double ratio = s.mean / (4.0 * static_cast<double>(s.n));
    ok = ok && ratio >= 0.95 && ratio <= 1.0 && std::abs(s.scaled_deviation) <= 10.0;
    d += "n=" + std::to_string(s.n) + ": mean/4n=" + fmt(ratio, 6) + " scaled dev=" + fmt(s.scaled_deviation) + " +- " +
         fmt(s.scaled_stderr, 2) + "; ";
  }
  const double joint = std::hypot(est[0].scaled_stderr, est[1].scaled_stderr);
  const double gap = std::abs(est[0].scaled_deviation - est[1].scaled_deviation);
  ok = ok && gap <= 3.0 * joint;
  d += "|gap| = " + fmt(gap) + " vs 3 joint stderr " + fmt(3.0 * joint);
  return {ok, d};
}

// Tail fits: grids are fixed per statistic; the events >= 20 rule picks the
// usable part.
const std::vector<double> kUpperGrid = grid(0.5, 3.0, 0.25);
const std::vector<double> kAiry1LowerGrid = grid(1.5, 4.0, 0.25);
const std::vector<double> kAiry2LowerGrid = grid(2.5, 5.5, 0.25);

struct FitLine {
  bool pass = false;
  std::string text;
  stats::TailFit tail;
};

FitLine fit_line(const std::string& name, std::span<const double> samples, Side side, std::span<const double> x,
                 double power, bool inclusive, stats::Band band) {
  FitLine out;
  out.tail = stats::tail_estimate(samples, side, x, inclusive);
  try {
    stats::fit(out.tail, power);
    out.pass = band.contains(out.tail.coefficient);
    std::size_t used = 0;
    double x_lo = 0, x_hi = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (out.tail.used_in_fit[i]) {
        if (used++ == 0) x_lo = x[i];
        x_hi = x[i];
      }
    out.text = name + " c=" + fmt(out.tail.coefficient) + " [" + fmt(out.tail.ci_lo) + ", " + fmt(out.tail.ci_hi) +
               "] band [" + fmt(band.lower()) + ", " + fmt(band.upper()) + "] x in [" + fmt(x_lo) + ", " + fmt(x_hi) +
               "] " + (out.pass ? "ok" : "OUT");
  } catch (const FitImpossibleError& e) {
    out.text = name + " fit impossible: " + e.what();
  }
  return out;
}

Verdict tail_exponents() {
  const auto& p2p = testing::shared_p2p(g_threads);
  const auto& l2p = testing::shared_l2p(g_threads);
  const double a1_up = 4.0 * std::numbers::sqrt2 / 3.0;
  std::vector<FitLine> lines;
  lines.push_back(fit_line("A1 upper", stats::one_point_samples(l2p, Process::Airy1), Side::Upper, kUpperGrid, 1.5,
                           false, {a1_up}));
  lines.push_back(fit_line("A2 upper", stats::one_point_samples(p2p, Process::Airy2), Side::Upper, kUpperGrid, 1.5,
                           false, {4.0 / 3.0}));
  lines.push_back(fit_line("A1 lower", stats::one_point_samples(l2p, Process::Airy1), Side::Lower, kAiry1LowerGrid,
                           3.0, false, {1.0 / 3.0}));
  lines.push_back(fit_line("A2 interval-min", stats::interval_min_samples(p2p, 0.1, 0.0), Side::Lower,
                           kAiry2LowerGrid, 3.0, true, {1.0 / 12.0, 0.6, 1.4}));
  lines.push_back(fit_line("l2p interval-min", stats::interval_min_samples(l2p, 0.1, 0.0), Side::Lower,
                           kAiry2LowerGrid, 3.0, true, {1.0 / 6.0, 0.6, 1.4}));
  bool ok = true;
  std::string d;
  for (const auto& l : lines) {
    ok = ok && l.pass;
    d += "\n    " + l.text;
  }
  return {ok, d};
}

Verdict running_max_tail() {
  const auto& l2p = testing::shared_l2p(g_threads);
  const auto one = stats::one_point_samples(l2p, Process::Airy1);
  const auto mx = stats::running_extreme_samples(l2p, Process::Airy1, Side::Upper, 0.0, 1.0);
  const FitLine f = fit_line("A1 running max [0,1]", mx, Side::Upper, kUpperGrid, 1.5, false,
                             {4.0 * std::numbers::sqrt2 / 3.0});
  const auto t1 = stats::tail_estimate(one, Side::Upper, kUpperGrid);
  bool dominated = true;
  for (std::size_t i = 0; i < kUpperGrid.size(); ++i)
    dominated = dominated && f.tail.p_hat[i] >= t1.p_hat[i] - 3.0 * t1.stderr_[i];
  std::string d = f.text + "; p(max > x) >= p(one-point > x) - 3 stderr at every x: " + (dominated ? "yes" : "no");
  // Stride sensitivity of the same fit, reported only.
  for (std::int64_t s : {4, 16}) {
    stats::TailFit coarse = stats::tail_estimate(
        stats::running_extreme_samples(l2p, Process::Airy1, Side::Upper, 0.0, 1.0, s), Side::Upper, kUpperGrid);
    try {
      stats::fit(coarse, 1.5);
      d += "; stride " + std::to_string(s) + ": c=" + fmt(coarse.coefficient);
    } catch (const FitImpossibleError&) {
      d += "; stride " + std::to_string(s) + ": no fit";
    }
  }
  return {f.pass && dominated, d};
}

Verdict covariance_decay() {
  const auto& l2p = testing::shared_l2p(g_threads);
  const std::vector<double> t{0.5, 1.0, 2.0, 3.0};
  const auto c = stats::covariance_airy1(l2p, t, 10000);
  bool ok = true;
  std::string d;
  for (std::size_t i = 0; i < t.size(); ++i) d += "cov(" + fmt(t[i]) + ")=" + fmt(c.cov_hat[i]) + " +- " + fmt(c.stderr_[i], 2) + "; ";
  for (std::size_t i = 0; i + 2 < t.size(); ++i) {
    const double drop = c.cov_hat[i] - c.cov_hat[i + 1];
    ok = ok && drop > 2.0 * c.diff_stderr[i];
    d += "drop " + fmt(t[i]) + "->" + fmt(t[i + 1]) + " = " + fmt(drop) + " (2 paired stderr " + fmt(2.0 * c.diff_stderr[i]) + "); ";
  }
  ok = ok && std::abs(c.cov_hat.back()) <= 3.0 * c.stderr_.back();
  return {ok, d + "10000 replicas"};
}

Verdict association() {
  const auto& l2p = testing::shared_l2p(g_threads);
  const std::vector<double> times{0.0, 2.0 / 3.0, 4.0 / 3.0, 2.0};
  const std::vector<double> levels{-1.0, 0.0, 1.0};
  std::vector<std::pair<double, double>> pairs, thr;
  for (double s : times)
    for (double t : times) pairs.emplace_back(s, t);
  for (double a : levels)
    for (double b : levels) thr.emplace_back(a, b);
  const auto r = stats::association_check(l2p, pairs, thr, -1.0);
  double worst = 1e300;
  for (const auto& e : r.entries)
    if (e.stderr_ > 0) worst = std::min(worst, e.cov / e.stderr_);
  return {r.flagged == 0, std::to_string(r.entries.size()) + " covariances, " + std::to_string(r.flagged) +
                              " below -3 stderr; smallest cov/stderr = " + fmt(worst)};
}

// 20 Airy2 paths at N = 1e5 over t in [2.5, 20.1], covering shells 1-2.
Verdict level_set_trend() {
  const std::int64_t N = 100000;
  const fs::path dir = fs::path(AIRYDIM_MC_CACHE) / "airy2-N100000";
  fs::create_directories(dir);
  airy::SamplerOptions opt;
  opt.centering = airy::Centering::Characteristic;
  opt.horizon_fraction = 0.7;
  opt.threads = g_threads;
  std::vector<airy::PathSample> paths;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::uint64_t stream = 1000000 + i;
    const fs::path file = dir / ("path_" + std::to_string(stream) + ".txt");
    if (fs::exists(file)) {
      auto p = airy::cache_read(file);
      if (p.N == N && p.master_seed == testing::kSeed && p.stream_id == stream && p.centering == opt.centering &&
          p.horizon_fraction == opt.horizon_fraction) {
        paths.push_back(std::move(p));
        continue;
      }
    }
    paths.push_back(airy::sample_airy2(lpp::WeightOracle(testing::kSeed, stream), N, 2.5, 20.1, 1, opt));
    airy::cache_write(paths.back(), file);
  }
  fractal::DimensionOptions dopt;
  dopt.min_shells = 2;
  dopt.threads = g_threads;
  std::vector<double> rho;
  std::string d;
  for (double g : {0.3, 0.5, 0.8}) {
    std::vector<levelset::PointSet> sets;
    std::size_t points = 0;
    for (const auto& p : paths) {
      sets.push_back(levelset::extract(p, {Process::Airy2, Side::Upper, g}));
      points += sets.back().size();
    }
    try {
      rho.push_back(fractal::estimate_dimension_pooled(sets, 1, 2, dopt).rho_hat);
    } catch (const InsufficientDataError& e) {
      rho.push_back(std::nan(""));
      d += "gamma=" + fmt(g) + ": " + e.what() + "; ";
    }
    d += "gamma=" + fmt(g) + ": rho=" + fmt(rho.back()) + " (" + std::to_string(points) + " points); ";
  }
  const bool ok = rho[0] >= rho[1] && rho[1] >= rho[2] && rho[0] - rho[2] >= 0.1;
  return {ok, d + "nonincreasing and drop >= 0.1"};
}

Verdict determinism() {
  bool ok = true;
  std::string d;
  // Ensemble replicas recomputed with different thread counts match the cache.
  auto spec = testing::l2p_spec(1);
  spec.replicas = 24;
  const auto& shared = testing::shared_l2p(g_threads);
  for (int threads : {1, 4}) {
    spec.threads = threads;
    const auto e = stats::run_ensemble(spec);
    const bool same = std::equal(e.data().begin(), e.data().end(), shared.data().begin());
    ok = ok && same;
    d += "l2p replicas 0-23 at " + std::to_string(threads) + " threads: " + (same ? "identical" : "DIFFER") + "; ";
  }

  // CLI runs at 1 and 4 threads give byte-identical data files.
  const fs::path root = fs::temp_directory_path() / "airydim_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<cli::Command, std::string>> runs{
      {cli::Command::Sample, "process=airy1\nN=2000\nt_start=0\nt_end=1\npaths=3\n"},
      {cli::Command::Sample, "process=airy2\nN=3000\nt_start=0\nt_end=1\npaths=1\n"},
      {cli::Command::Tails, "statistic=running_extreme\nprocess=airy2\nside=lower\nN=300\nreplicas=400\n"
                            "x_grid=0.5,1,1.5,2,2.5\nt0=0\nt1=1\nstrides=2,4\n"},
      {cli::Command::Cov, "N=400\nreplicas=300\nt_grid=0,0.5,1\n"},
      {cli::Command::Dim, "synthetic_theta=0.5\n"},
      {cli::Command::LppChecks, "environments=10\ngeodesic_seeds=5\nshapes=60:60\nreplicas=40\nwindow_N=200\nwindow_seeds=4\n"},
  };
  std::size_t files = 0, differing = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (int threads : {1, 4}) {
      const fs::path out = root / (std::to_string(i) + "_t" + std::to_string(threads));
      const auto cfg = cli::validate(runs[i].first, cli::parse_config_text(runs[i].second + "threads=" + std::to_string(threads) +
                                                                          "\noutput_dir=" + out.string() + "\n"));
      cli::run(cfg);
      dirs.push_back(out);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().filename() == "manifest.json") continue;
      ++files;
      const fs::path other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || io::read_file(entry.path()) != io::read_file(other)) ++differing;
    }
  }
  fs::remove_all(root);
  ok = ok && differing == 0 && files > 0;
  d += std::to_string(files) + " CLI data files compared at 1 and 4 threads, " + std::to_string(differing) + " differ";
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airydim acceptance criteria"};
  std::vector<int> only;
  bool strict = false;
  std::string report_path;
  app.add_option("--threads", g_threads, "worker threads (0 = all cores)");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_flag("--strict", strict, "exit 1 if any criterion fails");
  app.add_option("--report", report_path, "also write the PASS/FAIL lines to this file");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::string name;
    double budget_s;  // runtime limit, 0 = none
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "DP vs brute force", 10, dp_vs_brute_force},
      {2, "covering DP vs exhaustive partitions", 10, covering_vs_exhaustive},
      {3, "synthetic dimension", 60, synthetic_dimension},
      {4, "thickness consistency", 60, thickness_consistency},
      {5, "LPP expectation", 300, lpp_expectation},
      {6, "tail exponents", 3600, tail_exponents},
      {7, "running-max tail", 0, running_max_tail},
      {8, "covariance decay", 900, covariance_decay},
      {9, "association", 900, association},
      {10, "level-set dimension trend", 3600, level_set_trend},
      {11, "determinism", 0, determinism},
  };

  int failed = 0;
  std::string lines;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double s = seconds_since(t0);
    if (c.budget_s > 0 && s > c.budget_s) {
      v.pass = false;
      v.detail += "; over the " + fmt(c.budget_s) + " s budget";
    }
    failed += !v.pass;
    const std::string line = std::string(v.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" +
                             c.name + ", " + fmt(s, 3) + " s): " + v.detail + "\n";
    std::cout << line << std::flush;
    lines += line;
  }
  if (!report_path.empty()) io::write_file_atomic(report_path, lines);
  return strict && failed > 0 ? 1 : 0;
}
