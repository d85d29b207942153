#include "airydim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "airydim/errors.hpp"
#include "airydim/parallel.hpp"

namespace airydim::stats {

namespace {

void require_mode(const Ensemble& e, airy::Process p) {
  const auto want = p == airy::Process::Airy2 ? lpp::SweepMode::PointToPoint : lpp::SweepMode::LineToPoint;
  if (e.spec().mode != want)
    throw ProcessMismatchError(std::string(airy::to_string(p)) + " values need a " +
                               (want == lpp::SweepMode::PointToPoint ? "point-to-point" : "line-to-point") +
                               " ensemble");
}

double value(const Ensemble& e, airy::Process p, std::size_t r, std::int64_t k) {
  return p == airy::Process::Airy2 ? e.airy2(r, k) : e.airy1(r, k);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample covariance of (x, y) and its standard error; `z` receives the
// centred products so differences can be paired.
std::pair<double, double> covariance(std::span<const double> x, std::span<const double> y,
                                     std::vector<double>& z) {
  const std::size_t R = x.size();
  const double mx = mean_of(x), my = mean_of(y);
  z.resize(R);
  for (std::size_t r = 0; r < R; ++r) z[r] = (x[r] - mx) * (y[r] - my);
  const double mz = mean_of(z);
  double ss = 0.0;
  for (double v : z) ss += (v - mz) * (v - mz);
  const double n = static_cast<double>(R);
  const double cov = mz * n / (n - 1.0);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  return {cov, se};
}

double paired_stderr(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t R = a.size();
  std::vector<double> d(R);
  for (std::size_t r = 0; r < R; ++r) d[r] = a[r] - b[r];
  const double md = mean_of(d);
  double ss = 0.0;
  for (double v : d) ss += (v - md) * (v - md);
  const double n = static_cast<double>(R);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

double tail_power(Side side) noexcept { return side == Side::Upper ? 1.5 : 3.0; }

std::vector<double> one_point_samples(const Ensemble& e, airy::Process p, double shift) {
  require_mode(e, p);
  const std::int64_t k = e.offset_for(p, shift);
  std::vector<double> out(e.replicas());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = value(e, p, r, k);
  return out;
}

TailFit tail_one_point(const Ensemble& e, airy::Process p, Side side,
                       std::span<const double> x_grid, double shift) {
  const auto samples = one_point_samples(e, p, shift);
  TailFit t = tail_estimate(samples, side, x_grid);
  t.N = e.N();
  t.master_seed = e.spec().master_seed;
  fit(t, tail_power(side));
  return t;
}

std::vector<double> running_extreme_samples(const Ensemble& e, airy::Process p, Side side,
                                            double t0, double t1, std::int64_t stride) {
  require_mode(e, p);
  if (!(t1 >= t0)) throw std::invalid_argument("running extreme needs t0 <= t1");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const std::int64_t k0 = e.offset_for(p, t0);
  const std::int64_t k1 = e.offset_for(p, t1);
  if (!e.has_offset(k0) || !e.has_offset(k1))
    throw SizingError("interval [" + std::to_string(t0) + ", " + std::to_string(t1) +
                          "] is outside the ensemble's offsets",
                      std::max(std::abs(e.spec().offsets.first), std::abs(e.spec().offsets.last)), 0);
  std::vector<double> out(e.replicas());
  for (std::size_t r = 0; r < out.size(); ++r) {
    double ext = value(e, p, r, k0);
    for (std::int64_t k = k0 + stride; k <= k1; k += stride) {
      const double v = value(e, p, r, k);
      ext = side == Side::Upper ? std::max(ext, v) : std::min(ext, v);
    }
    out[r] = ext;
  }
  return out;
}

RunningExtremeReport tail_running_extreme(const Ensemble& e, airy::Process p, Side side, double t0,
                                          double t1, std::span<const double> x_grid,
                                          std::span<const std::int64_t> strides) {
  RunningExtremeReport report;
  const auto samples = running_extreme_samples(e, p, side, t0, t1, 1);
  report.tail = tail_estimate(samples, side, x_grid);
  report.tail.N = e.N();
  report.tail.master_seed = e.spec().master_seed;
  fit(report.tail, tail_power(side));
  for (std::int64_t stride : strides) {
    TailFit coarse = tail_estimate(running_extreme_samples(e, p, side, t0, t1, stride), side, x_grid);
    double c = std::numeric_limits<double>::quiet_NaN();
    try {
      fit(coarse, tail_power(side));
      c = coarse.coefficient;
    } catch (const FitImpossibleError&) {
    }
    report.stride_sensitivity.emplace_back(stride, c);
  }
  return report;
}

double stay_probability(std::span<const double> extremes, Side side, double x) {
  if (extremes.empty()) throw std::invalid_argument("no samples");
  std::size_t stay = 0;
  for (double v : extremes) stay += (side == Side::Upper ? v <= x : v >= -x) ? 1 : 0;
  return static_cast<double>(stay) / static_cast<double>(extremes.size());
}

CovEstimate covariance_airy1(const Ensemble& e, std::span<const double> t_grid,
                             std::size_t replicas, double shift) {
  require_mode(e, airy::Process::Airy1);
  const std::size_t R = replicas == 0 ? e.replicas() : std::min(replicas, e.replicas());
  if (R < 2) throw InsufficientDataError("covariance needs at least 2 replicas");
  CovEstimate out;
  out.replicas = R;
  std::vector<std::vector<double>> products;
  std::vector<double> x(R), y(R);
  for (double t : t_grid) {
    const std::int64_t k1 = e.offset_for(airy::Process::Airy1, shift - 0.5 * t);
    const std::int64_t k2 = e.offset_for(airy::Process::Airy1, shift + 0.5 * t);
    for (std::size_t r = 0; r < R; ++r) {
      x[r] = e.airy1(r, k1);
      y[r] = e.airy1(r, k2);
    }
    std::vector<double> z;
    const auto [cov, se] = covariance(x, y, z);
    out.t_grid.push_back(t);
    out.cov_hat.push_back(cov);
    out.stderr_.push_back(se);
    products.push_back(std::move(z));
  }
  for (std::size_t i = 0; i + 1 < products.size(); ++i)
    out.diff_stderr.push_back(paired_stderr(products[i], products[i + 1]));
  return out;
}

AssociationReport association_check(const Ensemble& e,
                                    std::span<const std::pair<double, double>> pairs,
                                    std::span<const std::pair<double, double>> thresholds,
                                    double shift) {
  require_mode(e, airy::Process::Airy1);
  const std::size_t R = e.replicas();
  if (R < 2) throw InsufficientDataError("association check needs at least 2 replicas");
  AssociationReport report;
  std::vector<double> xs(R), ys(R), ix(R), iy(R), z;
  for (const auto& [s, t] : pairs) {
    const std::int64_t ks = e.offset_for(airy::Process::Airy1, s + shift);
    const std::int64_t kt = e.offset_for(airy::Process::Airy1, t + shift);
    for (std::size_t r = 0; r < R; ++r) {
      xs[r] = e.airy1(r, ks);
      ys[r] = e.airy1(r, kt);
    }
    for (const auto& [a, b] : thresholds) {
      for (std::size_t r = 0; r < R; ++r) {
        ix[r] = xs[r] <= a ? 1.0 : 0.0;
        iy[r] = ys[r] <= b ? 1.0 : 0.0;
      }
      const auto [cov, se] = covariance(ix, iy, z);
      AssociationEntry entry{s, t, a, b, cov, se, cov < -3.0 * se};
      report.flagged += entry.flagged ? 1 : 0;
      report.entries.push_back(entry);
    }
  }
  return report;
}

std::vector<ShapeEstimate> expectation_estimate(
    std::span<const std::pair<std::int64_t, std::int64_t>> shapes, std::size_t replicas,
    std::uint64_t seed, double gamma, int threads) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (replicas < 2) throw InsufficientDataError("expectation estimate needs at least 2 replicas");
  std::vector<ShapeEstimate> out;
  for (const auto& [m, n] : shapes) {
    if (m < 1 || n < 1) throw std::invalid_argument("shape coordinates must be positive");
    const double ratio = static_cast<double>(m) / static_cast<double>(n);
    if (ratio < gamma || ratio > 1.0 / gamma)
      throw std::invalid_argument("shape (" + std::to_string(m) + "," + std::to_string(n) +
                                  ") has m/n outside [gamma, 1/gamma]");
    std::vector<double> T(replicas);
    parallel_for(static_cast<std::int64_t>(replicas), threads, [&](std::int64_t r) {
      const lpp::WeightOracle oracle(seed, static_cast<std::uint64_t>(r));
      T[static_cast<std::size_t>(r)] = lpp::passage_time(oracle, lpp::LatticeVertex{m, n});
    });
    ShapeEstimate est;
    est.m = m;
    est.n = n;
    est.replicas = replicas;
    est.mean = mean_of(T);
    double ss = 0.0;
    for (double v : T) ss += (v - est.mean) * (v - est.mean);
    const double R = static_cast<double>(replicas);
    est.stderr_ = std::sqrt(ss / (R - 1.0) / R);
    const double root = std::sqrt(static_cast<double>(m)) + std::sqrt(static_cast<double>(n));
    const double scale = std::cbrt(static_cast<double>(n));
    est.scaled_deviation = (est.mean - root * root) / scale;
    est.scaled_stderr = est.stderr_ / scale;
    out.push_back(est);
  }
  return out;
}

lpp::OffsetRange interval_offsets(std::int64_t N, double delta, double m) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  const double R = airy::lattice_scale(N);
  const auto length = static_cast<std::int64_t>(std::floor(delta * R));
  const auto centre = static_cast<std::int64_t>(std::floor(m * R));
  return {centre - length / 2, centre + length / 2};
}

std::vector<double> interval_min_samples(const Ensemble& e, double delta, double m) {
  const lpp::OffsetRange I = interval_offsets(e.N(), delta, m);
  if (!e.has_offset(I.first) || !e.has_offset(I.last))
    throw SizingError("interval offsets [" + std::to_string(I.first) + ", " + std::to_string(I.last) +
                          "] are outside the ensemble",
                      std::max(std::abs(e.spec().offsets.first), std::abs(e.spec().offsets.last)), 0);
  const bool line = e.spec().mode == lpp::SweepMode::LineToPoint;
  std::vector<double> out(e.replicas());
  for (std::size_t r = 0; r < out.size(); ++r) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::int64_t k = I.first; k <= I.last; ++k)
      lo = std::min(lo, line ? e.scaled(r, k) : e.airy2(r, k));
    out[r] = lo;
  }
  return out;
}

TailFit min_interval_tails(const Ensemble& e, double delta, double m, std::span<const double> x_grid) {
  TailFit t = tail_estimate(interval_min_samples(e, delta, m), Side::Lower, x_grid, true);
  t.N = e.N();
  t.master_seed = e.spec().master_seed;
  fit(t, 3.0);
  return t;
}

std::vector<double> modulus_samples(const Ensemble& e, double horizon) {
  require_mode(e, airy::Process::Airy2);
  const std::int64_t k1 = e.offset_for(airy::Process::Airy2, horizon);
  if (!e.has_offset(0) || !e.has_offset(k1))
    throw SizingError("modulus horizon exceeds the ensemble's offsets",
                      std::max(std::abs(e.spec().offsets.first), std::abs(e.spec().offsets.last)), 0);
  std::vector<double> out(e.replicas());
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double v0 = e.airy2(r, 0);
    double sup = 0.0;
    for (std::int64_t k = 1; k <= k1; ++k) sup = std::max(sup, std::abs(e.airy2(r, k) - v0));
    out[r] = sup;
  }
  return out;
}

ModulusReport modulus_check(const Ensemble& e, std::span<const double> x_grid, double horizon) {
  ModulusReport report;
  report.tail = tail_estimate(modulus_samples(e, horizon), Side::Upper, x_grid, true);
  report.tail.N = e.N();
  report.tail.master_seed = e.spec().master_seed;
  try {
    fit(report.tail, 2.0);
  } catch (const FitImpossibleError&) {
    report.tail.power = 2.0;
  }
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double b = std::exp(-x_grid[i] * x_grid[i] / 16.0);
    const bool ok = report.tail.p_hat[i] <= b + 3.0 * report.tail.stderr_[i];
    report.bound.push_back(b);
    report.within.push_back(ok);
    report.holds = report.holds && ok;
  }
  return report;
}

}  // namespace airydim::stats
