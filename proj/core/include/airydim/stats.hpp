#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "airydim/ensemble.hpp"
#include "airydim/tail_fit.hpp"

// Monte Carlo checks of tail, covariance, association and LPP estimates.
//
// The ensemble-based entry points read process values off shared replica
// ensembles. Both processes are stationary, so a window of times may be read
// at any lattice position: `shift` moves every requested time by a constant
// before it is mapped to an offset.
namespace airydim::stats {

// Exponent power: 3/2 for upper tails, 3 for lower tails.
double tail_power(Side side) noexcept;

// Process value at time 0 (plus shift) for every replica.
std::vector<double> one_point_samples(const Ensemble& e, airy::Process p, double shift = 0.0);

// Fitted one-point tail. x_grid holds positive x; lower tails count v < -x.
TailFit tail_one_point(const Ensemble& e, airy::Process p, Side side,
                       std::span<const double> x_grid, double shift = 0.0);

// Running max (upper) or min (lower) over lattice offsets covering [t0, t1]
// in steps of `stride` offsets, per replica.
std::vector<double> running_extreme_samples(const Ensemble& e, airy::Process p, Side side,
                                            double t0, double t1, std::int64_t stride = 1);

struct RunningExtremeReport {
  TailFit tail;
  // Coefficient refitted on coarser grids: (stride, coefficient or NaN).
  std::vector<std::pair<std::int64_t, double>> stride_sensitivity;
};

RunningExtremeReport tail_running_extreme(const Ensemble& e, airy::Process p, Side side, double t0,
                                          double t1, std::span<const double> x_grid,
                                          std::span<const std::int64_t> strides = {});

// P(sup over [t0, t1] <= x) for upper, P(inf >= -x) for lower.
double stay_probability(std::span<const double> extremes, Side side, double x);

struct CovEstimate {
  std::vector<double> t_grid;
  std::vector<double> cov_hat;
  std::vector<double> stderr_;
  // stderr of cov_hat[i] - cov_hat[i + 1], from paired replicas.
  std::vector<double> diff_stderr;
  std::size_t replicas = 0;
};

// Cov(A1(-t/2), A1(t/2)) for each t, from the first `replicas` replicas
// (0 = all). By stationarity this is Cov(A1(0), A1(t)).
CovEstimate covariance_airy1(const Ensemble& e, std::span<const double> t_grid,
                             std::size_t replicas = 0, double shift = 0.0);

struct AssociationEntry {
  double s = 0.0, t = 0.0, a = 0.0, b = 0.0;
  double cov = 0.0;
  double stderr_ = 0.0;
  bool flagged = false;  // cov < -3 stderr
};

struct AssociationReport {
  std::vector<AssociationEntry> entries;
  std::size_t flagged = 0;
};

// Cov(1{A1(s) <= a}, 1{A1(t) <= b}) for every (s, t) pair and (a, b) threshold.
AssociationReport association_check(const Ensemble& e,
                                    std::span<const std::pair<double, double>> pairs,
                                    std::span<const std::pair<double, double>> thresholds,
                                    double shift = 0.0);

struct ShapeEstimate {
  std::int64_t m = 0, n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  // (mean - (sqrt m + sqrt n)^2) / n^{1/3} and its stderr.
  double scaled_deviation = 0.0;
  double scaled_stderr = 0.0;
  std::size_t replicas = 0;
};

// Point-to-point passage time to (m, n), replica r from stream r. Shapes must
// satisfy gamma <= m/n <= 1/gamma.
std::vector<ShapeEstimate> expectation_estimate(std::span<const std::pair<std::int64_t, std::int64_t>> shapes,
                                                std::size_t replicas, std::uint64_t seed,
                                                double gamma = 0.5, int threads = 1);

// Offsets of the interval of length floor(delta (2N)^{2/3}) centred at
// floor(m (2N)^{2/3}) on the target anti-diagonal.
lpp::OffsetRange interval_offsets(std::int64_t N, double delta, double m);

// Interval minimum per replica: (T* - 4N)/sigma for line-to-point ensembles,
// (T - 4N)/sigma + s^2 for point-to-point ones.
std::vector<double> interval_min_samples(const Ensemble& e, double delta, double m);

// Lower tail P(min <= -x) with a cubic fit.
TailFit min_interval_tails(const Ensemble& e, double delta, double m, std::span<const double> x_grid);

struct ModulusReport {
  TailFit tail;  // P(sup |A2(s) - A2(0)| >= x), fitted with power 2 when possible
  std::vector<double> bound;  // e^{-x^2/16}
  std::vector<bool> within;   // p_hat <= bound + 3 stderr
  bool holds = true;
};

// sup over s in [0, horizon] of |A2(s) - A2(0)|, from a point-to-point ensemble.
std::vector<double> modulus_samples(const Ensemble& e, double horizon = 2.0);
ModulusReport modulus_check(const Ensemble& e, std::span<const double> x_grid, double horizon = 2.0);

}  // namespace airydim::stats
