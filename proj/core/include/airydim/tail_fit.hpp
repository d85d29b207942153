#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "airydim/levelset.hpp"

// Empirical tail probabilities and the fit -log p(x) = a + c x^power.
namespace airydim::stats {

using levelset::Side;

inline constexpr std::size_t kMinEvents = 20;

struct TailFit {
  double power = 1.5;
  std::vector<double> x_grid;
  std::vector<double> p_hat;
  std::vector<double> stderr_;
  std::vector<std::size_t> events;
  std::vector<bool> used_in_fit;

  bool fitted = false;
  double coefficient = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();

  std::size_t replicas = 0;
  std::int64_t N = 0;
  std::uint64_t master_seed = 0;
};

// Counts, per x, samples with v > x (upper) or v < -x (lower); with
// `inclusive` the comparisons are >= and <=. No fit is attempted.
TailFit tail_estimate(std::span<const double> samples, Side side, std::span<const double> x_grid,
                      bool inclusive = false);

// Least-squares fit over grid points with at least min_events events. The 95%
// interval uses the delta method with the covariance of nested tail events,
// Cov(log p_i, log p_j) = (1 - p_i) / (R p_i) for p_i >= p_j. Throws
// FitImpossibleError, naming the usable x range, when fewer than two points
// qualify.
void fit(TailFit& tail, double power, std::size_t min_events = kMinEvents);

// Target coefficient with a multiplicative acceptance band.
struct Band {
  double target = 0.0;
  double lo = 0.65;
  double hi = 1.35;

  double lower() const noexcept { return lo * target; }
  double upper() const noexcept { return hi * target; }
  bool contains(double c) const noexcept { return c >= lower() && c <= upper(); }
};

// Fraction of bootstrap resamples (replicas drawn with replacement) whose
// refitted coefficient lies within one CI width of the original.
double bootstrap_stability(std::span<const double> samples, Side side,
                           std::span<const double> x_grid, double power, std::size_t rounds,
                           std::uint64_t seed, bool inclusive = false);

// "x,p_hat,stderr,used_in_fit" rows.
std::string render_tail_csv(const TailFit& tail);
// {power, coefficient, ci_lo, ci_hi, target, band_lo, band_hi, pass}
std::string render_fit_json(const TailFit& tail, const Band& band);

}  // namespace airydim::stats
