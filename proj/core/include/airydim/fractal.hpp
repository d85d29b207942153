#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "airydim/levelset.hpp"

// Macroscopic Hausdorff content on exponential shells [e^n, e^{n+1}).
namespace airydim::fractal {

using levelset::PointSet;

struct Shell {
  int n = 1;
  std::vector<double> points;  // sorted, inside [e^n, e^{n+1})
};

struct ShellDecomposition {
  // One entry per n in [n_min, n_max], empty shells included.
  std::vector<Shell> shells;
  std::size_t dropped_below = 0;
  std::size_t dropped_above = 0;
};

// Throws std::invalid_argument unless 1 <= n_min <= n_max.
ShellDecomposition shell_decompose(const PointSet& set, int n_min, int n_max);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ShellContent {
  double nu = 0.0;
  std::vector<Interval> cover;  // an optimal cover, left to right
};

// Quadratic: every partition into runs of consecutive points, O(k^2).
// Concave: O(k log k), exploiting concavity of the group cost in the span.
// Auto: quadratic for small shells.
enum class ContentAlgorithm { Auto, Quadratic, Concave };

// Cost of one group of points with the given span: (max(1, span) / e^n)^rho.
double group_cost(double span, int n, double rho);

// Exact nu_rho^n: minimum over covers by intervals of length >= 1 of
// sum (length / e^n)^rho. Among optimal covers, fewer intervals win, then the
// one whose last interval starts earliest.
ShellContent shell_content(const Shell& shell, double rho,
                           ContentAlgorithm algorithm = ContentAlgorithm::Auto);

// Exhaustive minimum over all 2^{k-1} partitions; k <= 12.
double shell_content_bruteforce(const Shell& shell, double rho);

// Cost of a cover when each interval is charged (max(1, length) / e^n)^rho.
double cover_cost(const std::vector<Interval>& cover, int n, double rho);

struct ShellTable {
  std::vector<double> rho_grid;
  std::vector<int> shells;
  // nu[s][r] for shells[s], rho_grid[r].
  std::vector<std::vector<double>> nu;
  std::vector<std::vector<std::size_t>> cover_size;
  // Filled only when certificates are requested.
  std::vector<std::vector<std::vector<Interval>>> covers;
};

ShellTable shell_table(const PointSet& set, int n_min, int n_max, std::span<const double> rho_grid,
                       bool keep_covers = false, int threads = 1);

std::string render_shell_table_csv(const ShellTable& table);

struct DimensionOptions {
  double rho_tolerance = 1e-3;
  // rho_hat is where the slope first drops below -slope_tolerance.
  double slope_tolerance = 0.01;
  std::size_t min_shells = 3;
  int threads = 1;
};

struct DimensionEstimate {
  double rho_hat = 0.0;
  // Slope already below -slope_tolerance at rho = rho_tolerance.
  bool zero_flag = false;
  // More than half of the shells in range are empty.
  bool low_confidence = false;
  std::vector<int> shells_used;
  std::size_t shells_in_range = 0;
  // At rho_hat: per-shell content, fitted slope and residuals of log nu.
  std::vector<double> nu_at_rho_hat;
  double slope_at_rho_hat = 0.0;
  std::vector<double> residuals;
  // Every (rho, slope) pair evaluated, in evaluation order.
  std::vector<std::pair<double, double>> slope_trace;
};

// Least-squares slope b(rho) of log nu_rho^n against n over nonempty shells;
// rho_hat = inf{rho in (0, 1] : b(rho) < -slope_tolerance}, located by
// bisection. Throws InsufficientDataError with fewer than min_shells nonempty
// shells.
DimensionEstimate estimate_dimension(const PointSet& set, int n_min, int n_max,
                                     const DimensionOptions& options = {});

// Same estimator on nu averaged over several sets, shell by shell.
DimensionEstimate estimate_dimension_pooled(std::span<const PointSet> sets, int n_min, int n_max,
                                            const DimensionOptions& options = {});

// Upper index bound e^{n(1-theta)+1} - e^{n(1-theta)} of the grid below.
double pi_grid_bound(int n, double theta);
// e^n + i e^{theta n}, i = 0 .. floor(pi_grid_bound(n, theta)).
std::vector<double> pi_grid(int n, double theta);

struct ThicknessFailure {
  int n = 0;
  double x = 0.0;
};

struct ThicknessReport {
  double theta = 0.0;
  int n_min = 0;
  int n_max = 0;
  bool holds = false;
  std::vector<ThicknessFailure> failures;
};

// Every cell [x, x + e^{theta n}), x in pi_grid(n, theta), n_min <= n <= n_max,
// must contain a point of the set.
ThicknessReport check_thickness(const PointSet& set, double theta, int n_min, int n_max);

std::string render_thickness_json(const ThicknessReport& report);

// 1 - min{theta in grid : check_thickness holds}, or 0 if none holds.
double thickness_lower_bound(const PointSet& set, std::span<const double> theta_grid, int n_min,
                             int n_max);

// Union of pi_grid(n, theta) over the shells (the point e itself is dropped,
// since level sets live in t > e).
PointSet make_synthetic(double theta, int n_min, int n_max);

}  // namespace airydim::fractal
