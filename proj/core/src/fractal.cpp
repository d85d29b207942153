#include "airydim/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "airydim/errors.hpp"
#include "airydim/io.hpp"
#include "airydim/parallel.hpp"
#include "json.hpp"

namespace airydim::fractal {

namespace {

void check_range(int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min)
    throw std::invalid_argument("shell range must satisfy 1 <= n_min <= n_max, got [" +
                                std::to_string(n_min) + ", " + std::to_string(n_max) + "]");
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

LineFit least_squares(const std::vector<int>& xs, const std::vector<double>& ys) {
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
  return fit;
}

// Shared driver: `contents(rho)` returns nu for each shell in `used`.
DimensionEstimate estimate(const std::vector<int>& used, std::size_t in_range,
                           const std::function<std::vector<double>(double)>& contents,
                           const DimensionOptions& options) {
  if (used.size() < std::max<std::size_t>(options.min_shells, 2))
    throw InsufficientDataError("dimension estimate needs at least " +
                                std::to_string(std::max<std::size_t>(options.min_shells, 2)) +
                                " nonempty shells, found " + std::to_string(used.size()));
  if (!(options.rho_tolerance > 0.0 && options.rho_tolerance < 1.0))
    throw std::invalid_argument("rho_tolerance must lie in (0, 1)");
  if (!(options.slope_tolerance >= 0.0)) throw std::invalid_argument("slope_tolerance must be >= 0");

  DimensionEstimate out;
  out.shells_used = used;
  out.shells_in_range = in_range;
  out.low_confidence = 2 * used.size() < in_range;

  auto slope = [&](double rho) {
    const auto nu = contents(rho);
    std::vector<double> logs(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) logs[i] = std::log(nu[i]);
    const double b = least_squares(used, logs).slope;
    out.slope_trace.emplace_back(rho, b);
    return b;
  };

  const double eta = options.slope_tolerance;
  if (slope(1.0) >= -eta) {
    out.rho_hat = 1.0;
  } else if (slope(options.rho_tolerance) < -eta) {
    out.rho_hat = 0.0;
    out.zero_flag = true;
  } else {
    double lo = options.rho_tolerance, hi = 1.0;
    while (hi - lo > options.rho_tolerance) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < -eta ? hi : lo) = mid;
    }
    out.rho_hat = 0.5 * (lo + hi);
  }

  const double rho_eval = std::max(out.rho_hat, options.rho_tolerance);
  out.nu_at_rho_hat = contents(rho_eval);
  std::vector<double> logs(out.nu_at_rho_hat.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(out.nu_at_rho_hat[i]);
  const LineFit fit = least_squares(used, logs);
  out.slope_at_rho_hat = fit.slope;
  out.residuals = fit.residuals;
  return out;
}

}  // namespace

ShellDecomposition shell_decompose(const PointSet& set, int n_min, int n_max) {
  check_range(n_min, n_max);
  ShellDecomposition out;
  for (int n = n_min; n <= n_max; ++n) out.shells.push_back(Shell{n, {}});
  const double lower = std::exp(static_cast<double>(n_min));
  const double upper = std::exp(static_cast<double>(n_max + 1));
  for (double p : set.points()) {
    if (p < lower) {
      ++out.dropped_below;
      continue;
    }
    if (p >= upper) {
      ++out.dropped_above;
      continue;
    }
    // Boundaries are the same exp(n) values used above, so e^n lands in shell n.
    int n = std::clamp(static_cast<int>(std::floor(std::log(p))), n_min, n_max);
    while (n > n_min && p < std::exp(static_cast<double>(n))) --n;
    while (n < n_max && p >= std::exp(static_cast<double>(n + 1))) ++n;
    out.shells[static_cast<std::size_t>(n - n_min)].points.push_back(p);
  }
  return out;
}

ShellTable shell_table(const PointSet& set, int n_min, int n_max, std::span<const double> rho_grid,
                       bool keep_covers, int threads) {
  const auto decomposition = shell_decompose(set, n_min, n_max);
  ShellTable table;
  table.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  const std::size_t S = decomposition.shells.size();
  const std::size_t R = rho_grid.size();
  for (const auto& s : decomposition.shells) table.shells.push_back(s.n);
  table.nu.assign(S, std::vector<double>(R));
  table.cover_size.assign(S, std::vector<std::size_t>(R));
  if (keep_covers) table.covers.assign(S, std::vector<std::vector<Interval>>(R));
  parallel_for(static_cast<std::int64_t>(S * R), threads, [&](std::int64_t idx) {
    const auto s = static_cast<std::size_t>(idx) / R;
    const auto r = static_cast<std::size_t>(idx) % R;
    auto content = shell_content(decomposition.shells[s], rho_grid[r]);
    table.nu[s][r] = content.nu;
    table.cover_size[s][r] = content.cover.size();
    if (keep_covers) table.covers[s][r] = std::move(content.cover);
  });
  return table;
}

std::string render_shell_table_csv(const ShellTable& table) {
  std::string out = "n,rho,nu,cover_size\n";
  for (std::size_t s = 0; s < table.shells.size(); ++s)
    for (std::size_t r = 0; r < table.rho_grid.size(); ++r)
      out += std::to_string(table.shells[s]) + ',' + io::format_double(table.rho_grid[r]) + ',' +
             io::format_double(table.nu[s][r]) + ',' + std::to_string(table.cover_size[s][r]) + '\n';
  return out;
}

DimensionEstimate estimate_dimension(const PointSet& set, int n_min, int n_max,
                                     const DimensionOptions& options) {
  const auto decomposition = shell_decompose(set, n_min, n_max);
  std::vector<Shell> nonempty;
  std::vector<int> used;
  for (const auto& s : decomposition.shells)
    if (!s.points.empty()) {
      nonempty.push_back(s);
      used.push_back(s.n);
    }
  auto contents = [&](double rho) {
    std::vector<double> nu(nonempty.size());
    parallel_for(static_cast<std::int64_t>(nonempty.size()), options.threads, [&](std::int64_t i) {
      nu[static_cast<std::size_t>(i)] = shell_content(nonempty[static_cast<std::size_t>(i)], rho).nu;
    });
    return nu;
  };
  return estimate(used, decomposition.shells.size(), contents, options);
}

DimensionEstimate estimate_dimension_pooled(std::span<const PointSet> sets, int n_min, int n_max,
                                            const DimensionOptions& options) {
  check_range(n_min, n_max);
  if (sets.empty()) throw InsufficientDataError("pooled dimension estimate needs at least one set");
  std::vector<ShellDecomposition> parts;
  for (const auto& set : sets) parts.push_back(shell_decompose(set, n_min, n_max));
  const auto S = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<int> used;
  std::vector<std::size_t> used_index;
  for (std::size_t s = 0; s < S; ++s) {
    bool any = false;
    for (const auto& p : parts) any = any || !p.shells[s].points.empty();
    if (any) {
      used.push_back(n_min + static_cast<int>(s));
      used_index.push_back(s);
    }
  }
  auto contents = [&](double rho) {
    const std::size_t U = used_index.size();
    std::vector<double> per(U * parts.size());
    parallel_for(static_cast<std::int64_t>(per.size()), options.threads, [&](std::int64_t idx) {
      const auto u = static_cast<std::size_t>(idx) % U;
      const auto k = static_cast<std::size_t>(idx) / U;
      per[static_cast<std::size_t>(idx)] = shell_content(parts[k].shells[used_index[u]], rho).nu;
    });
    // Ordered reduction over sets keeps the mean schedule-independent.
    std::vector<double> mean(U, 0.0);
    for (std::size_t k = 0; k < parts.size(); ++k)
      for (std::size_t u = 0; u < U; ++u) mean[u] += per[k * U + u];
    for (double& m : mean) m /= static_cast<double>(parts.size());
    return mean;
  };
  return estimate(used, S, contents, options);
}

double pi_grid_bound(int n, double theta) {
  check_theta(theta);
  const double a = static_cast<double>(n) * (1.0 - theta);
  return std::exp(a + 1.0) - std::exp(a);
}

std::vector<double> pi_grid(int n, double theta) {
  check_theta(theta);
  if (n < 1) throw std::invalid_argument("pi_grid needs n >= 1");
  const auto last = static_cast<std::int64_t>(std::floor(pi_grid_bound(n, theta)));
  const double base = std::exp(static_cast<double>(n));
  const double step = std::exp(theta * static_cast<double>(n));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(last + 1));
  for (std::int64_t i = 0; i <= last; ++i) out.push_back(base + static_cast<double>(i) * step);
  return out;
}

ThicknessReport check_thickness(const PointSet& set, double theta, int n_min, int n_max) {
  check_theta(theta);
  check_range(n_min, n_max);
  ThicknessReport report;
  report.theta = theta;
  report.n_min = n_min;
  report.n_max = n_max;
  const auto& pts = set.points();
  for (int n = n_min; n <= n_max; ++n) {
    const double width = std::exp(theta * static_cast<double>(n));
    for (double x : pi_grid(n, theta)) {
      const auto it = std::lower_bound(pts.begin(), pts.end(), x);
      if (it == pts.end() || !(*it < x + width)) report.failures.push_back({n, x});
    }
  }
  report.holds = report.failures.empty();
  return report;
}

std::string render_thickness_json(const ThicknessReport& report) {
  nlohmann::ordered_json j;
  j["theta"] = report.theta;
  j["n_min"] = report.n_min;
  j["n_max"] = report.n_max;
  j["holds"] = report.holds;
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) j["failures"].push_back({{"n", f.n}, {"x", f.x}});
  return j.dump(2) + "\n";
}

double thickness_lower_bound(const PointSet& set, std::span<const double> theta_grid, int n_min,
                             int n_max) {
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end()))
    throw std::invalid_argument("theta grid must be sorted");
  for (double theta : theta_grid)
    if (check_thickness(set, theta, n_min, n_max).holds) return 1.0 - theta;
  return 0.0;
}

PointSet make_synthetic(double theta, int n_min, int n_max) {
  check_theta(theta);
  check_range(n_min, n_max);
  std::vector<double> points;
  for (int n = n_min; n <= n_max; ++n)
    for (double x : pi_grid(n, theta))
      if (x > std::numbers::e && (points.empty() || x > points.back())) points.push_back(x);
  io::Metadata meta;
  meta["generator"] = "synthetic";
  meta["theta"] = io::format_double(theta);
  meta["n_min"] = std::to_string(n_min);
  meta["n_max"] = std::to_string(n_max);
  return PointSet(std::move(points), std::move(meta));
}

}  // namespace airydim::fractal
