#include "airydim/tail_fit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "airydim/errors.hpp"
#include "airydim/io.hpp"
#include "json.hpp"

namespace airydim::stats {

TailFit tail_estimate(std::span<const double> samples, Side side, std::span<const double> x_grid,
                      bool inclusive) {
  if (samples.empty()) throw std::invalid_argument("tail estimate needs samples");
  TailFit t;
  t.x_grid.assign(x_grid.begin(), x_grid.end());
  t.replicas = samples.size();
  const double R = static_cast<double>(samples.size());
  for (double x : x_grid) {
    std::size_t count = 0;
    for (double v : samples) {
      const bool hit = side == Side::Upper ? (inclusive ? v >= x : v > x)
                                           : (inclusive ? v <= -x : v < -x);
      count += hit ? 1 : 0;
    }
    const double p = static_cast<double>(count) / R;
    t.events.push_back(count);
    t.p_hat.push_back(p);
    t.stderr_.push_back(std::sqrt(p * (1.0 - p) / R));
    t.used_in_fit.push_back(false);
  }
  return t;
}

void fit(TailFit& t, double power, std::size_t min_events) {
  t.power = power;
  t.fitted = false;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.x_grid.size(); ++i) {
    // p = 1 carries no tail information and has log-variance zero.
    t.used_in_fit[i] = t.events[i] >= min_events && t.events[i] < t.replicas;
    if (t.used_in_fit[i]) idx.push_back(i);
  }
  if (idx.size() < 2) {
    std::string usable = "none";
    if (!idx.empty()) usable = "x = " + io::format_double(t.x_grid[idx.front()]) + " only";
    throw FitImpossibleError("tail fit needs at least 2 grid points with >= " +
                             std::to_string(min_events) + " events; usable range: " + usable);
  }
  const double R = static_cast<double>(t.replicas);
  const std::size_t m = idx.size();
  std::vector<double> u(m), y(m), p(m);
  for (std::size_t a = 0; a < m; ++a) {
    u[a] = std::pow(t.x_grid[idx[a]], power);
    y[a] = -std::log(t.p_hat[idx[a]]);
    p[a] = t.p_hat[idx[a]];
  }
  double ub = 0.0, yb = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    ub += u[a];
    yb += y[a];
  }
  ub /= static_cast<double>(m);
  yb /= static_cast<double>(m);
  double suu = 0.0, suy = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    suu += (u[a] - ub) * (u[a] - ub);
    suy += (u[a] - ub) * (y[a] - yb);
  }
  if (!(suu > 0.0)) throw FitImpossibleError("tail fit needs at least 2 distinct x values");
  t.coefficient = suy / suu;
  t.intercept = yb - t.coefficient * ub;

  // slope = sum w_a y_a; the events are nested, so the larger p sets the covariance.
  double var = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const double pmax = std::max(p[a], p[b]);
      const double cov = (1.0 - pmax) / (R * pmax);
      var += (u[a] - ub) * (u[b] - ub) * cov;
    }
  var /= suu * suu;
  const double half = 1.96 * std::sqrt(std::max(var, 0.0));
  t.ci_lo = t.coefficient - half;
  t.ci_hi = t.coefficient + half;
  t.fitted = true;
}

double bootstrap_stability(std::span<const double> samples, Side side,
                           std::span<const double> x_grid, double power, std::size_t rounds,
                           std::uint64_t seed, bool inclusive) {
  TailFit base = tail_estimate(samples, side, x_grid, inclusive);
  fit(base, power);
  const double width = base.ci_hi - base.ci_lo;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<double> resample(samples.size());
  std::size_t stable = 0;
  for (std::size_t round = 0; round < rounds; ++round) {
    for (double& v : resample) v = samples[pick(rng)];
    TailFit b = tail_estimate(resample, side, x_grid, inclusive);
    try {
      fit(b, power);
    } catch (const FitImpossibleError&) {
      continue;
    }
    if (std::abs(b.coefficient - base.coefficient) < width) ++stable;
  }
  return static_cast<double>(stable) / static_cast<double>(rounds);
}

std::string render_tail_csv(const TailFit& t) {
  std::string out = "x,p_hat,stderr,used_in_fit\n";
  for (std::size_t i = 0; i < t.x_grid.size(); ++i)
    out += io::format_double(t.x_grid[i]) + ',' + io::format_double(t.p_hat[i]) + ',' +
           io::format_double(t.stderr_[i]) + ',' + (t.used_in_fit[i] ? "1" : "0") + '\n';
  return out;
}

std::string render_fit_json(const TailFit& t, const Band& band) {
  nlohmann::ordered_json j;
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  j["power"] = t.power;
  j["coefficient"] = num(t.coefficient);
  j["ci_lo"] = num(t.ci_lo);
  j["ci_hi"] = num(t.ci_hi);
  j["target"] = band.target;
  j["band_lo"] = band.lower();
  j["band_hi"] = band.upper();
  j["pass"] = t.fitted && band.contains(t.coefficient);
  return j.dump(2) + "\n";
}

}  // namespace airydim::stats
