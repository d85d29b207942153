#include "airydim/airy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "airydim/errors.hpp"

namespace airydim::airy {

namespace {

const double kCbrt2 = std::cbrt(2.0);
const double kCbrt4 = std::cbrt(4.0);

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool fits(Process p, std::int64_t N, double t_end, double fraction) {
  return std::llabs(offset_for_time(p, N, t_end)) <= lpp::max_admissible_offset(N, fraction);
}

}  // namespace

std::string_view to_string(Process p) noexcept { return p == Process::Airy1 ? "Airy1" : "Airy2"; }

Process parse_process(std::string_view text) {
  const std::string t = lower(text);
  if (t == "airy1" || t == "a1") return Process::Airy1;
  if (t == "airy2" || t == "a2") return Process::Airy2;
  throw std::invalid_argument("unknown process '" + std::string(text) + "' (expected Airy1 or Airy2)");
}

std::string_view to_string(Centering c) noexcept {
  return c == Centering::Parabolic ? "parabolic" : "characteristic";
}

Centering parse_centering(std::string_view text) {
  const std::string t = lower(text);
  if (t == "parabolic") return Centering::Parabolic;
  if (t == "characteristic") return Centering::Characteristic;
  throw std::invalid_argument("unknown centering '" + std::string(text) +
                              "' (expected parabolic or characteristic)");
}

void PathSample::validate() const {
  if (schema_version != kPathSchemaVersion)
    throw InvariantError("unsupported schema_version " + std::to_string(schema_version));
  if (N < 1) throw InvariantError("N must be positive");
  if (!std::isfinite(t_start) || t_start < 0.0) throw InvariantError("t_start must be finite and >= 0");
  if (!std::isfinite(dt) || dt <= 0.0) throw InvariantError("dt must be finite and > 0");
  if (values.size() < 2) throw InvariantError("a path needs at least 2 values");
  if (stride < 1) throw InvariantError("stride must be >= 1");
  if (!(horizon_fraction > 0.0 && horizon_fraction <= 1.0))
    throw InvariantError("horizon_fraction must lie in (0, 1]");
  if (window_halfwidth < 0) throw InvariantError("window_halfwidth must be >= 0");
  for (std::size_t j = 0; j < values.size(); ++j)
    if (!std::isfinite(values[j]))
      throw InvariantError("value " + std::to_string(j) + " is not finite");
}

double lattice_scale(std::int64_t N) {
  const double n = static_cast<double>(N);
  return std::cbrt(4.0 * n * n);
}

double fluctuation_scale(std::int64_t N) {
  return 2.0 * kCbrt2 * std::cbrt(static_cast<double>(N));
}

double offsets_per_time(Process p, std::int64_t N) {
  return p == Process::Airy1 ? kCbrt4 * lattice_scale(N) : lattice_scale(N);
}

double airy2_value(double T, std::int64_t N, std::int64_t k, Centering centering) {
  if (centering == Centering::Characteristic) {
    const double rm = std::sqrt(static_cast<double>(N - k));
    const double rn = std::sqrt(static_cast<double>(N + k));
    const double sum = rm + rn;
    const double scale = std::cbrt(sum * sum * sum * sum) / std::cbrt(rm * rn);
    return (T - sum * sum) / scale;
  }
  const double s = static_cast<double>(k) / lattice_scale(N);
  return (T - 4.0 * static_cast<double>(N)) / fluctuation_scale(N) + s * s;
}

double airy1_value(double T, std::int64_t N) {
  return (T - 4.0 * static_cast<double>(N)) / fluctuation_scale(N) / kCbrt2;
}

std::int64_t offset_for_time(Process p, std::int64_t N, double t) {
  return std::llround(offsets_per_time(p, N) * t);
}

std::int64_t minimal_n(Process p, double t_end, double horizon_fraction) {
  if (!(horizon_fraction > 0.0 && horizon_fraction <= 1.0))
    throw std::invalid_argument("horizon_fraction must lie in (0, 1]");
  if (!(t_end > 0.0)) return 1;
  // c t (2N)^{2/3} <= f N  <=>  N >= (2^{2/3} c t / f)^3.
  const double c = p == Process::Airy1 ? kCbrt4 : 1.0;
  const double estimate = std::pow(kCbrt4 * c * t_end / horizon_fraction, 3.0);
  auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(estimate)));
  while (n > 1 && fits(p, n - 1, t_end, horizon_fraction)) --n;
  while (!fits(p, n, t_end, horizon_fraction)) ++n;
  return n;
}

PathSample sample_path(Process p, const lpp::WeightOracle& oracle, std::int64_t N, double t_start,
                       std::size_t count, std::int64_t stride, const SamplerOptions& options) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (!std::isfinite(t_start) || t_start < 0.0)
    throw std::invalid_argument("t_start must be finite and >= 0");
  if (count < 2) throw std::invalid_argument("a path needs at least 2 grid points");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1 lattice offset");

  PathSample out;
  out.process = p;
  out.N = N;
  out.master_seed = oracle.master_seed();
  out.stream_id = oracle.stream_id();
  out.t_start = t_start;
  out.stride = stride;
  out.centering = options.centering;
  out.horizon_fraction = options.horizon_fraction;

  const double scale = offsets_per_time(p, N);
  out.dt = static_cast<double>(stride) / scale;
  const double t_last = out.time_at(count - 1);

  const std::int64_t cap = lpp::max_admissible_offset(N, options.horizon_fraction);
  const std::int64_t k_first = offset_for_time(p, N, t_start);
  const std::int64_t k_last = offset_for_time(p, N, t_last);
  if (k_last > cap) {
    const std::int64_t need = minimal_n(p, t_last, options.horizon_fraction);
    throw SizingError("horizon t_end=" + std::to_string(t_last) + " needs lattice offset " +
                          std::to_string(k_last) + " but |k| <= " + std::to_string(cap) +
                          " at N=" + std::to_string(N) + "; minimal admissible N is " +
                          std::to_string(need),
                      cap, need);
  }

  lpp::SweepOptions sweep_opts;
  sweep_opts.threads = options.threads;
  sweep_opts.max_offset_fraction = options.horizon_fraction;
  const lpp::OffsetRange range{k_first, k_last};

  lpp::SweepResult sweep;
  if (p == Process::Airy2) {
    sweep = lpp::sweep_point_to_point(oracle, N, range, sweep_opts);
  } else {
    out.window_halfwidth =
        options.window_halfwidth > 0 ? options.window_halfwidth : lpp::window_floor(N);
    sweep = lpp::sweep_line_to_point(oracle, N, range, out.window_halfwidth, sweep_opts);
  }

  out.values.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = out.time_at(j);
    const std::int64_t k = offset_for_time(p, N, t);
    const double T = sweep.at_offset(k);
    out.values[j] = p == Process::Airy2 ? airy2_value(T, N, k, options.centering)
                                        : airy1_value(T, N);
    out.snap_error = std::max(out.snap_error, std::abs(t - static_cast<double>(k) / scale));
  }
  return out;
}

PathSample sample_airy2(const lpp::WeightOracle& oracle, std::int64_t N, double t_start,
                        double t_end, std::int64_t stride, const SamplerOptions& options) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1 lattice offset");
  if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
  const double dt = static_cast<double>(stride) / offsets_per_time(Process::Airy2, N);
  const auto count = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-9)) + 1;
  return sample_path(Process::Airy2, oracle, N, t_start, count, stride, options);
}

PathSample sample_airy1(const lpp::WeightOracle& oracle, std::int64_t N, double t_start,
                        double t_end, std::int64_t stride, const SamplerOptions& options) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1 lattice offset");
  if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
  const double dt = static_cast<double>(stride) / offsets_per_time(Process::Airy1, N);
  const auto count = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-9)) + 1;
  return sample_path(Process::Airy1, oracle, N, t_start, count, stride, options);
}

PathSample regenerate(const PathSample& sample, int threads) {
  sample.validate();
  SamplerOptions options;
  options.centering = sample.centering;
  options.horizon_fraction = sample.horizon_fraction;
  options.window_halfwidth = sample.window_halfwidth;
  options.threads = threads;
  return sample_path(sample.process, lpp::WeightOracle(sample.master_seed, sample.stream_id),
                     sample.N, sample.t_start, sample.values.size(), sample.stride, options);
}

}  // namespace airydim::airy
