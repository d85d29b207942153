#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "airydim/lpp.hpp"

// Approximate Airy2 / Airy1 sample paths read off one LPP sweep.
//
// With R = (2N)^{2/3} and sigma = 2^{4/3} N^{1/3}:
//   Airy2:  A2(s) ~ (T_N(k) - 4N) / sigma + s^2,            s = k / R
//   Airy1:  A1(t) ~ 2^{-1/3} (T*_N(k) - 4N) / sigma,         k = round(2^{2/3} t R)
namespace airydim::airy {

enum class Process { Airy1, Airy2 };

std::string_view to_string(Process p) noexcept;
// Accepts "Airy1"/"airy1"/"A1" and the Airy2 analogues.
Process parse_process(std::string_view text);

// How Airy2 values are centred. Parabolic is the plain scaling above.
// Characteristic subtracts the exact shape function (sqrt(N-k) + sqrt(N+k))^2
// and divides by the local scale (sqrt(m) + sqrt(n))^{4/3} / (mn)^{1/6}; the
// two agree to leading order but the second has far less bias at large s.
enum class Centering { Parabolic, Characteristic };

std::string_view to_string(Centering c) noexcept;
Centering parse_centering(std::string_view text);

struct SamplerOptions {
  Centering centering = Centering::Parabolic;
  // |lattice offset| <= floor(horizon_fraction * N).
  double horizon_fraction = 0.5;
  // Line-to-point window for Airy1; 0 selects lpp::window_floor(N).
  std::int64_t window_halfwidth = 0;
  int threads = 1;
};

inline constexpr int kPathSchemaVersion = 1;

struct PathSample {
  Process process = Process::Airy2;
  std::int64_t N = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  double t_start = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  int schema_version = kPathSchemaVersion;

  // Regeneration metadata.
  std::int64_t stride = 1;
  Centering centering = Centering::Parabolic;
  double horizon_fraction = 0.5;
  std::int64_t window_halfwidth = 0;
  // Largest |t_j - (lattice time of the offset used for t_j)|.
  double snap_error = 0.0;

  double time_at(std::size_t j) const noexcept { return t_start + static_cast<double>(j) * dt; }
  double t_end() const noexcept { return time_at(values.empty() ? 0 : values.size() - 1); }

  // Throws InvariantError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const PathSample&, const PathSample&) = default;
};

// (2N)^{2/3}: lattice offsets per unit of s.
double lattice_scale(std::int64_t N);
// 2^{4/3} N^{1/3}.
double fluctuation_scale(std::int64_t N);
// Lattice offsets per unit of process time: R for Airy2, 2^{2/3} R for Airy1.
double offsets_per_time(Process p, std::int64_t N);

// Scaled value at offset k from the passage time T.
double airy2_value(double T, std::int64_t N, std::int64_t k, Centering centering);
double airy1_value(double T, std::int64_t N);

// Lattice offset used for process time t.
std::int64_t offset_for_time(Process p, std::int64_t N, double t);

// Smallest N whose offset cap admits time t_end.
std::int64_t minimal_n(Process p, double t_end, double horizon_fraction = 0.5);

// Grid t_start + j dt, j < count, dt = stride lattice steps. Throws
// SizingError when the horizon exceeds the offset cap.
PathSample sample_path(Process p, const lpp::WeightOracle& oracle, std::int64_t N,
                       double t_start, std::size_t count, std::int64_t stride,
                       const SamplerOptions& options = {});

// Grid from t_start up to t_end (inclusive when it falls on the grid).
PathSample sample_airy2(const lpp::WeightOracle& oracle, std::int64_t N, double t_start,
                        double t_end, std::int64_t stride, const SamplerOptions& options = {});
PathSample sample_airy1(const lpp::WeightOracle& oracle, std::int64_t N, double t_start,
                        double t_end, std::int64_t stride, const SamplerOptions& options = {});

// Re-runs the sampler from the metadata of `sample`.
PathSample regenerate(const PathSample& sample, int threads = 1);

}  // namespace airydim::airy
