#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "airydim/airy.hpp"
#include "airydim/lpp.hpp"

// Replica ensembles of passage-time profiles. Replica r uses the oracle
// (master_seed, first_stream + r), so any replica can be recomputed alone.
namespace airydim::stats {

struct EnsembleSpec {
  lpp::SweepMode mode = lpp::SweepMode::PointToPoint;
  std::int64_t N = 0;
  lpp::OffsetRange offsets;
  // Line-to-point only; 0 selects lpp::window_floor(N).
  std::int64_t window_halfwidth = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t first_stream = 0;
  std::size_t replicas = 0;
  double horizon_fraction = 0.5;
  // Replicas run concurrently; results do not depend on this.
  int threads = 1;

  bool same_data(const EnsembleSpec& other) const noexcept;
};

class Ensemble {
 public:
  Ensemble(EnsembleSpec spec, std::vector<double> passage);

  const EnsembleSpec& spec() const noexcept { return spec_; }
  std::size_t replicas() const noexcept { return spec_.replicas; }
  std::size_t width() const noexcept { return static_cast<std::size_t>(spec_.offsets.count()); }
  std::int64_t N() const noexcept { return spec_.N; }

  bool has_offset(std::int64_t k) const noexcept {
    return k >= spec_.offsets.first && k <= spec_.offsets.last;
  }
  // Throws std::out_of_range outside the swept offsets.
  double passage(std::size_t replica, std::int64_t k) const;
  std::span<const double> row(std::size_t replica) const;
  const std::vector<double>& data() const noexcept { return passage_; }

  // (T - 4N) / (2^{4/3} N^{1/3}).
  double scaled(std::size_t replica, std::int64_t k) const;
  // Point-to-point: parabolic Airy2 value at offset k.
  double airy2(std::size_t replica, std::int64_t k) const;
  // Line-to-point: Airy1 value read at offset k.
  double airy1(std::size_t replica, std::int64_t k) const;

  // Offset nearest to process time t.
  std::int64_t offset_for(airy::Process p, double t) const;

 private:
  EnsembleSpec spec_;
  std::vector<double> passage_;  // row-major: replica, then offset
};

Ensemble run_ensemble(const EnsembleSpec& spec);

// Binary snapshot (spec + values); written atomically.
void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path);
// nullopt when the file is missing or describes different data.
std::optional<Ensemble> load_ensemble(const std::filesystem::path& path, const EnsembleSpec& spec);
// Loads from cache_dir when present, otherwise runs and stores.
Ensemble cached_ensemble(const EnsembleSpec& spec, const std::filesystem::path& cache_dir);

}  // namespace airydim::stats
