#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "airydim/weights.hpp"

// Exponential last-passage percolation on Z^2.
//
// H(v) = w(v) + max(H(v - (1,0)), H(v - (0,1))) is swept anti-diagonal by
// anti-diagonal, keeping two rolling diagonals, so memory is O(N). The
// passage time to a target u counts the source vertex and excludes u itself:
// T = max(H(u - (1,0)), H(u - (0,1))).
namespace airydim::lpp {

enum class SweepMode { PointToPoint, LineToPoint };

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Inclusive range of transversal offsets k; target u = (N - k, N + k).
struct OffsetRange {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t count() const noexcept { return last - first + 1; }
};

struct SweepOptions {
  // Cells of one anti-diagonal are split across this many threads.
  int threads = 1;
  // Keep the whole H field (small N only): needed for geodesics and CSV dumps.
  bool retain_field = false;
  // Offsets are capped at floor(max_offset_fraction * N) to keep targets away
  // from the quadrant boundary.
  double max_offset_fraction = 0.5;
};

// Sources are the vertices (x, -x) of the anti-diagonal x + y = 0 with
// |x| <= halfwidth. halfwidth = 0 is the origin alone.
struct SourceLine {
  std::int64_t halfwidth = 0;
};

// Targets (x, diagonal - x) for x in [x_first, x_last].
struct DiagonalTargets {
  std::int64_t diagonal = 0;
  std::int64_t x_first = 0;
  std::int64_t x_last = 0;
};

// H on every anti-diagonal of a sweep, including the target diagonal.
class HField {
 public:
  HField(SourceLine source, std::int64_t last_diagonal);

  void push_diagonal(std::int64_t x_first, std::span<const double> values);

  SourceLine source() const noexcept { return source_; }
  std::int64_t last_diagonal() const noexcept { return last_diagonal_; }
  std::size_t cell_count() const noexcept;

  // -inf outside the swept region.
  double at(LatticeVertex v) const noexcept;

  std::int64_t diagonal_x_first(std::int64_t d) const { return x_first_.at(static_cast<std::size_t>(d)); }
  std::span<const double> diagonal_values(std::int64_t d) const {
    return values_.at(static_cast<std::size_t>(d));
  }

 private:
  SourceLine source_;
  std::int64_t last_diagonal_;
  std::vector<std::int64_t> x_first_;
  std::vector<std::vector<double>> values_;
};

struct DiagonalSweep {
  DiagonalTargets targets;
  // passage_times[i] is T to (targets.x_first + i, diagonal - x_first - i).
  std::vector<double> passage_times;
  std::shared_ptr<const HField> field;
};

struct SweepResult {
  std::int64_t N = 0;
  SweepMode mode = SweepMode::PointToPoint;
  std::int64_t window_halfwidth = 0;
  // Strictly increasing offsets and the matching passage times.
  std::vector<std::int64_t> offsets;
  std::vector<double> passage_times;
  std::shared_ptr<const HField> field;

  // Throws std::out_of_range if k was not swept.
  double at_offset(std::int64_t k) const;
};

// General sweep from a source line to a run of targets on one anti-diagonal.
DiagonalSweep sweep_to_diagonal(const WeightOracle& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options = {});
DiagonalSweep sweep_to_diagonal(const ConstantWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options = {});
DiagonalSweep sweep_to_diagonal(const GridWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options = {});
DiagonalSweep sweep_to_diagonal(const ShiftedWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options = {});

// Point-to-point passage time T_{0,v}.
template <class Weights>
double passage_time(const Weights& weights, LatticeVertex target) {
  return sweep_to_diagonal(weights, SourceLine{0},
                           DiagonalTargets{target.x + target.y, target.x, target.x})
      .passage_times.front();
}

// Largest admissible |offset| at this N.
std::int64_t max_admissible_offset(std::int64_t N, double max_offset_fraction = 0.5);

// ceil(4 (2N)^{2/3} ln N): smallest line-to-point window accepted.
std::int64_t window_floor(std::int64_t N);

// T_N at every offset of `offsets`, from one sweep. Throws SizingError when an
// offset exceeds max_admissible_offset.
SweepResult sweep_point_to_point(const WeightOracle& oracle, std::int64_t N,
                                 OffsetRange offsets, const SweepOptions& options = {});

// T*_N (sources on x + y = 0 within the window) at every offset. Throws
// SizingError as above and WindowError when window_halfwidth < window_floor(N).
SweepResult sweep_line_to_point(const WeightOracle& oracle, std::int64_t N,
                                OffsetRange offsets, std::int64_t window_halfwidth,
                                const SweepOptions& options = {});

struct Geodesic {
  std::vector<LatticeVertex> vertices;
};

// Walks back from `target` to a source, taking the predecessor with the larger
// H; ties go to the (0,1) predecessor, i.e. target - (0,1). Requires a sweep
// run with retain_field (UnsupportedModeError otherwise).
Geodesic backtrack_geodesic(const SweepResult& sweep, LatticeVertex target);
Geodesic backtrack_geodesic(const HField& field, LatticeVertex target);

// Sum of weights along the path, in path order, excluding the last vertex.
double path_weight(const WeightOracle& weights, const Geodesic& path);
double path_weight(const GridWeights& weights, const Geodesic& path);

// Exhaustive maximum over all up/right paths from any source to target,
// excluding the target's weight. Grids larger than 6x6 are rejected.
double brute_force_passage(const GridWeights& grid, std::span<const LatticeVertex> sources,
                           LatticeVertex target);

// CSV dump of a retained field: "x,y,H" per swept cell.
void write_field_csv(const HField& field, const std::filesystem::path& path);

}  // namespace airydim::lpp
