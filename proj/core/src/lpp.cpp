#include "airydim/lpp.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "airydim/errors.hpp"
#include "airydim/io.hpp"
#include "airydim/parallel.hpp"

namespace airydim::lpp {

namespace {

// Retained fields beyond this many cells are refused (about 400 MB).
constexpr std::size_t kMaxRetainedCells = 50'000'000;

// Below this many cells per diagonal, threads cost more than they save.
constexpr std::int64_t kMinCellsPerThread = 4096;

struct Region {
  std::int64_t halfwidth;
  std::int64_t xmax;
  std::int64_t ymax;

  std::int64_t lo(std::int64_t d) const noexcept { return std::max(-halfwidth, d - ymax); }
  std::int64_t hi(std::int64_t d) const noexcept { return std::min(xmax, d + halfwidth); }
};

void validate(SourceLine source, const DiagonalTargets& t) {
  if (source.halfwidth < 0) throw std::invalid_argument("source halfwidth must be nonnegative");
  if (t.diagonal < 0) throw std::invalid_argument("target diagonal must be nonnegative");
  if (t.x_first > t.x_last) throw std::invalid_argument("empty target range");
  // (x, D - x) is reachable from some (s, -s), |s| <= W, iff x >= -W and D - x >= -W.
  if (t.x_first < -source.halfwidth || t.diagonal - t.x_last < -source.halfwidth)
    throw std::invalid_argument("target range not reachable from the source line");
}

template <class Weights>
DiagonalSweep run_sweep(const Weights& weights, SourceLine source, DiagonalTargets targets,
                        const SweepOptions& options) {
  validate(source, targets);
  const std::int64_t D = targets.diagonal;
  const Region region{source.halfwidth, targets.x_last, D - targets.x_first};

  DiagonalSweep out;
  out.targets = targets;
  const auto n_targets = static_cast<std::size_t>(targets.x_last - targets.x_first + 1);

  std::shared_ptr<HField> field;
  if (options.retain_field) {
    std::size_t cells = 0;
    for (std::int64_t d = 0; d <= D; ++d)
      cells += static_cast<std::size_t>(region.hi(d) - region.lo(d) + 1);
    if (cells > kMaxRetainedCells)
      throw std::invalid_argument("retained H field would hold " + std::to_string(cells) +
                                  " cells; retain_field is for small sweeps only");
    field = std::make_shared<HField>(source, D);
  }

  if (D == 0) {
    // Targets are sources: the path is the target alone and its weight is excluded.
    out.passage_times.assign(n_targets, 0.0);
    if (field) {
      std::vector<double> w(n_targets);
      weights.fill_diagonal(0, targets.x_first, w);
      field->push_diagonal(targets.x_first, w);
      out.field = std::move(field);
    }
    return out;
  }

  // Buffers are indexed by x - base; they cover every lo(d) - 1 .. hi(d) + 1.
  const std::int64_t base = region.lo(0) - 1;
  const auto buf_size = static_cast<std::size_t>(region.hi(D) - region.lo(0) + 3);
  std::vector<double> prev(buf_size, kNegInf);
  std::vector<double> cur(buf_size, kNegInf);
  std::vector<double> w(buf_size);

  auto compute_range = [&](std::int64_t d, std::int64_t x_begin, std::int64_t x_end) {
    // Cells x in [x_begin, x_end) of diagonal d.
    if (x_begin >= x_end) return;
    const auto off = static_cast<std::size_t>(x_begin - base);
    const auto n = static_cast<std::size_t>(x_end - x_begin);
    weights.fill_diagonal(d, x_begin, std::span<double>(w.data() + off, n));
    double* c = cur.data() + off;
    const double* wi = w.data() + off;
    if (d == 0) {
      for (std::size_t i = 0; i < n; ++i) c[i] = wi[i];
    } else {
      // H(x, d - x) = w + max(H(x - 1, d - x), H(x, d - x - 1)) = w + max(prev[x - 1], prev[x]).
      const double* p = prev.data() + off;
      for (std::size_t i = 0; i < n; ++i) c[i] = wi[i] + std::max(p[i - 1], p[i]);
    }
  };

  auto finish_diagonal = [&](std::int64_t d) {
    const std::int64_t lo = region.lo(d);
    const std::int64_t hi = region.hi(d);
    cur[static_cast<std::size_t>(lo - 1 - base)] = kNegInf;
    cur[static_cast<std::size_t>(hi + 1 - base)] = kNegInf;
    if (field)
      field->push_diagonal(
          lo, std::span<const double>(cur.data() + (lo - base), static_cast<std::size_t>(hi - lo + 1)));
    prev.swap(cur);
  };

  const std::int64_t widest = region.hi(D - 1) - region.lo(D - 1) + 1;
  const int threads = static_cast<int>(std::clamp<std::int64_t>(
      std::min<std::int64_t>(resolve_threads(options.threads), widest / kMinCellsPerThread), 1,
      1024));

  if (threads == 1) {
    for (std::int64_t d = 0; d < D; ++d) {
      compute_range(d, region.lo(d), region.hi(d) + 1);
      finish_diagonal(d);
    }
  } else {
    // Each thread owns a contiguous slice of every diagonal; the barrier's
    // completion step closes the diagonal and swaps buffers. Cell values do
    // not depend on the slicing.
    std::int64_t d = 0;
    std::barrier sync(threads, [&]() noexcept {
      finish_diagonal(d);
      ++d;
    });
    auto worker = [&](int t) {
      while (d < D) {
        const std::int64_t lo = region.lo(d);
        const std::int64_t n = region.hi(d) - lo + 1;
        const std::int64_t a = lo + n * t / threads;
        const std::int64_t b = lo + n * (t + 1) / threads;
        compute_range(d, a, b);
        sync.arrive_and_wait();
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads - 1));
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
  }

  out.passage_times.resize(n_targets);
  for (std::size_t i = 0; i < n_targets; ++i) {
    const auto ix = static_cast<std::size_t>(targets.x_first - base) + i;
    out.passage_times[i] = std::max(prev[ix - 1], prev[ix]);
  }
  if (field) {
    std::vector<double> last(n_targets);
    weights.fill_diagonal(D, targets.x_first, last);
    for (std::size_t i = 0; i < n_targets; ++i) last[i] += out.passage_times[i];
    field->push_diagonal(targets.x_first, last);
    out.field = std::move(field);
  }
  return out;
}

void check_sizing(std::int64_t N, OffsetRange offsets, double fraction) {
  if (N < 1) throw std::invalid_argument("N must be positive, got " + std::to_string(N));
  if (offsets.first > offsets.last)
    throw std::invalid_argument("offset range is empty: [" + std::to_string(offsets.first) +
                                ", " + std::to_string(offsets.last) + "]");
  const std::int64_t cap = max_admissible_offset(N, fraction);
  const std::int64_t need = std::max(std::abs(offsets.first), std::abs(offsets.last));
  if (need > cap) {
    std::int64_t minimal = static_cast<std::int64_t>(std::ceil(static_cast<double>(need) / fraction));
    while (minimal > 1 && max_admissible_offset(minimal - 1, fraction) >= need) --minimal;
    while (max_admissible_offset(minimal, fraction) < need) ++minimal;
    throw SizingError("offsets [" + std::to_string(offsets.first) + ", " +
                          std::to_string(offsets.last) + "] exceed the admissible horizon |k| <= " +
                          std::to_string(cap) + " at N=" + std::to_string(N) +
                          "; smallest admissible N is " + std::to_string(minimal),
                      cap, minimal);
  }
}

SweepResult to_result(DiagonalSweep sweep, std::int64_t N, OffsetRange offsets, SweepMode mode,
                      std::int64_t window) {
  SweepResult r;
  r.N = N;
  r.mode = mode;
  r.window_halfwidth = window;
  const auto count = static_cast<std::size_t>(offsets.count());
  r.offsets.resize(count);
  r.passage_times.resize(count);
  // Offset k sits at x = N - k, so offsets ascend as x descends.
  for (std::size_t i = 0; i < count; ++i) {
    r.offsets[i] = offsets.first + static_cast<std::int64_t>(i);
    r.passage_times[i] = sweep.passage_times[count - 1 - i];
  }
  r.field = std::move(sweep.field);
  return r;
}

DiagonalTargets offset_targets(std::int64_t N, OffsetRange offsets) {
  return DiagonalTargets{2 * N, N - offsets.last, N - offsets.first};
}

template <class Weights>
double path_weight_impl(const Weights& weights, const Geodesic& path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    total += weights.weight_at(path.vertices[i]);
  return total;
}

}  // namespace

HField::HField(SourceLine source, std::int64_t last_diagonal)
    : source_(source), last_diagonal_(last_diagonal) {
  x_first_.reserve(static_cast<std::size_t>(last_diagonal + 1));
  values_.reserve(static_cast<std::size_t>(last_diagonal + 1));
}

void HField::push_diagonal(std::int64_t x_first, std::span<const double> values) {
  x_first_.push_back(x_first);
  values_.emplace_back(values.begin(), values.end());
}

std::size_t HField::cell_count() const noexcept {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

double HField::at(LatticeVertex v) const noexcept {
  const std::int64_t d = v.x + v.y;
  if (d < 0 || d >= static_cast<std::int64_t>(values_.size())) return kNegInf;
  const auto& row = values_[static_cast<std::size_t>(d)];
  const std::int64_t i = v.x - x_first_[static_cast<std::size_t>(d)];
  if (i < 0 || i >= static_cast<std::int64_t>(row.size())) return kNegInf;
  return row[static_cast<std::size_t>(i)];
}

double SweepResult::at_offset(std::int64_t k) const {
  const auto it = std::lower_bound(offsets.begin(), offsets.end(), k);
  if (it == offsets.end() || *it != k)
    throw std::out_of_range("offset " + std::to_string(k) + " was not swept");
  return passage_times[static_cast<std::size_t>(it - offsets.begin())];
}

DiagonalSweep sweep_to_diagonal(const WeightOracle& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options) {
  return run_sweep(weights, source, targets, options);
}
DiagonalSweep sweep_to_diagonal(const ConstantWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options) {
  return run_sweep(weights, source, targets, options);
}
DiagonalSweep sweep_to_diagonal(const GridWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options) {
  SweepOptions serial = options;
  serial.threads = 1;  // grid lookups throw on out-of-range cells
  return run_sweep(weights, source, targets, serial);
}
DiagonalSweep sweep_to_diagonal(const ShiftedWeights& weights, SourceLine source,
                                DiagonalTargets targets, const SweepOptions& options) {
  return run_sweep(weights, source, targets, options);
}

std::int64_t max_admissible_offset(std::int64_t N, double max_offset_fraction) {
  if (!(max_offset_fraction > 0.0 && max_offset_fraction <= 1.0))
    throw std::invalid_argument("max_offset_fraction must lie in (0, 1]");
  return static_cast<std::int64_t>(std::floor(max_offset_fraction * static_cast<double>(N)));
}

std::int64_t window_floor(std::int64_t N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  const double n = static_cast<double>(N);
  return static_cast<std::int64_t>(std::ceil(4.0 * std::cbrt(4.0 * n * n) * std::log(n)));
}

SweepResult sweep_point_to_point(const WeightOracle& oracle, std::int64_t N, OffsetRange offsets,
                                 const SweepOptions& options) {
  check_sizing(N, offsets, options.max_offset_fraction);
  auto sweep = run_sweep(oracle, SourceLine{0}, offset_targets(N, offsets), options);
  return to_result(std::move(sweep), N, offsets, SweepMode::PointToPoint, 0);
}

SweepResult sweep_line_to_point(const WeightOracle& oracle, std::int64_t N, OffsetRange offsets,
                                std::int64_t window_halfwidth, const SweepOptions& options) {
  check_sizing(N, offsets, options.max_offset_fraction);
  const std::int64_t floor_w = window_floor(N);
  if (window_halfwidth < floor_w)
    throw WindowError("window halfwidth " + std::to_string(window_halfwidth) +
                      " is below the floor ceil(4 (2N)^{2/3} ln N) = " + std::to_string(floor_w) +
                      " at N=" + std::to_string(N));
  auto sweep = run_sweep(oracle, SourceLine{window_halfwidth}, offset_targets(N, offsets), options);
  return to_result(std::move(sweep), N, offsets, SweepMode::LineToPoint, window_halfwidth);
}

Geodesic backtrack_geodesic(const SweepResult& sweep, LatticeVertex target) {
  if (!sweep.field)
    throw UnsupportedModeError("geodesic backtracking needs a sweep run with retain_field");
  return backtrack_geodesic(*sweep.field, target);
}

Geodesic backtrack_geodesic(const HField& field, LatticeVertex target) {
  if (target.x + target.y != field.last_diagonal() || field.at(target) == kNegInf)
    throw std::invalid_argument("target is not on the swept target diagonal");
  Geodesic g;
  LatticeVertex v = target;
  g.vertices.push_back(v);
  while (v.x + v.y > 0) {
    const LatticeVertex left{v.x - 1, v.y};
    const LatticeVertex down{v.x, v.y - 1};
    const double h_left = field.at(left);
    const double h_down = field.at(down);
    if (h_left == kNegInf && h_down == kNegInf)
      throw InvariantError("geodesic backtrack left the swept region");
    v = h_down >= h_left ? down : left;
    g.vertices.push_back(v);
  }
  std::reverse(g.vertices.begin(), g.vertices.end());
  return g;
}

double path_weight(const WeightOracle& weights, const Geodesic& path) {
  return path_weight_impl(weights, path);
}
double path_weight(const GridWeights& weights, const Geodesic& path) {
  return path_weight_impl(weights, path);
}

double brute_force_passage(const GridWeights& grid, std::span<const LatticeVertex> sources,
                           LatticeVertex target) {
  if (grid.width() > 6 || grid.height() > 6)
    throw std::invalid_argument("brute_force_passage: grid " + std::to_string(grid.width()) + "x" +
                                std::to_string(grid.height()) + " exceeds 6x6");
  if (!grid.contains(target)) throw std::invalid_argument("brute_force_passage: target off grid");

  double best = kNegInf;
  // Depth-first walk over every up/right path; sums in path order.
  auto walk = [&](auto&& self, LatticeVertex v, double acc) -> void {
    if (v == target) {
      best = std::max(best, acc);
      return;
    }
    const double next = acc + grid.weight_at(v);
    if (v.x < target.x) self(self, LatticeVertex{v.x + 1, v.y}, next);
    if (v.y < target.y) self(self, LatticeVertex{v.x, v.y + 1}, next);
  };
  for (const auto& s : sources) {
    if (!grid.contains(s)) throw std::invalid_argument("brute_force_passage: source off grid");
    if (s.x <= target.x && s.y <= target.y) walk(walk, s, 0.0);
  }
  if (best == kNegInf) throw std::invalid_argument("brute_force_passage: target unreachable");
  return best;
}

void write_field_csv(const HField& field, const std::filesystem::path& path) {
  std::string text = "x,y,H\n";
  for (std::int64_t d = 0; d <= field.last_diagonal(); ++d) {
    const std::int64_t x0 = field.diagonal_x_first(d);
    const auto values = field.diagonal_values(d);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::int64_t x = x0 + static_cast<std::int64_t>(i);
      text += std::to_string(x) + ',' + std::to_string(d - x) + ',' + io::format_double(values[i]) +
              '\n';
    }
  }
  io::write_file_atomic(path, text);
}

}  // namespace airydim::lpp
