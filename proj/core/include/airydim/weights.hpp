#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace airydim::lpp {

struct LatticeVertex {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const LatticeVertex&, const LatticeVertex&) = default;
};

// The random environment: i.i.d. Exp(1) vertex weights drawn from a keyed
// counter-based hash of (master_seed, stream_id, x, y). Nothing is stored, so
// any vertex can be evaluated at any time, from any thread, with identical
// bits.
class WeightOracle {
 public:
  WeightOracle() : WeightOracle(0, 0) {}
  WeightOracle(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double weight_at(LatticeVertex v) const noexcept;

  // out[i] = weight_at({x_first + i, diagonal - x_first - i}).
  void fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                     std::span<double> out) const noexcept;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
};

// Every vertex carries the same weight. Test environment.
class ConstantWeights {
 public:
  explicit ConstantWeights(double value) : value_(value) {}
  double weight_at(LatticeVertex) const noexcept { return value_; }
  void fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                     std::span<double> out) const noexcept;

 private:
  double value_;
};

// Explicit weights on [0, width) x [0, height); weight(x, y) = values[y * width + x].
class GridWeights {
 public:
  GridWeights(std::int64_t width, std::int64_t height, std::vector<double> values);

  // Fills a grid from an oracle.
  static GridWeights from_oracle(const WeightOracle& oracle, std::int64_t width,
                                 std::int64_t height);

  std::int64_t width() const noexcept { return width_; }
  std::int64_t height() const noexcept { return height_; }
  bool contains(LatticeVertex v) const noexcept {
    return v.x >= 0 && v.y >= 0 && v.x < width_ && v.y < height_;
  }
  double& at(LatticeVertex v);
  double weight_at(LatticeVertex v) const;
  void fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                     std::span<double> out) const;

 private:
  std::int64_t width_;
  std::int64_t height_;
  std::vector<double> values_;
};

// The oracle's environment seen from `origin`: weight(v) = base(v + origin).
class ShiftedWeights {
 public:
  ShiftedWeights(const WeightOracle& base, LatticeVertex origin)
      : base_(base), origin_(origin) {}
  double weight_at(LatticeVertex v) const noexcept {
    return base_.weight_at({v.x + origin_.x, v.y + origin_.y});
  }
  void fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                     std::span<double> out) const noexcept {
    base_.fill_diagonal(diagonal + origin_.x + origin_.y, x_first + origin_.x, out);
  }

 private:
  WeightOracle base_;
  LatticeVertex origin_;
};

namespace detail {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Natural log on (0, 1] for normal inputs, branch-free so the diagonal fill
// vectorizes; accurate to about 1 ulp.
double log_unit(double v) noexcept;

// Exp(1) variate from 64 hash bits: -log(1 - U) with U = (2m + 1) 2^-53,
// m = top 52 bits. U lies strictly inside (0, 1), so the result is positive.
double exponential_from_bits(std::uint64_t bits) noexcept;

}  // namespace detail

}  // namespace airydim::lpp
