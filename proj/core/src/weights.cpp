#include "airydim/weights.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace airydim::lpp {

namespace {

// fdlibm's log kernel with the argument reduction done on the bit pattern
// (musl style), so there is no data-dependent branch.
inline double log_kernel(double v) noexcept {
  std::uint64_t ix = std::bit_cast<std::uint64_t>(v);
  ix += 0x3ff0000000000000ULL - 0x3fe6a09e667f3bcdULL;
  const double k = static_cast<double>(static_cast<std::int64_t>(ix >> 52) - 0x3ff);
  ix = (ix & 0x000fffffffffffffULL) + 0x3fe6a09e667f3bcdULL;
  const double f = std::bit_cast<double>(ix) - 1.0;

  constexpr double Lg1 = 6.666666666666735130e-01;
  constexpr double Lg2 = 3.999999999940941908e-01;
  constexpr double Lg3 = 2.857142874366239149e-01;
  constexpr double Lg4 = 2.222219843214978396e-01;
  constexpr double Lg5 = 1.818357216161805012e-01;
  constexpr double Lg6 = 1.531383769920937332e-01;
  constexpr double Lg7 = 1.479819860511658591e-01;
  constexpr double ln2_hi = 6.93147180369123816490e-01;
  constexpr double ln2_lo = 1.90821492927058770002e-10;

  const double s = f / (2.0 + f);
  const double z = s * s;
  const double w = z * z;
  const double t1 = w * (Lg2 + w * (Lg4 + w * Lg6));
  const double t2 = z * (Lg1 + w * (Lg3 + w * (Lg5 + w * Lg7)));
  const double r = t2 + t1;
  const double hfsq = 0.5 * f * f;
  return k * ln2_hi - ((hfsq - (s * (hfsq + r) + k * ln2_lo)) - f);
}

inline double exp1_from_bits(std::uint64_t bits) noexcept {
  const std::uint64_t m = bits >> 12;
  // 1 - U = (2^53 - 2m - 1) 2^-53, an odd integer times 2^-53: exact.
  const auto numer = static_cast<std::int64_t>((1ULL << 53) - 2 * m - 1);
  return -log_kernel(static_cast<double>(numer) * 0x1p-53);
}

inline std::uint64_t vertex_counter(std::int64_t x, std::int64_t y) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint32_t>(y);
}

inline double vertex_weight(std::uint64_t key, std::int64_t x, std::int64_t y) noexcept {
  return exp1_from_bits(detail::mix64(key ^ detail::mix64(vertex_counter(x, y))));
}

}  // namespace

namespace detail {

double log_unit(double v) noexcept { return log_kernel(v); }

double exponential_from_bits(std::uint64_t bits) noexcept { return exp1_from_bits(bits); }

}  // namespace detail

WeightOracle::WeightOracle(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      key_(detail::mix64(detail::mix64(master_seed ^ 0x9e3779b97f4a7c15ULL) +
                         stream_id * 0xd1b54a32d192ed03ULL)) {}

double WeightOracle::weight_at(LatticeVertex v) const noexcept {
  return vertex_weight(key_, v.x, v.y);
}

void WeightOracle::fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                                 std::span<double> out) const noexcept {
  const std::uint64_t key = key_;
  const std::size_t n = out.size();
  double* dst = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t x = x_first + static_cast<std::int64_t>(i);
    dst[i] = vertex_weight(key, x, diagonal - x);
  }
}

void ConstantWeights::fill_diagonal(std::int64_t, std::int64_t,
                                    std::span<double> out) const noexcept {
  for (double& w : out) w = value_;
}

GridWeights::GridWeights(std::int64_t width, std::int64_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0 ||
      values_.size() != static_cast<std::size_t>(width * height))
    throw std::invalid_argument("GridWeights: value count does not match " +
                                std::to_string(width) + "x" + std::to_string(height));
}

GridWeights GridWeights::from_oracle(const WeightOracle& oracle, std::int64_t width,
                                     std::int64_t height) {
  std::vector<double> values(static_cast<std::size_t>(width * height));
  for (std::int64_t y = 0; y < height; ++y)
    for (std::int64_t x = 0; x < width; ++x)
      values[static_cast<std::size_t>(y * width + x)] = oracle.weight_at({x, y});
  return GridWeights(width, height, std::move(values));
}

double& GridWeights::at(LatticeVertex v) {
  if (!contains(v)) throw std::out_of_range("GridWeights: vertex outside grid");
  return values_[static_cast<std::size_t>(v.y * width_ + v.x)];
}

double GridWeights::weight_at(LatticeVertex v) const {
  if (!contains(v)) throw std::out_of_range("GridWeights: vertex outside grid");
  return values_[static_cast<std::size_t>(v.y * width_ + v.x)];
}

void GridWeights::fill_diagonal(std::int64_t diagonal, std::int64_t x_first,
                                std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::int64_t x = x_first + static_cast<std::int64_t>(i);
    out[i] = weight_at({x, diagonal - x});
  }
}

}  // namespace airydim::lpp
