#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "airydim/weights.hpp"
#include "doctest.h"

using namespace airydim::lpp;

TEST_CASE("weight is a pure function of seed, stream and vertex") {
  const WeightOracle a(2025, 7);
  const WeightOracle b(2025, 7);
  for (std::int64_t x = -50; x <= 50; x += 7)
    for (std::int64_t y = -50; y <= 50; y += 11) {
      const double wa = a.weight_at({x, y});
      CHECK(std::bit_cast<std::uint64_t>(wa) == std::bit_cast<std::uint64_t>(b.weight_at({x, y})));
      CHECK(std::bit_cast<std::uint64_t>(wa) == std::bit_cast<std::uint64_t>(a.weight_at({x, y})));
      CHECK(wa > 0.0);
    }
}

TEST_CASE("streams and seeds give different environments") {
  const WeightOracle a(1, 0), b(1, 1), c(2, 0);
  int same_ab = 0, same_ac = 0;
  for (std::int64_t x = 0; x < 100; ++x) {
    same_ab += a.weight_at({x, 3}) == b.weight_at({x, 3});
    same_ac += a.weight_at({x, 3}) == c.weight_at({x, 3});
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("diagonal fill matches pointwise evaluation bit for bit") {
  const WeightOracle w(99, 4);
  for (std::int64_t d : {0, 1, 17, 1000, -30}) {
    std::vector<double> out(257);
    w.fill_diagonal(d, -100, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::int64_t x = -100 + static_cast<std::int64_t>(i);
      REQUIRE(std::bit_cast<std::uint64_t>(out[i]) ==
              std::bit_cast<std::uint64_t>(w.weight_at({x, d - x})));
    }
  }
}

TEST_CASE("extreme hash words stay positive and finite") {
  CHECK(detail::exponential_from_bits(0) > 0.0);
  CHECK(std::isfinite(detail::exponential_from_bits(~std::uint64_t{0})));
  CHECK(detail::exponential_from_bits(~std::uint64_t{0}) > 30.0);
  // U = 2^-53 gives -log(1 - U) = 2^-53 up to rounding.
  CHECK(detail::exponential_from_bits(0) == doctest::Approx(std::ldexp(1.0, -53)).epsilon(1e-12));
}

TEST_CASE("log_unit agrees with std::log") {
  double worst = 0.0;
  for (int i = 1; i <= 100000; ++i) {
    const double v = static_cast<double>(i) / 100000.0;
    const double ref = std::log(v);
    const double got = detail::log_unit(v);
    if (ref != 0.0) worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    else worst = std::max(worst, std::abs(got));
  }
  CHECK(worst < 1e-15);
}

TEST_CASE("Exp(1) moments over 10^6 distinct vertices") {
  const WeightOracle w(123456789, 0);
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> row(1000);
  for (std::int64_t d = 0; d < 1000; ++d) {
    w.fill_diagonal(2 * d, -500, row);
    for (double v : row) {
      sum += v;
      sum2 += v * v;
    }
  }
  const double mean = sum / 1e6;
  const double var = sum2 / 1e6 - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
