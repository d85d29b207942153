#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "airydim/fractal.hpp"

namespace airydim::fractal {

namespace {

constexpr std::size_t kQuadraticLimit = 64;

struct Best {
  double cost = 0.0;
  std::size_t count = 0;
  std::size_t start = 0;  // first point of the last group
};

// Strictly better under (cost, count, start).
bool better(double cost, std::size_t count, std::size_t start, const Best& b) {
  if (cost != b.cost) return cost < b.cost;
  if (count != b.count) return count < b.count;
  return start < b.start;
}

Interval group_interval(const std::vector<double>& p, std::size_t i, std::size_t j) {
  const double span = p[j] - p[i];
  if (span >= 1.0) return Interval{p[i], p[j]};
  // p + 1 can round so that (p + 1) - p < 1.
  double hi = p[i] + 1.0;
  while (hi - p[i] < 1.0) hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  return Interval{p[i], hi};
}

ShellContent unwind(const std::vector<double>& p, const std::vector<Best>& best) {
  ShellContent out;
  out.nu = best.back().cost;
  std::size_t end = p.size();
  while (end > 0) {
    const std::size_t start = best[end].start;
    out.cover.push_back(group_interval(p, start, end - 1));
    end = start;
  }
  std::reverse(out.cover.begin(), out.cover.end());
  return out;
}

ShellContent quadratic(const Shell& shell, double rho) {
  const auto& p = shell.points;
  const std::size_t k = p.size();
  std::vector<Best> best(k + 1);
  for (std::size_t j = 1; j <= k; ++j) {
    Best cur{INFINITY, 0, 0};
    for (std::size_t i = 0; i < j; ++i) {
      const double c = best[i].cost + group_cost(p[j - 1] - p[i], shell.n, rho);
      if (better(c, best[i].count + 1, i, cur)) cur = {c, best[i].count + 1, i};
    }
    best[j] = cur;
  }
  return unwind(p, best);
}

// Groups of span < 1 all cost the same, so among them the earliest start is
// best (the prefix cost is nondecreasing). For spans >= 1 the cost is concave
// in the span, which makes the advantage of a later start over an earlier one
// nonincreasing in the group's end: each newly admitted start wins on a prefix
// of the remaining ends. A stack of (start, end of ownership) with binary
// search on insertion gives O(k log k).
ShellContent concave(const Shell& shell, double rho) {
  const auto& p = shell.points;
  const std::size_t k = p.size();
  const int n = shell.n;
  const double g0 = group_cost(0.0, n, rho);
  std::vector<Best> best(k + 1);

  auto value = [&](std::size_t i, std::size_t j) {
    return best[i].cost + group_cost(p[j] - p[i], n, rho);
  };
  // Does the newer start c beat the older start o for the group ending at j?
  auto beats = [&](std::size_t c, std::size_t o, std::size_t j) {
    const double vc = value(c, j);
    const double vo = value(o, j);
    if (vc != vo) return vc < vo;
    return best[c].count < best[o].count;
  };

  struct Owner {
    std::size_t start;
    std::size_t end;  // owns group ends up to end - 1
  };
  std::vector<Owner> stack;
  std::size_t admitted = 0;  // starts [0, admitted) have span >= 1 to the current end

  for (std::size_t j = 0; j < k; ++j) {
    while (!stack.empty() && stack.back().end <= j) stack.pop_back();
    while (admitted < j && p[j] - p[admitted] >= 1.0) {
      const std::size_t c = admitted++;
      std::size_t range_start = j;
      while (!stack.empty() && beats(c, stack.back().start, stack.back().end - 1)) {
        range_start = stack.back().end;
        stack.pop_back();
      }
      if (stack.empty()) {
        stack.push_back({c, k});
        continue;
      }
      // First end in [range_start, top.end) where c stops winning.
      std::size_t lo = range_start;
      std::size_t hi = stack.back().end - 1;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (beats(c, stack.back().start, mid))
          lo = mid + 1;
        else
          hi = mid;
      }
      if (lo > j) stack.push_back({c, lo});
    }

    Best cur{best[admitted].cost + g0, best[admitted].count + 1, admitted};
    if (!stack.empty()) {
      const std::size_t i = stack.back().start;
      const double c = value(i, j);
      if (better(c, best[i].count + 1, i, cur)) cur = {c, best[i].count + 1, i};
    }
    best[j + 1] = cur;
  }
  return unwind(p, best);
}

}  // namespace

double group_cost(double span, int n, double rho) {
  return std::pow(std::max(1.0, span) / std::exp(static_cast<double>(n)), rho);
}

double cover_cost(const std::vector<Interval>& cover, int n, double rho) {
  double total = 0.0;
  for (const auto& I : cover) total += group_cost(I.length(), n, rho);
  return total;
}

ShellContent shell_content(const Shell& shell, double rho, ContentAlgorithm algorithm) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  if (shell.points.empty()) return {};
  if (algorithm == ContentAlgorithm::Auto)
    algorithm = shell.points.size() <= kQuadraticLimit ? ContentAlgorithm::Quadratic
                                                       : ContentAlgorithm::Concave;
  return algorithm == ContentAlgorithm::Quadratic ? quadratic(shell, rho) : concave(shell, rho);
}

double shell_content_bruteforce(const Shell& shell, double rho) {
  const auto& p = shell.points;
  const std::size_t k = p.size();
  if (k > 12)
    throw std::invalid_argument("shell_content_bruteforce: " + std::to_string(k) +
                                " points exceeds the limit of 12");
  if (k == 0) return 0.0;
  double best = INFINITY;
  // Bit g of mask set: a group boundary between points g and g + 1.
  for (std::uint32_t mask = 0; mask < (1u << (k - 1)); ++mask) {
    double total = 0.0;
    std::size_t start = 0;
    for (std::size_t g = 0; g < k; ++g) {
      if (g == k - 1 || (mask >> g) & 1u) {
        total += group_cost(p[g] - p[start], shell.n, rho);
        start = g + 1;
      }
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace airydim::fractal
