#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "airydim/airy.hpp"
#include "airydim/io.hpp"

namespace airydim::levelset {

enum class Side { Upper, Lower };

std::string_view to_string(Side s) noexcept;
Side parse_side(std::string_view text);

struct GaugeSpec {
  airy::Process process = airy::Process::Airy2;
  Side side = Side::Upper;
  double gamma = 0.5;

  // Throws std::invalid_argument unless 0 < gamma < 1.
  void validate() const;
};

// The four gauges, for t > e:
//   Airy1 upper   (gamma/2) (3 log t / 2)^{2/3}
//   Airy2 upper    gamma    (3 log t / 4)^{2/3}
//   Airy1 lower   -gamma    (3 log t)^{1/3}
//   Airy2 lower   -gamma    (12 log t)^{1/3}
// Throws DomainError for t <= e.
double gauge(const GaugeSpec& spec, double t);

// Finite, strictly increasing set of times, all > e.
class PointSet {
 public:
  PointSet() = default;
  // Throws InvariantError if the points are not strictly increasing or not all > e.
  explicit PointSet(std::vector<double> points, io::Metadata metadata = {});

  const std::vector<double>& points() const noexcept { return points_; }
  const io::Metadata& metadata() const noexcept { return metadata_; }
  io::Metadata& metadata() noexcept { return metadata_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool contains(double t) const noexcept;
  // True when every point of this set is in `other`.
  bool subset_of(const PointSet& other) const noexcept;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<double> points_;
  io::Metadata metadata_;
};

// Grid times t > e of the sample where the strict gauge inequality holds.
// Throws ProcessMismatchError when the sample and spec disagree on the process.
PointSet extract(const airy::PathSample& sample, const GaugeSpec& spec);

std::string render_point_set(const PointSet& set);
PointSet parse_point_set(std::string_view text);
void write_point_set(const PointSet& set, const std::filesystem::path& path);
PointSet read_point_set(const std::filesystem::path& path);

}  // namespace airydim::levelset
