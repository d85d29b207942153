#include "airydim/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "airydim/errors.hpp"

namespace airydim::levelset {

std::string_view to_string(Side s) noexcept { return s == Side::Upper ? "upper" : "lower"; }

Side parse_side(std::string_view text) {
  if (text == "upper" || text == "U") return Side::Upper;
  if (text == "lower" || text == "L") return Side::Lower;
  throw std::invalid_argument("unknown side '" + std::string(text) + "' (expected upper or lower)");
}

void GaugeSpec::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie strictly inside (0, 1), got " +
                                io::format_double(gamma));
}

double gauge(const GaugeSpec& spec, double t) {
  spec.validate();
  if (!(t > std::numbers::e)) throw DomainError("gauge is defined for t > e only");
  const double L = std::log(t);
  const double g = spec.gamma;
  if (spec.side == Side::Upper) {
    if (spec.process == airy::Process::Airy1) {
      const double a = 1.5 * L;
      return 0.5 * g * std::cbrt(a * a);
    }
    const double a = 0.75 * L;
    return g * std::cbrt(a * a);
  }
  return spec.process == airy::Process::Airy1 ? -g * std::cbrt(3.0 * L) : -g * std::cbrt(12.0 * L);
}

PointSet::PointSet(std::vector<double> points, io::Metadata metadata)
    : points_(std::move(points)), metadata_(std::move(metadata)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > std::numbers::e) || !std::isfinite(points_[i]))
      throw InvariantError("point " + io::format_double(points_[i]) + " is not a finite time > e");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw InvariantError("points must be strictly increasing (index " + std::to_string(i) + ")");
  }
}

bool PointSet::contains(double t) const noexcept {
  return std::binary_search(points_.begin(), points_.end(), t);
}

bool PointSet::subset_of(const PointSet& other) const noexcept {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(), points_.end());
}

PointSet extract(const airy::PathSample& sample, const GaugeSpec& spec) {
  spec.validate();
  if (sample.process != spec.process)
    throw ProcessMismatchError("sample is " + std::string(airy::to_string(sample.process)) +
                               " but the gauge is for " + std::string(airy::to_string(spec.process)));
  std::vector<double> points;
  for (std::size_t j = 0; j < sample.values.size(); ++j) {
    const double t = sample.time_at(j);
    if (!(t > std::numbers::e)) continue;
    const double g = gauge(spec, t);
    const double v = sample.values[j];
    if (spec.side == Side::Upper ? v > g : v < g) points.push_back(t);
  }
  io::Metadata meta;
  meta["process"] = std::string(airy::to_string(spec.process));
  meta["side"] = std::string(to_string(spec.side));
  meta["gamma"] = io::format_double(spec.gamma);
  meta["N"] = std::to_string(sample.N);
  meta["master_seed"] = std::to_string(sample.master_seed);
  meta["stream_id"] = std::to_string(sample.stream_id);
  meta["t_start"] = io::format_double(sample.t_start);
  meta["dt"] = io::format_double(sample.dt);
  meta["count"] = std::to_string(sample.values.size());
  return PointSet(std::move(points), std::move(meta));
}

std::string render_point_set(const PointSet& set) {
  std::string out = io::render_header(set.metadata());
  for (double t : set.points()) {
    out += io::format_double(t);
    out += '\n';
  }
  return out;
}

PointSet parse_point_set(std::string_view text) {
  io::HeaderedLines doc = io::parse_headered(text);
  std::vector<double> points;
  points.reserve(doc.data.size());
  for (const auto& d : doc.data) {
    auto v = io::parse_double(d.text);
    if (!v) throw ParseError("time '" + d.text + "' is not a number", d.line);
    if (!points.empty() && !(*v > points.back()))
      throw ParseError("times must be strictly increasing", d.line);
    if (!(*v > std::numbers::e)) throw ParseError("time must exceed e", d.line);
    points.push_back(*v);
  }
  return PointSet(std::move(points), std::move(doc.header));
}

void write_point_set(const PointSet& set, const std::filesystem::path& path) {
  io::write_file_atomic(path, render_point_set(set));
}

PointSet read_point_set(const std::filesystem::path& path) {
  return parse_point_set(io::read_file(path));
}

}  // namespace airydim::levelset
