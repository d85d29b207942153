#include "airydim/path_cache.hpp"

#include <array>
#include <string>

#include "airydim/errors.hpp"
#include "airydim/io.hpp"

namespace airydim::airy {

namespace {

constexpr std::array<std::string_view, 13> kKeys = {
    "schema_version", "process",  "N",         "master_seed",      "stream_id",
    "t_start",        "dt",       "count",     "stride",           "centering",
    "horizon_fraction", "window_halfwidth", "snap_error"};

}  // namespace

std::string render_path(const PathSample& sample) {
  sample.validate();
  io::Metadata h;
  h["schema_version"] = std::to_string(sample.schema_version);
  h["process"] = std::string(to_string(sample.process));
  h["N"] = std::to_string(sample.N);
  h["master_seed"] = std::to_string(sample.master_seed);
  h["stream_id"] = std::to_string(sample.stream_id);
  h["t_start"] = io::format_double(sample.t_start);
  h["dt"] = io::format_double(sample.dt);
  h["count"] = std::to_string(sample.values.size());
  h["stride"] = std::to_string(sample.stride);
  h["centering"] = std::string(to_string(sample.centering));
  h["horizon_fraction"] = io::format_double(sample.horizon_fraction);
  h["window_halfwidth"] = std::to_string(sample.window_halfwidth);
  h["snap_error"] = io::format_double(sample.snap_error);
  std::string out = io::render_header(h);
  for (double v : sample.values) {
    out += io::format_double(v);
    out += '\n';
  }
  return out;
}

PathSample parse_path(std::string_view text) {
  const io::HeaderedLines doc = io::parse_headered(text);
  for (const auto& [key, line] : doc.header_lines) {
    bool known = false;
    for (auto k : kKeys) known = known || k == key;
    if (!known) throw ParseError("unknown header key '" + key + "'", line);
  }
  for (auto k : kKeys)
    if (!doc.header.count(std::string(k)))
      throw ParseError("missing header section: key '" + std::string(k) + "' not found",
                       doc.first_data_line);

  auto line_of = [&](std::string_view key) { return doc.header_lines.at(std::string(key)); };
  auto get = [&](std::string_view key) -> const std::string& { return doc.header.at(std::string(key)); };
  auto as_int = [&](std::string_view key) {
    auto v = io::parse_int(get(key));
    if (!v) throw ParseError("header '" + std::string(key) + "' is not an integer", line_of(key));
    return *v;
  };
  auto as_uint = [&](std::string_view key) {
    auto v = io::parse_uint(get(key));
    if (!v) throw ParseError("header '" + std::string(key) + "' is not an unsigned integer", line_of(key));
    return *v;
  };
  auto as_double = [&](std::string_view key) {
    auto v = io::parse_double(get(key));
    if (!v) throw ParseError("header '" + std::string(key) + "' is not a number", line_of(key));
    return *v;
  };

  PathSample s;
  s.schema_version = static_cast<int>(as_int("schema_version"));
  if (s.schema_version != kPathSchemaVersion)
    throw ParseError("unsupported schema_version " + get("schema_version"), line_of("schema_version"));
  try {
    s.process = parse_process(get("process"));
    s.centering = parse_centering(get("centering"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_of(doc.header.count("process") ? "centering" : "process"));
  }
  s.N = as_int("N");
  s.master_seed = as_uint("master_seed");
  s.stream_id = as_uint("stream_id");
  s.t_start = as_double("t_start");
  s.dt = as_double("dt");
  s.stride = as_int("stride");
  s.horizon_fraction = as_double("horizon_fraction");
  s.window_halfwidth = as_int("window_halfwidth");
  s.snap_error = as_double("snap_error");
  const std::int64_t count = as_int("count");
  if (count < 0) throw ParseError("header 'count' is negative", line_of("count"));

  if (doc.data.empty())
    throw ParseError("missing values section: expected " + std::to_string(count) + " values",
                     doc.total_lines);
  s.values.reserve(static_cast<std::size_t>(count));
  for (const auto& d : doc.data) {
    if (static_cast<std::int64_t>(s.values.size()) == count)
      throw ParseError("more values than count=" + std::to_string(count), d.line);
    auto v = io::parse_double(d.text);
    if (!v) throw ParseError("value '" + d.text + "' is not a number", d.line);
    s.values.push_back(*v);
  }
  if (static_cast<std::int64_t>(s.values.size()) != count)
    throw ParseError("truncated values section: found " + std::to_string(s.values.size()) +
                         " of count=" + std::to_string(count) + " values",
                     doc.total_lines);
  s.validate();
  return s;
}

void cache_write(const PathSample& sample, const std::filesystem::path& path) {
  io::write_file_atomic(path, render_path(sample));
}

PathSample cache_read(const std::filesystem::path& path) { return parse_path(io::read_file(path)); }

}  // namespace airydim::airy
