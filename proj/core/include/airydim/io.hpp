#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airydim::io {

using Metadata = std::map<std::string, std::string>;

// Shortest decimal that is never longer than 17 significant digits and
// round-trips to the same double.
std::string format_double(double value);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

// Splits on `sep`, trimming each piece; empty input gives an empty list.
std::vector<std::string> split(std::string_view text, char sep);

// Parsed "# key=value" header block followed by data lines.
struct HeaderedLines {
  Metadata header;
  // 1-based line number of each header key (for diagnostics).
  std::map<std::string, std::size_t> header_lines;
  struct DataLine {
    std::size_t line;
    std::string text;
  };
  std::vector<DataLine> data;
  std::size_t first_data_line = 0;
  std::size_t total_lines = 0;
};

// Throws ParseError on a malformed header line or a duplicated key.
HeaderedLines parse_headered(std::string_view contents);

std::string render_header(const Metadata& header);

}  // namespace airydim::io
