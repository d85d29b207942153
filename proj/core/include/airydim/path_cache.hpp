#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "airydim/airy.hpp"

// On-disk PathSample: "# key=value" header, then one value per line.
namespace airydim::airy {

std::string render_path(const PathSample& sample);
// Throws ParseError (with a line number) or InvariantError.
PathSample parse_path(std::string_view text);

void cache_write(const PathSample& sample, const std::filesystem::path& path);
PathSample cache_read(const std::filesystem::path& path);

}  // namespace airydim::airy
