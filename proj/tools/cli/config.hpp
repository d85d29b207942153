#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Flat "key=value" experiment configs. Every command has a fixed key list;
// unknown keys, bad values and violated ranges are all reported together.
namespace airydim::cli {

inline constexpr int kConfigSchemaVersion = 1;

enum class Command { Sample, Extract, Dim, Thick, Tails, Cov, Assoc, LppChecks, Report };

std::string_view to_string(Command c) noexcept;
// Throws std::invalid_argument for unknown names.
Command parse_command(std::string_view name);
const std::vector<Command>& all_commands();

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

enum class Kind { Int, UInt, Real, Bool, Text, Choice, RealList, IntList, ShapeList };

struct KeySpec {
  std::string name;
  Kind kind = Kind::Text;
  std::string fallback;  // empty with required = false means "unset"
  bool required = false;
  std::string help;
  // Numeric range; a value (or every list entry) must satisfy it.
  double lo = -1e300;
  double hi = 1e300;
  bool lo_open = false;
  bool hi_open = false;
  std::vector<std::string> choices;
};

// Keys accepted by `command`, common keys first.
const std::vector<KeySpec>& key_specs(Command command);

// Parsed "key=value" lines with their 1-based line numbers. '#' starts a
// comment; blank lines are ignored. Throws ConfigError on malformed lines
// and duplicate keys.
struct RawConfig {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, std::size_t> lines;
};

RawConfig parse_config_text(std::string_view text);
RawConfig read_config_file(const std::string& path);

// Applies `key=value` overrides on top of a raw config.
void apply_override(RawConfig& raw, std::string_view assignment);

class SimConfig {
 public:
  Command command() const noexcept { return command_; }
  // Every key of the command, defaults filled in; unset optional keys absent.
  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::int64_t integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<std::pair<std::int64_t, std::int64_t>> shapes(const std::string& key) const;

  // Rendered back as "key=value" lines in key order.
  std::string render() const;

 private:
  friend SimConfig validate(Command, const RawConfig&);
  Command command_ = Command::Sample;
  std::map<std::string, std::string> values_;
};

// Type and range checks, then cross-key checks. Throws ConfigError listing
// every problem as "key: message" (with the config line when known).
SimConfig validate(Command command, const RawConfig& raw);

// One line per key: name, default and help.
std::string describe_keys(Command command);

}  // namespace airydim::cli
