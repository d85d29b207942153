#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "airydim/io.hpp"

namespace airydim::cli {

namespace {

constexpr std::pair<Command, std::string_view> kNames[] = {
    {Command::Sample, "sample"}, {Command::Extract, "extract"},     {Command::Dim, "dim"},
    {Command::Thick, "thick"},   {Command::Tails, "tails"},         {Command::Cov, "cov"},
    {Command::Assoc, "assoc"},   {Command::LppChecks, "lpp-checks"}, {Command::Report, "report"},
};

KeySpec key(std::string name, Kind kind, std::string fallback, std::string help) {
  KeySpec k;
  k.name = std::move(name);
  k.kind = kind;
  k.fallback = std::move(fallback);
  k.help = std::move(help);
  return k;
}

KeySpec ranged(KeySpec k, double lo, double hi, bool lo_open = false, bool hi_open = false) {
  k.lo = lo;
  k.hi = hi;
  k.lo_open = lo_open;
  k.hi_open = hi_open;
  return k;
}

KeySpec choice(std::string name, std::string fallback, std::vector<std::string> choices,
               std::string help) {
  KeySpec k = key(std::move(name), Kind::Choice, std::move(fallback), std::move(help));
  k.choices = std::move(choices);
  return k;
}

KeySpec required(KeySpec k) {
  k.required = true;
  return k;
}

std::vector<KeySpec> common_keys() {
  return {
      ranged(key("schema_version", Kind::Int, "1", "config schema version (must be 1)"), 1, 1),
      key("output_dir", Kind::Text, "out", "directory for all output files"),
      key("master_seed", Kind::UInt, "2025", "seed of the random environment"),
      ranged(key("threads", Kind::Int, "1", "worker threads (0 = all cores); never changes results"), 0, 4096),
  };
}

std::vector<KeySpec> build(Command c) {
  std::vector<KeySpec> k = common_keys();
  auto add = [&](KeySpec s) { k.push_back(std::move(s)); };
  const auto N = [](std::string fallback) {
    return ranged(key("N", Kind::Int, std::move(fallback), "lattice half-size; targets lie on x + y = 2N"), 1, 1e9);
  };
  const auto replicas = [](std::string fallback) {
    return ranged(key("replicas", Kind::Int, std::move(fallback), "independent environments (streams)"), 2, 1e9);
  };
  const auto first_stream = key("first_stream", Kind::UInt, "0", "stream id of replica 0");
  const auto cache = key("cache_dir", Kind::Text, "", "reuse passage-time ensembles stored here");
  const auto n_min = ranged(key("n_min", Kind::Int, "6", "first shell"), 1, 60);
  const auto n_max = ranged(key("n_max", Kind::Int, "12", "last shell"), 1, 60);

  switch (c) {
    case Command::Sample:
      add(choice("process", "airy2", {"airy1", "airy2"}, "process to sample"));
      add(N("2000"));
      add(ranged(key("t_start", Kind::Real, "0", "first grid time"), 0, 1e300));
      add(ranged(key("t_end", Kind::Real, "1", "last grid time (inclusive when on the grid)"), 0, 1e300, true));
      add(ranged(key("stride", Kind::Int, "1", "grid step in lattice offsets"), 1, 1e9));
      add(ranged(key("paths", Kind::Int, "1", "number of paths, streams first_stream .. first_stream+paths-1"), 1, 1e7));
      add(first_stream);
      add(choice("centering", "parabolic", {"parabolic", "characteristic"}, "Airy2 centring"));
      add(ranged(key("horizon_fraction", Kind::Real, "0.5", "offset cap as a fraction of N"), 0, 1, true));
      add(ranged(key("window_halfwidth", Kind::Int, "0", "Airy1 source window (0 = minimal admissible)"), 0, 1e12));
      break;
    case Command::Extract: {
      add(required(key("input_dir", Kind::Text, "", "directory with path_*.txt files")));
      add(ranged(key("gammas", Kind::RealList, "0.3,0.5,0.8", "gauge multipliers"), 0, 1, true, true));
      add(choice("side", "both", {"upper", "lower", "both"}, "which level sets to extract"));
      break;
    }
    case Command::Dim:
      add(key("input_dir", Kind::Text, "", "directory with levelset_*.csv files"));
      add(ranged(key("synthetic_theta", Kind::Real, "", "use the synthetic set S_theta instead"), 0, 1, true, true));
      add(n_min);
      add(n_max);
      add(ranged(key("rho_grid", Kind::RealList, "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1",
                     "rho values written to the shell table"), 0, 1, true));
      add(ranged(key("rho_tolerance", Kind::Real, "0.001", "bisection tolerance"), 0, 0.5, true));
      add(ranged(key("slope_tolerance", Kind::Real, "0.01", "slope below which the content is decaying"), 0, 10, true));
      add(ranged(key("min_shells", Kind::Int, "3", "nonempty shells required"), 2, 60));
      add(key("pooled", Kind::Bool, "true", "pool sets with the same (process, side, gamma)"));
      break;
    case Command::Thick:
      add(key("input", Kind::Text, "", "point-set file"));
      add(ranged(key("synthetic_theta", Kind::Real, "", "use the synthetic set S_theta instead"), 0, 1, true, true));
      add(n_min);
      add(n_max);
      add(ranged(key("theta_grid", Kind::RealList, "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95",
                     "thickness exponents to check"), 0, 1, true, true));
      break;
    case Command::Tails:
      add(choice("statistic", "one_point", {"one_point", "running_extreme", "interval_min", "modulus"},
                 "tail statistic"));
      add(choice("process", "airy2", {"airy1", "airy2"}, "process (one_point, running_extreme)"));
      add(choice("side", "upper", {"upper", "lower"}, "tail side (one_point, running_extreme)"));
      add(N("2000"));
      add(replicas("20000"));
      add(first_stream);
      add(ranged(key("x_grid", Kind::RealList, "0.5,0.75,1,1.25,1.5,1.75,2,2.25,2.5,2.75,3", "tail thresholds"), 0, 1e300));
      add(key("t0", Kind::Real, "0", "running extreme: interval start"));
      add(key("t1", Kind::Real, "1", "running extreme: interval end"));
      add(ranged(key("strides", Kind::IntList, "2,4", "running extreme: coarser grids to report"), 1, 1e9));
      add(choice("mode", "l2p", {"l2p", "p2p"}, "interval_min: line-to-point or point-to-point"));
      add(ranged(key("delta", Kind::Real, "0.1", "interval_min: interval length in units of (2N)^{2/3}"), 0, 1e3));
      add(key("m_offset", Kind::Real, "0", "interval_min: centre in units of (2N)^{2/3}"));
      add(ranged(key("horizon", Kind::Real, "2", "modulus: sup over [0, horizon]"), 0, 1e3, true));
      add(ranged(key("target", Kind::Real, "", "coefficient target (default from the statistic)"), 0, 1e300, true));
      add(ranged(key("band_lo", Kind::Real, "", "lower band factor (default 0.65, or 0.6 for cubic lemma targets)"), 0, 1e300, true));
      add(ranged(key("band_hi", Kind::Real, "", "upper band factor (default 1.35, or 1.4 for cubic lemma targets)"), 0, 1e300, true));
      add(cache);
      break;
    case Command::Cov:
      add(N("2000"));
      add(replicas("10000"));
      add(first_stream);
      add(ranged(key("t_grid", Kind::RealList, "0,0.5,1,2,3", "time lags"), 0, 1e3));
      add(cache);
      break;
    case Command::Assoc:
      add(N("2000"));
      add(replicas("20000"));
      add(first_stream);
      add(key("times", Kind::RealList, "0,0.6666666666666666,1.3333333333333333,2", "time grid; all (s, t) pairs are checked"));
      add(key("thresholds", Kind::RealList, "-1,0,1", "levels; all (a, b) pairs are checked"));
      add(cache);
      break;
    case Command::LppChecks:
      add(ranged(key("environments", Kind::Int, "100", "random environments for the brute-force check"), 1, 1e6));
      add(ranged(key("max_grid", Kind::Int, "5", "largest grid side for the brute-force check"), 1, 6));
      add(ranged(key("geodesic_N", Kind::Int, "50", "N for the geodesic consistency check"), 1, 2000));
      add(ranged(key("geodesic_seeds", Kind::Int, "100", "environments for the geodesic check"), 0, 1e6));
      add(key("shapes", Kind::ShapeList, "200:200,500:500", "m:n targets for the expectation estimate"));
      add(replicas("500"));
      add(ranged(key("gamma", Kind::Real, "0.5", "shapes must satisfy gamma <= m/n <= 1/gamma"), 0, 1, true));
      add(ranged(key("window_N", Kind::Int, "2000", "N for the line-to-point window check"), 2, 1e7));
      add(ranged(key("window_seeds", Kind::Int, "100", "environments for the window check (0 skips)"), 0, 1e6));
      break;
    case Command::Report:
      add(required(key("inputs", Kind::Text, "", "comma-separated output directories of earlier runs")));
      break;
  }
  return k;
}

bool parse_bool(std::string_view v, bool& out) {
  if (v == "true" || v == "1" || v == "yes") return out = true, true;
  if (v == "false" || v == "0" || v == "no") return out = false, true;
  return false;
}

std::string range_text(const KeySpec& k) {
  std::ostringstream os;
  os << (k.lo_open ? '(' : '[') << io::format_double(k.lo) << ", " << io::format_double(k.hi)
     << (k.hi_open ? ')' : ']');
  return os.str();
}

bool in_range(const KeySpec& k, double v) {
  const bool lo_ok = k.lo_open ? v > k.lo : v >= k.lo;
  const bool hi_ok = k.hi_open ? v < k.hi : v <= k.hi;
  return lo_ok && hi_ok;
}

bool has_range(const KeySpec& k) { return k.lo > -1e300 || k.hi < 1e300; }

// Empty string when fine, otherwise a message.
std::string check_value(const KeySpec& k, const std::string& v) {
  auto range_msg = [&](const std::string& item) {
    return "value " + item + " is outside " + range_text(k);
  };
  switch (k.kind) {
    case Kind::Int: {
      const auto x = io::parse_int(v);
      if (!x) return "expected an integer, got '" + v + "'";
      if (has_range(k) && !in_range(k, static_cast<double>(*x))) return range_msg(v);
      return {};
    }
    case Kind::UInt:
      return io::parse_uint(v) ? std::string() : "expected an unsigned integer, got '" + v + "'";
    case Kind::Real: {
      const auto x = io::parse_double(v);
      if (!x || !std::isfinite(*x)) return "expected a finite number, got '" + v + "'";
      if (has_range(k) && !in_range(k, *x)) return range_msg(v);
      return {};
    }
    case Kind::Bool: {
      bool b;
      return parse_bool(v, b) ? std::string() : "expected true or false, got '" + v + "'";
    }
    case Kind::Text:
      return {};
    case Kind::Choice:
      if (std::find(k.choices.begin(), k.choices.end(), v) != k.choices.end()) return {};
      {
        std::string all;
        for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
        return "expected one of {" + all + "}, got '" + v + "'";
      }
    case Kind::RealList:
    case Kind::IntList: {
      const auto items = io::split(v, ',');
      if (items.empty()) return "expected a comma-separated list";
      for (const auto& item : items) {
        double x = 0.0;
        if (k.kind == Kind::IntList) {
          const auto i = io::parse_int(item);
          if (!i) return "list entry '" + item + "' is not an integer";
          x = static_cast<double>(*i);
        } else {
          const auto d = io::parse_double(item);
          if (!d || !std::isfinite(*d)) return "list entry '" + item + "' is not a finite number";
          x = *d;
        }
        if (has_range(k) && !in_range(k, x)) return range_msg(item);
      }
      return {};
    }
    case Kind::ShapeList: {
      const auto items = io::split(v, ',');
      if (items.empty()) return "expected m:n pairs separated by commas";
      for (const auto& item : items) {
        const auto parts = io::split(item, ':');
        if (parts.size() != 2) return "entry '" + item + "' is not of the form m:n";
        const auto m = io::parse_int(parts[0]);
        const auto n = io::parse_int(parts[1]);
        if (!m || !n || *m < 1 || *n < 1) return "entry '" + item + "' needs positive integers";
      }
      return {};
    }
  }
  return {};
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kNames)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kNames)
    if (n == name) return cmd;
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> all = [] {
    std::vector<Command> v;
    for (const auto& [cmd, n] : kNames) v.push_back(cmd);
    return v;
  }();
  return all;
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

const std::vector<KeySpec>& key_specs(Command command) {
  static const std::map<Command, std::vector<KeySpec>> table = [] {
    std::map<Command, std::vector<KeySpec>> t;
    for (const auto& [cmd, n] : kNames) t[cmd] = build(cmd);
    return t;
  }();
  return table.at(command);
}

RawConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = io::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key=value, got '" + std::string(line) + "'");
    } else {
      const std::string k(io::trim(line.substr(0, eq)));
      const std::string v(io::trim(line.substr(eq + 1)));
      if (k.empty()) {
        errors.push_back("line " + std::to_string(line_no) + ": empty key");
      } else if (raw.lines.count(k)) {
        errors.push_back(k + ": duplicated on line " + std::to_string(line_no) + " (first on line " +
                         std::to_string(raw.lines[k]) + ")");
      } else {
        raw.entries.emplace_back(k, v);
        raw.lines[k] = line_no;
      }
    }
    if (end == text.size()) break;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return raw;
}

RawConfig read_config_file(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError({"cannot read config file '" + path + "': " + e.what()});
  }
  return parse_config_text(text);
}

void apply_override(RawConfig& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError({"override '" + std::string(assignment) + "' is not key=value"});
  const std::string k(io::trim(assignment.substr(0, eq)));
  const std::string v(io::trim(assignment.substr(eq + 1)));
  for (auto& [ek, ev] : raw.entries)
    if (ek == k) {
      ev = v;
      return;
    }
  raw.entries.emplace_back(k, v);
}

SimConfig validate(Command command, const RawConfig& raw) {
  const auto& specs = key_specs(command);
  std::vector<std::string> errors;
  auto where = [&](const std::string& k) {
    const auto it = raw.lines.find(k);
    return it == raw.lines.end() ? k : k + " (line " + std::to_string(it->second) + ")";
  };

  SimConfig cfg;
  cfg.command_ = command;
  for (const auto& [k, v] : raw.entries) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const KeySpec& s) { return s.name == k; });
    if (it == specs.end()) {
      errors.push_back(where(k) + ": unknown key for command '" + std::string(to_string(command)) + "'");
      continue;
    }
    if (const std::string msg = check_value(*it, v); !msg.empty()) errors.push_back(where(k) + ": " + msg);
    cfg.values_[k] = v;
  }
  for (const KeySpec& s : specs) {
    if (cfg.values_.count(s.name)) continue;
    if (s.required) errors.push_back(s.name + ": required key is missing");
    else if (!s.fallback.empty()) cfg.values_[s.name] = s.fallback;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));

  // Cross-key checks on well-typed values.
  auto sorted_list = [&](const char* k) {
    if (cfg.has(k) && !strictly_increasing(cfg.reals(k)))
      errors.push_back(where(k) + ": entries must be strictly increasing");
  };
  switch (command) {
    case Command::Sample:
      if (!(cfg.real("t_end") > cfg.real("t_start"))) errors.push_back(where("t_end") + ": must exceed t_start");
      break;
    case Command::Dim:
    case Command::Thick: {
      const char* file_key = command == Command::Dim ? "input_dir" : "input";
      if (cfg.has(file_key) == cfg.has("synthetic_theta"))
        errors.push_back(std::string(file_key) + ": set exactly one of " + file_key + " and synthetic_theta");
      if (cfg.integer("n_min") > cfg.integer("n_max")) errors.push_back(where("n_max") + ": must be >= n_min");
      sorted_list(command == Command::Dim ? "rho_grid" : "theta_grid");
      break;
    }
    case Command::Extract:
      sorted_list("gammas");
      break;
    case Command::Tails:
      sorted_list("x_grid");
      if (cfg.real("t1") < cfg.real("t0")) errors.push_back(where("t1") + ": must be >= t0");
      if (cfg.has("band_lo") && cfg.has("band_hi") && cfg.real("band_lo") > cfg.real("band_hi"))
        errors.push_back(where("band_hi") + ": must be >= band_lo");
      break;
    case Command::Cov:
      sorted_list("t_grid");
      break;
    case Command::Assoc:
      sorted_list("times");
      sorted_list("thresholds");
      break;
    case Command::LppChecks: {
      const double g = cfg.real("gamma");
      for (const auto& [m, n] : cfg.shapes("shapes")) {
        const double r = static_cast<double>(m) / static_cast<double>(n);
        if (r < g || r > 1.0 / g)
          errors.push_back(where("shapes") + ": " + std::to_string(m) + ":" + std::to_string(n) +
                           " has m/n outside [gamma, 1/gamma]");
      }
      break;
    }
    case Command::Report:
      break;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::int64_t SimConfig::integer(const std::string& k) const { return *io::parse_int(values_.at(k)); }
std::uint64_t SimConfig::uinteger(const std::string& k) const { return *io::parse_uint(values_.at(k)); }
double SimConfig::real(const std::string& k) const { return *io::parse_double(values_.at(k)); }
bool SimConfig::boolean(const std::string& k) const {
  bool b = false;
  parse_bool(values_.at(k), b);
  return b;
}
const std::string& SimConfig::text(const std::string& k) const { return values_.at(k); }

std::vector<double> SimConfig::reals(const std::string& k) const {
  std::vector<double> out;
  for (const auto& item : io::split(values_.at(k), ',')) out.push_back(*io::parse_double(item));
  return out;
}

std::vector<std::int64_t> SimConfig::integers(const std::string& k) const {
  std::vector<std::int64_t> out;
  for (const auto& item : io::split(values_.at(k), ',')) out.push_back(*io::parse_int(item));
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> SimConfig::shapes(const std::string& k) const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& item : io::split(values_.at(k), ',')) {
    const auto parts = io::split(item, ':');
    out.emplace_back(*io::parse_int(parts[0]), *io::parse_int(parts[1]));
  }
  return out;
}

std::string SimConfig::render() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string describe_keys(Command command) {
  std::string out;
  for (const KeySpec& k : key_specs(command)) {
    out += "  " + k.name;
    if (k.required) out += " (required)";
    else if (!k.fallback.empty()) out += " [" + k.fallback + "]";
    out += "  " + k.help + "\n";
  }
  return out;
}

}  // namespace airydim::cli
