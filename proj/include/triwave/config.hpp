#pragma once

// Run configuration: an INI-style text file.
//
//   # comment
//   [grid]
//   dimension = 1
//   halfwidth = 20
//   points = 512
//
//   [system]
//   p = 3
//   gamma = 2
//   omega = 1, 1, 1
//
// Sections: run, grid, system, potential, solve, sweep, output.  Unknown
// sections or keys are errors.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triwave/error.hpp"
#include "triwave/field_io.hpp"
#include "triwave/grid.hpp"
#include "triwave/potential.hpp"
#include "triwave/solver.hpp"
#include "triwave/system.hpp"
#include "triwave/threshold.hpp"

namespace triwave {

enum class Command { Solve, Sweep, Gamma0, ComparePotential, ScalarRef };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Solve:
      return "solve";
    case Command::Sweep:
      return "sweep";
    case Command::Gamma0:
      return "gamma0";
    case Command::ComparePotential:
      return "compare-potential";
    case Command::ScalarRef:
      return "scalar-ref";
  }
  return "?";
}

inline Command parse_command(std::string_view name) {
  for (Command c : {Command::Solve, Command::Sweep, Command::Gamma0, Command::ComparePotential, Command::ScalarRef})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown command '" + std::string(name) +
                    "' (expected solve, sweep, gamma0, compare-potential or scalar-ref)");
}

inline int default_points(int dimension) {
  switch (dimension) {
    case 1:
      return 512;
    case 2:
      return 128;
    default:
      return 64;
  }
}

struct RunConfig {
  Command command = Command::Solve;
  GridSpec grid{1, 20.0, 512};
  double p = 3.0;
  double gamma = 0.0;
  std::array<double, 3> omega{1.0, 1.0, 1.0};
  std::optional<PotentialSpecs> potentials;
  HypothesisMode potential_mode = HypothesisMode::V2;
  SolveConfig solve;
  SweepConfig sweep;
  std::optional<double> gamma0_hint;  // known gamma0 for compare-potential in V2prime mode
  std::filesystem::path output_dir = ".";
  bool emit_fields = false;
  FieldFormat field_format = FieldFormat::Text;

  SystemParams system() const {
    if (potentials) return SystemParams::sampled(p, gamma, sample_potentials(*potentials, grid));
    return SystemParams::constant(grid, p, gamma, omega);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, std::map<std::string, Entry>> sections) : sections_(std::move(sections)) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string where(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return "[" + section + "] " + key + (e ? " (line " + std::to_string(e->line) + ")" : "");
  }

  double real(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? parse_real(e->value, where(section, key)) : fallback;
  }

  long long integer(const std::string& section, const std::string& key, long long fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(e->value, &used);
      if (used == e->value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where(section, key) + ": expected an integer, got '" + e->value + "'");
  }

  std::uint64_t unsigned_integer(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(e->value, &used);
      if (used == e->value.size() && e->value.find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where(section, key) + ": expected a nonnegative integer, got '" + e->value + "'");
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw ConfigError(where(section, key) + ": expected true or false, got '" + e->value + "'");
  }

  std::vector<double> reals(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    std::vector<double> out;
    if (!e) return out;
    for (const auto& item : split_list(e->value)) out.push_back(parse_real(item, where(section, key)));
    return out;
  }

  static double parse_real(const std::string& text, const std::string& where) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// "name(arg, arg)" -> (name, [args]); bare "name" -> (name, []).
inline std::pair<std::string, std::vector<std::string>> parse_call(const std::string& text, const std::string& where) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {trim(text), {}};
  if (text.back() != ')') throw ConfigError(where + ": missing ')' in '" + text + "'");
  return {trim(text.substr(0, open)), split_list(std::string_view(text).substr(open + 1, text.size() - open - 2))};
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

inline PotentialSpec parse_potential(const std::string& text, const std::string& where,
                                     const std::filesystem::path& base) {
  const auto [name, args] = parse_call(text, where);
  auto num = [&](std::size_t i) { return ConfigReader::parse_real(args.at(i), where); };
  try {
    if (name == "constant" && args.size() == 1) return PotentialSpec::constant(num(0));
    if (name == "gaussian_well" && args.size() == 3) return PotentialSpec::gaussian_well(num(0), num(1), num(2));
    if (name == "radial_table" && args.size() == 1) {
      const auto path = resolve(base, args[0]);
      if (!std::filesystem::exists(path)) throw ConfigError(where + ": file not found: " + path.string());
      return PotentialSpec::load_radial_table(path);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": expected constant(v), gaussian_well(v_inf, depth, width) or radial_table(path), got '" +
                    text + "'");
}

inline Ansatz parse_ansatz(const std::string& text, const std::string& where, const std::filesystem::path& base,
                           const GridSpec& grid) {
  const auto [name, args] = parse_call(text, where);
  if (name == "gaussian_triple" && args.empty()) return Ansatz::gaussian_triple();
  if (name == "signed_gaussian_triple") {
    if (args.empty()) return Ansatz::signed_gaussian_triple();
    if (args.size() == 1 && args[0].size() == 3) {
      std::array<int, 3> signs{};
      for (int i = 0; i < 3; ++i) {
        const char c = args[0][i];
        if (c != '+' && c != '-') throw ConfigError(where + ": sign pattern must use '+' and '-'");
        signs[i] = c == '-' ? -1 : 1;
      }
      return Ansatz::signed_gaussian_triple(signs);
    }
  }
  if (name == "scalar_embedding" && args.size() == 1) {
    const int i = static_cast<int>(ConfigReader::parse_real(args[0], where));
    if (i < 1 || i > 3) throw ConfigError(where + ": scalar_embedding component must be 1, 2 or 3");
    return Ansatz::scalar_embedding(i);
  }
  if (name == "file" && args.size() == 3) {
    std::array<std::optional<Field>, 3> parts;
    for (int i = 0; i < 3; ++i) {
      const auto path = resolve(base, args[i]);
      if (!std::filesystem::exists(path)) throw ConfigError(where + ": file not found: " + path.string());
      try {
        parts[i] = load_field(path);
      } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
      }
      if (!(parts[i]->spec() == grid)) {
        throw ConfigError(where + ": " + path.string() + " is on grid " + describe(parts[i]->spec()) +
                          ", config grid is " + describe(grid));
      }
    }
    return Ansatz::from_state(TriField(std::move(*parts[0]), std::move(*parts[1]), std::move(*parts[2])));
  }
  throw ConfigError(where + ": expected gaussian_triple, signed_gaussian_triple[(pattern)], scalar_embedding(i) or "
                    "file(u1, u2, u3), got '" + text + "'");
}

}  // namespace detail

/// Parses and validates a run configuration.  `command` overrides [run]
/// command; relative paths resolve against `base_dir`.
inline RunConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt,
                              const std::filesystem::path& base_dir = ".") {
  static const std::map<std::string, std::set<std::string>> kKnown{
      {"run", {"command"}},
      {"grid", {"dimension", "halfwidth", "points"}},
      {"system", {"p", "gamma", "omega"}},
      {"potential", {"v1", "v2", "v3", "mode"}},
      {"solve",
       {"max_iterations", "step_size", "residual_tol", "restarts", "seed", "initial_ansatz", "threads",
        "recenter_interval"}},
      {"sweep", {"gammas", "gamma_min", "gamma_max", "gamma_step", "bisection_width", "vector_margin", "gamma0"}},
      {"output", {"directory", "emit_fields", "field_format"}},
  };

  std::map<std::string, std::map<std::string, detail::Entry>> sections;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto c = raw.find_first_of("#;"); c != std::string::npos) raw.erase(c);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKnown.count(section)) throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' outside a section");
    if (!kKnown.at(section).count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in section [" + section + "]");
    }
    if (sections[section].count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in section [" + section + "]");
    }
    sections[section][key] = {value, lineno};
  }
  const detail::ConfigReader cfg(std::move(sections));

  RunConfig rc;
  if (command) {
    rc.command = *command;
  } else if (const auto* e = cfg.find("run", "command")) {
    rc.command = parse_command(e->value);
  }

  rc.grid.dimension = static_cast<int>(cfg.integer("grid", "dimension", 1));
  if (rc.grid.dimension < 1 || rc.grid.dimension > 3) throw ConfigError("[grid] dimension must be 1, 2 or 3");
  rc.grid.halfwidth = cfg.real("grid", "halfwidth", 20.0);
  rc.grid.points_per_axis = static_cast<int>(cfg.integer("grid", "points", default_points(rc.grid.dimension)));
  if (!(rc.grid.halfwidth > 0.0)) throw ConfigError("[grid] halfwidth must be positive");
  if (rc.grid.points_per_axis < 8) throw ConfigError("[grid] points must be at least 8");

  rc.p = cfg.real("system", "p", 3.0);
  if (!(rc.p > 2.0)) throw ConfigError("p must exceed 2");
  if (rc.grid.dimension == 3 && !(rc.p < 5.0)) throw ConfigError("N=3 requires p<5 (p < (N+2)/(N-2))");
  rc.gamma = cfg.real("system", "gamma", 0.0);
  if (cfg.has("system", "omega")) {
    const auto w = cfg.reals("system", "omega");
    if (w.size() != 3) throw ConfigError(cfg.where("system", "omega") + ": expected three values");
    for (int i = 0; i < 3; ++i) {
      if (!(w[i] > 0.0)) throw ConfigError("omega_" + std::to_string(i + 1) + " must be positive");
      rc.omega[i] = w[i];
    }
  }

  if (cfg.has_section("potential")) {
    if (cfg.has("system", "omega")) throw ConfigError("give either [system] omega or a [potential] section, not both");
    std::array<std::optional<PotentialSpec>, 3> v;
    for (int i = 0; i < 3; ++i) {
      const std::string key = "v" + std::to_string(i + 1);
      const auto* e = cfg.find("potential", key);
      if (!e) throw ConfigError("[potential] needs v1, v2 and v3");
      v[i] = detail::parse_potential(e->value, cfg.where("potential", key), base_dir);
    }
    rc.potentials = PotentialSpecs{*v[0], *v[1], *v[2]};
    if (const auto* e = cfg.find("potential", "mode")) {
      if (e->value == "V2") {
        rc.potential_mode = HypothesisMode::V2;
      } else if (e->value == "V2prime" || e->value == "V2'") {
        rc.potential_mode = HypothesisMode::V2prime;
      } else {
        throw ConfigError(cfg.where("potential", "mode") + ": expected V2 or V2prime");
      }
    }
  }

  auto& s = rc.solve;
  s.max_iterations = static_cast<int>(cfg.integer("solve", "max_iterations", s.max_iterations));
  s.step_size = cfg.real("solve", "step_size", s.step_size);
  s.residual_tol = cfg.real("solve", "residual_tol", s.residual_tol);
  s.restarts = static_cast<int>(cfg.integer("solve", "restarts", s.restarts));
  s.seed = cfg.unsigned_integer("solve", "seed", s.seed);
  s.threads = static_cast<int>(cfg.integer("solve", "threads", s.threads));
  s.recenter_interval = static_cast<int>(cfg.integer("solve", "recenter_interval", s.recenter_interval));
  if (const auto* e = cfg.find("solve", "initial_ansatz")) {
    s.initial_ansatz = detail::parse_ansatz(e->value, cfg.where("solve", "initial_ansatz"), base_dir, rc.grid);
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[solve] ") + e.what());
  }

  auto& sw = rc.sweep;
  sw.gammas = cfg.reals("sweep", "gammas");
  const bool has_range = cfg.has("sweep", "gamma_min") || cfg.has("sweep", "gamma_max") || cfg.has("sweep", "gamma_step");
  if (has_range) {
    if (!sw.gammas.empty()) throw ConfigError("[sweep] give either gammas or gamma_min/gamma_max/gamma_step");
    const double lo = cfg.real("sweep", "gamma_min", 0.0);
    const double hi = cfg.real("sweep", "gamma_max", lo);
    const double step = cfg.real("sweep", "gamma_step", 1.0);
    if (!(step > 0.0) || hi < lo) throw ConfigError("[sweep] needs gamma_min <= gamma_max and gamma_step > 0");
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) sw.gammas.push_back(lo + static_cast<double>(i) * step);
  }
  sw.bisection_width = cfg.real("sweep", "bisection_width", sw.bisection_width);
  sw.vector_margin = cfg.real("sweep", "vector_margin", sw.vector_margin);
  if (!(sw.bisection_width > 0.0)) throw ConfigError("[sweep] bisection_width must be positive");
  if (cfg.has("sweep", "gamma0")) rc.gamma0_hint = cfg.real("sweep", "gamma0", 0.0);
  sw.solve = rc.solve;

  rc.output_dir = detail::resolve(base_dir, cfg.find("output", "directory") ? cfg.find("output", "directory")->value : ".");
  rc.emit_fields = cfg.boolean("output", "emit_fields", false);
  if (const auto* e = cfg.find("output", "field_format")) {
    if (e->value == "text") {
      rc.field_format = FieldFormat::Text;
    } else if (e->value == "binary") {
      rc.field_format = FieldFormat::Binary;
    } else {
      throw ConfigError(cfg.where("output", "field_format") + ": expected text or binary");
    }
  }

  if ((rc.command == Command::Sweep || rc.command == Command::Gamma0) && sw.gammas.empty()) {
    throw ConfigError("command " + to_string(rc.command) + " needs [sweep] gammas or a gamma range");
  }
  if ((rc.command == Command::Gamma0 || rc.command == Command::Sweep || rc.command == Command::ScalarRef) &&
      rc.potentials) {
    throw ConfigError("command " + to_string(rc.command) + " works with constant omega only");
  }
  if (rc.command == Command::ComparePotential && !rc.potentials) {
    throw ConfigError("command compare-potential needs a [potential] section");
  }
  return rc;
}

}  // namespace triwave
