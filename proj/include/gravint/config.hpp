#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "gravint/errors.hpp"

namespace gravint {

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
  double G = 6.67430e-11;           // m^3 kg^-1 s^-2
  double hbar = 1.054571817e-34;    // J s
  double amu = 1.66053906660e-27;   // kg

  friend bool operator==(const PhysicalConstants&,
                         const PhysicalConstants&) = default;
};

inline constexpr double kTungstenDensity = 19300.0;  // kg m^-3

/// Radius of a homogeneous sphere of mass `mass` and density `density`.
inline double ball_radius(double mass, double density) {
  if (!(density > 0.0)) {
    throw DomainError("ball_radius: density must be positive");
  }
  if (!(mass >= 0.0)) {
    throw DomainError("ball_radius: mass must be non-negative");
  }
  return std::cbrt(3.0 * mass / (4.0 * std::numbers::pi * density));
}

/// Two source balls on the x-axis at -dist_left and +dist_right, a particle
/// held in superposition at +-arm_separation/2. All SI except the particle
/// mass, which is kept in atomic mass units as entered.
struct ExperimentConfig {
  double particle_mass_amu = 0.0;
  double arm_separation = 0.0;  // m
  double mass_left = 0.0;       // kg
  double mass_right = 0.0;      // kg
  double dist_left = 0.0;       // m
  double dist_right = 0.0;      // m
  double source_density = kTungstenDensity;
  double hold_time = 0.0;  // s
  PhysicalConstants constants{};

  double particle_mass() const { return particle_mass_amu * constants.amu; }
  double radius_left() const { return ball_radius(mass_left, source_density); }
  double radius_right() const {
    return ball_radius(mass_right, source_density);
  }

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

/// Throws ValidationError naming the first violated invariant.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw ValidationError(what); };
  const auto& k = c.constants;
  if (!(k.G > 0.0 && k.hbar > 0.0 && k.amu > 0.0)) {
    fail("physical constants must be strictly positive");
  }
  if (!(c.particle_mass_amu > 0.0)) fail("particle_mass_amu must be > 0");
  if (!(c.arm_separation > 0.0)) fail("arm_separation_m must be > 0");
  if (!(c.mass_left >= 0.0)) fail("mass_left_kg must be >= 0");
  if (!(c.mass_right >= 0.0)) fail("mass_right_kg must be >= 0");
  if (!(c.source_density > 0.0)) fail("source_density_kg_m3 must be > 0");
  if (!(c.hold_time >= 0.0)) fail("hold_time_s must be >= 0");
  const double half = 0.5 * c.arm_separation;
  if (!(c.dist_left > half)) fail("dist_left_m must exceed arm_separation/2");
  if (!(c.dist_right > half)) {
    fail("dist_right_m must exceed arm_separation/2");
  }
  if (!(c.dist_left - half > c.radius_left())) {
    fail("left ball overlaps the left arm: dist_left - arm_separation/2 <= "
         "radius(mass_left)");
  }
  if (!(c.dist_right - half > c.radius_right())) {
    fail("right ball overlaps the right arm: dist_right - arm_separation/2 "
         "<= radius(mass_right)");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::string_view key) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ParseError("invalid number for key '" + std::string(key) + "': '" +
                     std::string(text) + "'");
  }
  return value;
}

/// Shortest decimal representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Flat `key = value` document. `#` starts a comment; blank lines ignored;
/// duplicate keys are a parse error.
using KeyValueMap = std::map<std::string, std::string, std::less<>>;

inline KeyValueMap parse_key_values(std::string_view text) {
  KeyValueMap out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!out.emplace(std::string(key), std::string(value)).second) {
      throw ParseError("duplicate key '" + std::string(key) + "'");
    }
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses and validates an experiment document. Required keys:
/// particle_mass_amu, arm_separation_m, mass_left_kg, mass_right_kg,
/// dist_left_m, dist_right_m, source_density_kg_m3, hold_time_s.
/// Optional constant overrides: gravitational_constant,
/// reduced_planck_constant, atomic_mass_unit_kg. Any other key is rejected.
inline ExperimentConfig load_config(std::string_view document) {
  const KeyValueMap kv = parse_key_values(document);
  ExperimentConfig c;
  struct Field {
    std::string_view key;
    double* target;
    bool required;
  };
  const Field fields[] = {
      {"particle_mass_amu", &c.particle_mass_amu, true},
      {"arm_separation_m", &c.arm_separation, true},
      {"mass_left_kg", &c.mass_left, true},
      {"mass_right_kg", &c.mass_right, true},
      {"dist_left_m", &c.dist_left, true},
      {"dist_right_m", &c.dist_right, true},
      {"source_density_kg_m3", &c.source_density, true},
      {"hold_time_s", &c.hold_time, true},
      {"gravitational_constant", &c.constants.G, false},
      {"reduced_planck_constant", &c.constants.hbar, false},
      {"atomic_mass_unit_kg", &c.constants.amu, false},
  };
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const auto& f : fields) known = known || f.key == key;
    if (!known) throw ParseError("unknown key '" + key + "'");
  }
  for (const auto& f : fields) {
    const auto it = kv.find(f.key);
    if (it == kv.end()) {
      if (f.required) {
        throw ParseError("missing required key '" + std::string(f.key) + "'");
      }
      continue;
    }
    *f.target = detail::parse_double(it->second, f.key);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  return load_config(read_text_file(path));
}

inline std::string serialize_config(const ExperimentConfig& c) {
  using detail::format_double;
  std::string out;
  auto put = [&out](std::string_view key, double v) {
    out += key;
    out += " = ";
    out += format_double(v);
    out += '\n';
  };
  put("particle_mass_amu", c.particle_mass_amu);
  put("arm_separation_m", c.arm_separation);
  put("mass_left_kg", c.mass_left);
  put("mass_right_kg", c.mass_right);
  put("dist_left_m", c.dist_left);
  put("dist_right_m", c.dist_right);
  put("source_density_kg_m3", c.source_density);
  put("hold_time_s", c.hold_time);
  const PhysicalConstants defaults{};
  if (c.constants.G != defaults.G) put("gravitational_constant", c.constants.G);
  if (c.constants.hbar != defaults.hbar) {
    put("reduced_planck_constant", c.constants.hbar);
  }
  if (c.constants.amu != defaults.amu) {
    put("atomic_mass_unit_kg", c.constants.amu);
  }
  return out;
}

}  // namespace gravint
