#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"
#include "gravint/evolve.hpp"
#include "gravint/spectral.hpp"
#include "gravint/two_level.hpp"

namespace gravint {

/// Projection onto |+>: S = <+|rho|+> = 1/2 + Re rho_LR.
inline double signal_from_state(const TwoLevelState& s) {
  return 0.5 + s.rho_LR.real();
}

struct RecordMetadata {
  std::string model;
  std::uint64_t seed = 0;
  double noise_sd = 0.0;
};

struct FringeRecord {
  std::vector<double> times;
  std::vector<double> signal;
  std::optional<std::vector<double>> population;  // rho_LL
  RecordMetadata metadata;
};

inline constexpr double kSignalSlack = 1e-9;

inline void validate(const FringeRecord& r) {
  if (r.times.size() != r.signal.size()) {
    throw ValidationError("record times and signal differ in length");
  }
  if (r.population && r.population->size() != r.times.size()) {
    throw ValidationError("record population track has the wrong length");
  }
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (!std::isfinite(r.times[i]) || !std::isfinite(r.signal[i])) {
      throw ValidationError("record contains non-finite values");
    }
    if (i > 0 && !(r.times[i] > r.times[i - 1])) {
      throw ValidationError("record times must be strictly increasing");
    }
    if (r.metadata.noise_sd == 0.0 &&
        (r.signal[i] < -kSignalSlack || r.signal[i] > 1.0 + kSignalSlack)) {
      throw ValidationError("noiseless signal value " +
                            detail::format_double(r.signal[i]) +
                            " outside [0, 1]");
    }
  }
}

enum class SolveMethod {
  kAuto,        // closed form where one exists, spectral for the general model
  kIntegrate,   // adaptive Runge-Kutta for every model
};

/// Independent stream for repetition `index` of a seed sweep: the engine is
/// seeded from seed_seq{lo32(base), hi32(base), lo32(index), hi32(index)}.
inline std::mt19937_64 split_stream(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Noiseless states at the sample times, starting from |+>.
inline std::vector<TwoLevelState> model_trajectory(
    const DynamicsModel& model, std::span<const double> times,
    SolveMethod method = SolveMethod::kAuto, const EvolveOptions& opt = {}) {
  validate(model);
  const auto plus = TwoLevelState::plus();
  if (method == SolveMethod::kIntegrate) {
    return evolve_trajectory(model, plus, times, opt);
  }
  if (const auto* g = std::get_if<model::GeneralLinear>(&model)) {
    return spectral_trajectory(*g, plus, times, opt.on_warning);
  }
  std::vector<TwoLevelState> out;
  out.reserve(times.size());
  for (double t : times) {
    out.push_back({plus.rho_LL, analytic_coherence(model, plus, t)});
  }
  return out;
}

/// Signal S(t) plus additive Gaussian noise, recorded unclamped. A population
/// column is attached for the general model only; the other models keep the
/// diagonal fixed at 1/2.
inline FringeRecord synthesize_record(const DynamicsModel& model,
                                      std::span<const double> times,
                                      double noise_sd, std::uint64_t seed,
                                      SolveMethod method = SolveMethod::kAuto,
                                      const EvolveOptions& opt = {}) {
  if (!(noise_sd >= 0.0)) throw InputError("noise_sd must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InputError("sample times must be strictly increasing");
    }
  }
  const auto states = model_trajectory(model, times, method, opt);
  FringeRecord r;
  r.metadata = {describe(model), seed, noise_sd};
  r.times.assign(times.begin(), times.end());
  r.signal.reserve(states.size());
  auto rng = split_stream(seed, 0);
  std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
  for (const auto& s : states) {
    double v = signal_from_state(s);
    if (noise_sd > 0.0) v += noise(rng);
    r.signal.push_back(v);
  }
  if (std::holds_alternative<model::GeneralLinear>(model)) {
    std::vector<double> pop;
    pop.reserve(states.size());
    for (const auto& s : states) pop.push_back(s.rho_LL);
    r.population = std::move(pop);
  }
  return r;
}

/// n evenly spaced samples on [0, duration].
inline std::vector<double> uniform_times(double duration, std::size_t n) {
  if (!(duration > 0.0) || n < 2) {
    throw InputError("need duration > 0 and at least 2 samples");
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = duration * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return t;
}

/// Late-time mean of rho_LL over the final quarter of the record, minus 1/2.
inline double population_shift(const FringeRecord& r) {
  if (!r.population || r.population->empty()) {
    throw MissingTrackError("record has no population track");
  }
  const auto& pop = *r.population;
  const std::size_t start = pop.size() - std::max<std::size_t>(1, pop.size() / 4);
  double sum = 0.0;
  for (std::size_t i = start; i < pop.size(); ++i) sum += pop[i];
  return sum / static_cast<double>(pop.size() - start) - 0.5;
}

// ---- CSV ---------------------------------------------------------------

inline std::string format_record(const FringeRecord& r) {
  using detail::format_double;
  std::string out = "# model=" + r.metadata.model +
                    ",seed=" + std::to_string(r.metadata.seed) +
                    ",noise_sd=" + format_double(r.metadata.noise_sd) + "\n";
  out += r.population ? "t_s,signal,population\n" : "t_s,signal\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out += format_double(r.times[i]) + "," + format_double(r.signal[i]);
    if (r.population) out += "," + format_double((*r.population)[i]);
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos
                                        ? std::string_view::npos
                                        : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

inline FringeRecord parse_record(std::string_view text) {
  FringeRecord r;
  std::size_t line_no = 0;
  bool have_header = false, have_columns = false;
  std::size_t columns = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (!have_header) {
      if (!line.starts_with("#")) {
        throw ParseError(where + ": expected '# model=...,seed=...,noise_sd=...'");
      }
      bool model = false, seed = false, noise = false;
      for (auto field : detail::split(detail::trim(line.substr(1)), ',')) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) {
          throw ParseError(where + ": malformed header field");
        }
        const auto key = detail::trim(field.substr(0, eq));
        const auto value = detail::trim(field.substr(eq + 1));
        if (key == "model") {
          r.metadata.model = std::string(value);
          model = true;
        } else if (key == "seed") {
          const auto [p, ec] = std::from_chars(value.data(),
                                               value.data() + value.size(),
                                               r.metadata.seed);
          if (ec != std::errc{} || p != value.data() + value.size()) {
            throw ParseError(where + ": bad seed");
          }
          seed = true;
        } else if (key == "noise_sd") {
          r.metadata.noise_sd = detail::parse_double(value, "noise_sd");
          noise = true;
        }
      }
      if (!(model && seed && noise)) {
        throw ParseError(where + ": header needs model, seed and noise_sd");
      }
      have_header = true;
      continue;
    }
    if (!have_columns) {
      const auto trimmed = detail::trim(line);
      if (trimmed == "t_s,signal") {
        columns = 2;
      } else if (trimmed == "t_s,signal,population") {
        columns = 3;
        r.population.emplace();
      } else {
        throw ParseError(where + ": expected columns t_s,signal[,population]");
      }
      have_columns = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != columns) {
      throw ParseError(where + ": expected " + std::to_string(columns) +
                       " columns");
    }
    r.times.push_back(detail::parse_double(detail::trim(cells[0]), "t_s"));
    r.signal.push_back(detail::parse_double(detail::trim(cells[1]), "signal"));
    if (columns == 3) {
      r.population->push_back(
          detail::parse_double(detail::trim(cells[2]), "population"));
    }
  }
  if (!have_columns) throw ParseError("record has no header or column line");
  validate(r);
  return r;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

inline FringeRecord read_record_file(const std::string& path) {
  return parse_record(read_text_file(path));
}

}  // namespace gravint
