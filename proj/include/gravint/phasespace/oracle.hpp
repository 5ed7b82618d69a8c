#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"
#include "gravint/gravity.hpp"
#include "gravint/phasespace/brackets.hpp"
#include "gravint/phasespace/evolve_wigner.hpp"
#include "gravint/phasespace/hamiltonian.hpp"
#include "gravint/phasespace/states.hpp"
#include "gravint/phasespace/weyl.hpp"

namespace gravint::phasespace {

/// Nondimensional set-up for the full phase-space check of the two-state
/// reduction. The physical caesium parameters put ~1e30 fringes across the
/// p grid, so the oracle works at a scale where the interference ridge is
/// resolvable.
struct OracleConfig {
  double hbar = 1.0;
  double particle_mass = 1.0e6;  // heavy: packets barely move over the run
  double arm_separation = 1.0;
  double packet_width = 0.08;
  std::variant<TwoBallPotential, QuadraticPotential> potential =
      TwoBallPotential{100.0, 200.0, 2.0, 2.0 * std::numbers::sqrt2};
  std::size_t n_q = 512;
  std::size_t n_p = 512;
  double q_span = 1.5;  // q in +-q_span * arm_separation
  double p_span = 8.0;  // p in +-p_span * hbar / packet_width
  double duration = 8.0;
  std::size_t steps = 64;
  int moyal_order = 3;
  bool mask_kinetic = false;
  double phase_tolerance = 0.05;  // relative, against the two-state omega
};

/// Keys: hbar, particle_mass, arm_separation, packet_width,
/// potential = two-ball | quadratic, coupling_left, coupling_right,
/// dist_left, dist_right (two-ball), curvature, slope (quadratic),
/// grid_points_q, grid_points_p, q_span_factor, p_span_factor, duration,
/// steps, moyal_order, mask_kinetic, phase_tolerance. All optional; unknown
/// keys are rejected.
inline OracleConfig load_oracle_config(std::string_view document) {
  const auto kv = parse_key_values(document);
  static const char* const kKnown[] = {
      "hbar", "particle_mass", "arm_separation", "packet_width", "potential",
      "coupling_left", "coupling_right", "dist_left", "dist_right",
      "curvature", "slope", "grid_points_q", "grid_points_p",
      "q_span_factor", "p_span_factor", "duration", "steps", "moyal_order",
      "mask_kinetic", "phase_tolerance"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || key == k;
    if (!ok) throw ParseError("unknown oracle key '" + key + "'");
  }
  OracleConfig c;
  auto num = [&](const char* key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : gravint::detail::parse_double(it->second, key);
  };
  auto count = [&](const char* key, std::size_t fallback) {
    const double v = num(key, static_cast<double>(fallback));
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw ParseError(std::string("key '") + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  c.hbar = num("hbar", c.hbar);
  c.particle_mass = num("particle_mass", c.particle_mass);
  c.arm_separation = num("arm_separation", c.arm_separation);
  c.packet_width = num("packet_width", c.packet_width);
  c.n_q = count("grid_points_q", c.n_q);
  c.n_p = count("grid_points_p", c.n_p);
  c.q_span = num("q_span_factor", c.q_span);
  c.p_span = num("p_span_factor", c.p_span);
  c.duration = num("duration", c.duration);
  c.steps = count("steps", c.steps);
  c.moyal_order = static_cast<int>(num("moyal_order", c.moyal_order));
  c.phase_tolerance = num("phase_tolerance", c.phase_tolerance);
  if (const auto it = kv.find("mask_kinetic"); it != kv.end()) {
    if (it->second == "true") c.mask_kinetic = true;
    else if (it->second == "false") c.mask_kinetic = false;
    else throw ParseError("mask_kinetic must be true or false");
  }
  const auto kind = kv.find("potential");
  if (kind == kv.end() || kind->second == "two-ball") {
    const TwoBallPotential d = std::get<TwoBallPotential>(OracleConfig{}.potential);
    c.potential = TwoBallPotential{num("coupling_left", d.coupling_left),
                                   num("coupling_right", d.coupling_right),
                                   num("dist_left", d.dist_left),
                                   num("dist_right", d.dist_right)};
  } else if (kind->second == "quadratic") {
    c.potential = QuadraticPotential{num("curvature", 0.0), num("slope", 0.0), 0.0};
  } else {
    throw ParseError("potential must be 'two-ball' or 'quadratic'");
  }
  if (!(c.hbar > 0 && c.particle_mass > 0 && c.arm_separation > 0 &&
        c.packet_width > 0 && c.duration > 0 && c.q_span > 0 && c.p_span > 0)) {
    throw ValidationError("oracle scales, spans and duration must be positive");
  }
  if (c.moyal_order < 0) throw ValidationError("moyal_order must be >= 0");
  return c;
}

/// Two-state predictions for the same potential:
///   omega_Q = [V(dx/2) - V(-dx/2)] / hbar,  omega_C = dx V'(0) / hbar.
struct TwoStateFrequencies {
  double omega_quantum;
  double omega_classical;
};

template <AnalyticPotential P>
TwoStateFrequencies two_state_frequencies(const P& v, double dx, double hbar) {
  return {(v.derivative(0, 0.5 * dx) - v.derivative(0, -0.5 * dx)) / hbar,
          dx * v.derivative(1, 0.0) / hbar};
}

/// Phase of <-dx/2|rho|dx/2> sampled through a run.
struct PhaseTrack {
  std::vector<double> times;
  std::vector<double> phases;  // unwrapped
  double omega = 0.0;          // least-squares slope
};

inline PhaseTrack fit_phase_track(std::vector<double> times,
                                  const std::vector<std::complex<double>>& coherences) {
  PhaseTrack track;
  track.times = std::move(times);
  double previous = 0.0;
  for (std::size_t i = 0; i < coherences.size(); ++i) {
    double ph = std::arg(coherences[i]);
    if (i > 0) {
      ph += 2.0 * std::numbers::pi *
            std::round((previous - ph) / (2.0 * std::numbers::pi));
    }
    track.phases.push_back(ph);
    previous = ph;
  }
  const double n = static_cast<double>(track.times.size());
  double st = 0, sp = 0, stt = 0, stp = 0;
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    st += track.times[i];
    sp += track.phases[i];
    stt += track.times[i] * track.times[i];
    stp += track.times[i] * track.phases[i];
  }
  const double denom = n * stt - st * st;
  track.omega = denom > 0.0 ? (n * stp - st * sp) / denom : 0.0;
  return track;
}

struct OracleReport {
  std::string potential_kind;
  TwoStateFrequencies two_state{};
  PhaseTrack moyal;
  PhaseTrack poisson;
  TruncationDiagnostics truncation;
  double resolution_floor = 0.0;
  double max_phase_gap = 0.0;  // max |phase_moyal - phase_poisson|
  double normalisation_drift = 0.0;
  double min_initial_value = 0.0;
  // The fringe between the arms shears in q at wavenumber ~ |V''(0)| t dx /
  // hbar. Interpolating the coherence between q rows needs a few samples
  // per sheared fringe; an odd grid puts the midpoint on a row instead.
  double q_samples_per_fringe = 0.0;
  bool midpoint_on_grid = false;
  bool moyal_matches_quantum = false;
  bool poisson_matches_classical = false;
  bool quadratic_collapse = true;  // only meaningful for quadratic potentials
  WignerGrid initial;
  WignerGrid final_moyal;

  bool passed() const {
    return moyal_matches_quantum && poisson_matches_classical &&
           quadratic_collapse;
  }
};

/// Runs the oracle twice, with the truncated Moyal bracket and with the
/// Poisson bracket alone, reads the arm coherence back through the inverse
/// Weyl transform after every step and compares the fitted phase velocities
/// with the two-state predictions.
inline OracleReport run_oracle(const OracleConfig& c) {
  OracleReport report;
  const auto [q_axis, p_axis] =
      default_axes(c.arm_separation, c.packet_width, c.hbar, c.n_q, c.n_p,
                   c.q_span, c.p_span);
  const WignerGrid w0 =
      wigner_from_two_packets(q_axis, p_axis, c.hbar, c.arm_separation,
                              c.packet_width, {0.5, 0.0});
  report.min_initial_value = w0.min_value();

  const int max_order = 2 * c.moyal_order + 1;
  const HamiltonianField h = std::visit(
      [&](const auto& v) {
        return HamiltonianField(v, q_axis, std::max(1, max_order),
                                c.particle_mass, c.hbar, !c.mask_kinetic);
      },
      c.potential);
  report.two_state = std::visit(
      [&](const auto& v) {
        return two_state_frequencies(v, c.arm_separation, c.hbar);
      },
      c.potential);
  report.potential_kind =
      std::holds_alternative<TwoBallPotential>(c.potential) ? "two-ball"
                                                            : "quadratic";
  report.truncation = truncation_diagnostics(h, w0, BracketOrder{c.moyal_order});
  {
    const double curvature = std::abs(std::visit(
        [](const auto& v) { return v.derivative(2, 0.0); }, c.potential));
    const double k = curvature * c.duration * c.arm_separation / c.hbar;
    report.q_samples_per_fringe =
        k > 0.0 ? 2.0 * std::numbers::pi / (k * q_axis.spacing())
                : std::numeric_limits<double>::infinity();
    const double t = (0.0 - q_axis.min) / q_axis.spacing();
    report.midpoint_on_grid = std::abs(t - std::round(t)) < 1e-12;
  }

  const double dt = c.duration / static_cast<double>(c.steps);
  const double x = -0.5 * c.arm_separation;
  const double y = 0.5 * c.arm_separation;
  report.initial = w0;
  auto run = [&](int n_max, WignerGrid* keep) {
    std::vector<double> times;
    std::vector<std::complex<double>> coherence;
    const auto final_grid = evolve_wigner(
        h, w0, BracketOrder{n_max}, c.duration, dt, [&](const WignerGrid& w) {
          times.push_back(w.time);
          coherence.push_back(weyl_density_matrix(w, x, y));
        });
    report.normalisation_drift = std::max(
        report.normalisation_drift, std::abs(final_grid.total() - w0.total()));
    if (keep) *keep = final_grid;
    return fit_phase_track(std::move(times), coherence);
  };
  report.moyal = run(c.moyal_order, &report.final_moyal);
  report.poisson = run(0, nullptr);

  for (std::size_t i = 0; i < report.moyal.phases.size(); ++i) {
    report.max_phase_gap =
        std::max(report.max_phase_gap,
                 std::abs(report.moyal.phases[i] - report.poisson.phases[i]));
  }
  const double wq = report.two_state.omega_quantum;
  const double wc = report.two_state.omega_classical;
  report.resolution_floor =
      c.phase_tolerance * std::max(std::abs(wq), std::abs(wc));
  report.moyal_matches_quantum =
      std::abs(report.moyal.omega - wq) <= c.phase_tolerance * std::abs(wq) ||
      (wq == 0.0 && std::abs(report.moyal.omega) <= report.resolution_floor);
  report.poisson_matches_classical =
      std::abs(report.poisson.omega - wc) <= report.resolution_floor;
  if (report.potential_kind == "quadratic") {
    report.quadratic_collapse = report.max_phase_gap <= 1e-10;
  }
  return report;
}

inline std::string format_report(const OracleReport& r, const OracleConfig& c) {
  using gravint::detail::format_double;
  auto pf = [](bool ok) { return ok ? std::string("pass") : std::string("fail"); };
  std::string s;
  auto put = [&s](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  put("potential", r.potential_kind);
  put("grid_points_q", std::to_string(c.n_q));
  put("grid_points_p", std::to_string(c.n_p));
  put("duration", format_double(c.duration));
  put("steps", std::to_string(c.steps));
  put("moyal_order", std::to_string(c.moyal_order));
  put("mask_kinetic", c.mask_kinetic ? "true" : "false");
  put("omega_quantum_two_state", format_double(r.two_state.omega_quantum));
  put("omega_classical_two_state", format_double(r.two_state.omega_classical));
  put("omega_moyal_oracle", format_double(r.moyal.omega));
  put("omega_poisson_oracle", format_double(r.poisson.omega));
  put("resolution_floor", format_double(r.resolution_floor));
  put("max_phase_gap_moyal_poisson", format_double(r.max_phase_gap));
  for (std::size_t n = 0; n < r.truncation.term_norms.size(); ++n) {
    put("moyal_term_norm_" + std::to_string(n + 1),
        format_double(r.truncation.term_norms[n]));
  }
  put("truncation_tail_estimate", format_double(r.truncation.tail_estimate));
  put("truncation_geometric_decrease",
      r.truncation.geometric_decrease ? "true" : "false");
  put("normalisation_drift", format_double(r.normalisation_drift));
  put("initial_min_wigner", format_double(r.min_initial_value));
  put("q_samples_per_sheared_fringe", format_double(r.q_samples_per_fringe));
  put("midpoint_on_grid", r.midpoint_on_grid ? "true" : "false");
  put("check_moyal_vs_two_state", pf(r.moyal_matches_quantum));
  put("check_poisson_vs_classical", pf(r.poisson_matches_classical));
  if (r.potential_kind == "quadratic") {
    put("check_quadratic_collapse", pf(r.quadratic_collapse));
  }
  put("overall", pf(r.passed()));
  return s;
}

}  // namespace gravint::phasespace
