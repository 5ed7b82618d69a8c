#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "gravint/errors.hpp"
#include "gravint/phasespace/grid.hpp"

namespace gravint::phasespace {

/// Axes for a given arm separation and packet width: q in +-q_span*dx,
/// p in +-p_span*hbar/sigma.
inline std::pair<Axis, Axis> default_axes(double arm_separation, double sigma,
                                          double hbar, std::size_t n_q = 512,
                                          std::size_t n_p = 512,
                                          double q_span = 1.5,
                                          double p_span = 8.0) {
  return {Axis{-q_span * arm_separation, q_span * arm_separation, n_q},
          Axis{-p_span * hbar / sigma, p_span * hbar / sigma, n_p}};
}

/// rho = 1/2 (|L><L| + |R><R|) + c |L><R| + conj(c) |R><L| built from real
/// Gaussian packets psi(x) = (2 pi sigma^2)^(-1/4) exp(-(x - a)^2 / 4 sigma^2)
/// centred at a = -dx/2 (L) and +dx/2 (R).
struct TwoPacketState {
  double arm_separation = 1.0;
  double sigma = 0.1;
  std::complex<double> coherence{0.5, 0.0};

  double packet(double x, double centre) const {
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    const double u = x - centre;
    return norm * std::exp(-u * u / (4.0 * sigma * sigma));
  }

  double left_centre() const { return -0.5 * arm_separation; }
  double right_centre() const { return 0.5 * arm_separation; }

  /// <L|R>; the packets count as orthogonal when this is below 1e-6.
  double overlap() const {
    return std::exp(-arm_separation * arm_separation / (8.0 * sigma * sigma));
  }

  /// <x|rho|y>
  std::complex<double> kernel(double x, double y) const {
    const double lx = packet(x, left_centre()), ly = packet(y, left_centre());
    const double rx = packet(x, right_centre()), ry = packet(y, right_centre());
    return 0.5 * (lx * ly + rx * ry) + coherence * (lx * ry) +
           std::conj(coherence) * (rx * ly);
  }

  /// Closed-form Wigner function. Each |a><b| contributes
  ///   (1 / pi hbar) exp(-(q - (a+b)/2)^2 / 2 sigma^2 - 2 sigma^2 p^2 / hbar^2)
  ///   * exp(-i p (a - b) / hbar).
  double wigner(double q, double p, double hbar) const {
    const double s2 = sigma * sigma;
    const double pref = std::exp(-2.0 * s2 * p * p / (hbar * hbar)) /
                        (std::numbers::pi * hbar);
    auto lobe = [&](double centre) {
      const double u = q - centre;
      return std::exp(-u * u / (2.0 * s2));
    };
    // c |L><R| + c.c. has a - b = -dx: 2 Re(c exp(i p dx / hbar)).
    const std::complex<double> fringe =
        coherence * std::polar(1.0, p * arm_separation / hbar);
    return pref * (0.5 * lobe(left_centre()) + 0.5 * lobe(right_centre()) +
                   2.0 * lobe(0.0) * fringe.real());
  }
};

inline WignerGrid sample_wigner(const TwoPacketState& state, const Axis& q,
                                const Axis& p, double hbar) {
  WignerGrid w(q, p, hbar);
  for (std::size_t i = 0; i < q.n; ++i)
    for (std::size_t j = 0; j < p.n; ++j)
      w.at(i, j) = state.wigner(q[i], p[j], hbar);
  return w;
}

/// Wigner function of the two-packet superposition on the given axes.
/// Rejects grids that do not cover [-dx, dx] x [-4 hbar/sigma, 4 hbar/sigma]
/// and packets whose overlap exceeds 1e-6.
inline WignerGrid wigner_from_two_packets(const Axis& q, const Axis& p,
                                          double hbar, double arm_separation,
                                          double sigma,
                                          std::complex<double> coherence) {
  if (!(arm_separation > 0.0) || !(sigma > 0.0)) {
    throw InputError("arm separation and packet width must be positive");
  }
  const TwoPacketState state{arm_separation, sigma, coherence};
  if (state.overlap() > 1e-6) {
    throw ValidationError("packets are not orthogonal: <L|R> = " +
                          std::to_string(state.overlap()) + " > 1e-6");
  }
  if (!(q.min <= -arm_separation && q.max >= arm_separation)) {
    throw GridError("q grid must span at least [-dx, dx]");
  }
  const double p_needed = 4.0 * hbar / sigma;
  if (!(p.min <= -p_needed && p.max >= p_needed)) {
    throw GridError("p grid must span at least +-4 hbar/sigma");
  }
  return sample_wigner(state, q, p, hbar);
}

/// Minimum-uncertainty Gaussian centred at (q0, p0) with position spread
/// sigma.
inline double gaussian_wigner(double q, double p, double q0, double p0,
                              double sigma, double hbar) {
  const double u = q - q0;
  const double v = p - p0;
  return std::exp(-u * u / (2.0 * sigma * sigma) -
                  2.0 * sigma * sigma * v * v / (hbar * hbar)) /
         (std::numbers::pi * hbar);
}

}  // namespace gravint::phasespace
