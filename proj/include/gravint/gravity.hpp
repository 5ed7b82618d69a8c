#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"

namespace gravint {

/// Point-mass potential of two sources on the x-axis, the left one at
/// x = -dist_left and the right one at x = +dist_right. Couplings are the
/// products G*m*M in whatever unit system the caller works in, so the same
/// type serves SI configs and the nondimensional phase-space oracle.
///
/// Defined only on the open interval (-dist_left, dist_right).
struct TwoBallPotential {
  double coupling_left = 0.0;
  double coupling_right = 0.0;
  double dist_left = 0.0;
  double dist_right = 0.0;

  bool in_domain(double x) const { return x > -dist_left && x < dist_right; }

  void check_domain(double x) const {
    if (!in_domain(x)) {
      throw DomainError("two-ball potential evaluated at x = " +
                        std::to_string(x) + " outside (-" +
                        std::to_string(dist_left) + ", " +
                        std::to_string(dist_right) + ")");
    }
  }

  double value(double x) const {
    check_domain(x);
    return -coupling_left / (dist_left + x) - coupling_right / (dist_right - x);
  }

  /// k-th derivative in x, k >= 0:
  ///   d^k/dx^k [-A/(d1+x)] = -A (-1)^k k! / (d1+x)^(k+1)
  ///   d^k/dx^k [-B/(d2-x)] = -B k! / (d2-x)^(k+1)
  double derivative(int k, double x) const {
    check_domain(x);
    if (k < 0) throw DomainError("negative derivative order");
    const double left = dist_left + x;
    const double right = dist_right - x;
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return -coupling_left * sign * factorial / std::pow(left, k + 1) -
           coupling_right * factorial / std::pow(right, k + 1);
  }
};

inline TwoBallPotential potential_profile(const ExperimentConfig& c) {
  const double gm = c.constants.G * c.particle_mass();
  return {gm * c.mass_left, gm * c.mass_right, c.dist_left, c.dist_right};
}

inline double potential(const ExperimentConfig& c, double x) {
  return potential_profile(c).value(x);
}

inline double force_derivative(const ExperimentConfig& c, double x) {
  return potential_profile(c).derivative(1, x);
}

/// Phase frequency generated by the Poisson bracket alone:
/// arm_separation * V'(0) / hbar, written out as
/// (G m dx / hbar) (M1/d1^2 - M2/d2^2).
inline double omega_classical(const TwoBallPotential& v, double arm_separation,
                              double hbar) {
  return arm_separation / hbar *
         (v.coupling_left / (v.dist_left * v.dist_left) -
          v.coupling_right / (v.dist_right * v.dist_right));
}

/// Phase frequency of the full quantum (Moyal) dynamics,
/// [V(dx/2) - V(-dx/2)] / hbar, written out as
/// (G m dx / hbar) (M1/(d1^2 - dx^2/4) - M2/(d2^2 - dx^2/4)).
inline double omega_quantum(const TwoBallPotential& v, double arm_separation,
                            double hbar) {
  const double half = 0.5 * arm_separation;
  if (!(v.dist_left > half) || !(v.dist_right > half)) {
    throw DomainError("omega_quantum requires both distances > dx/2");
  }
  const double q = half * half;
  return arm_separation / hbar *
         (v.coupling_left / (v.dist_left * v.dist_left - q) -
          v.coupling_right / (v.dist_right * v.dist_right - q));
}

inline double omega_classical(const ExperimentConfig& c) {
  validate(c);
  return omega_classical(potential_profile(c), c.arm_separation,
                         c.constants.hbar);
}

inline double omega_quantum(const ExperimentConfig& c) {
  validate(c);
  return omega_quantum(potential_profile(c), c.arm_separation,
                       c.constants.hbar);
}

enum class DistanceSide { kLeft, kRight };

namespace detail {

inline void require_positive_masses(const ExperimentConfig& c) {
  if (!(c.mass_left > 0.0 && c.mass_right > 0.0)) {
    throw InfeasibleGeometryError(
        "null placement requires both source masses to be positive");
  }
}

inline ExperimentConfig with_distance(ExperimentConfig c, DistanceSide side,
                                      double d) {
  (side == DistanceSide::kLeft ? c.dist_left : c.dist_right) = d;
  return c;
}

inline double checked_solution(const ExperimentConfig& c, DistanceSide side,
                               double d) {
  const auto solved = with_distance(c, side, d);
  const double half = 0.5 * c.arm_separation;
  const double radius = side == DistanceSide::kLeft ? solved.radius_left()
                                                    : solved.radius_right();
  if (!(d - half > radius)) {
    throw InfeasibleGeometryError(
        "solved distance " + std::to_string(d) +
        " m places the ball over the arm (needs > " +
        std::to_string(half + radius) + " m)");
  }
  validate(solved);
  return d;
}

}  // namespace detail

/// Distance on `side` that makes omega_classical vanish with the other
/// distance held: M1/d1^2 = M2/d2^2.
inline double solve_null_distance(const ExperimentConfig& c,
                                  DistanceSide side = DistanceSide::kRight) {
  detail::require_positive_masses(c);
  const double d =
      side == DistanceSide::kRight
          ? c.dist_left * std::sqrt(c.mass_right / c.mass_left)
          : c.dist_right * std::sqrt(c.mass_left / c.mass_right);
  return detail::checked_solution(c, side, d);
}

/// Distance on `side` that makes omega_quantum vanish:
/// d2^2 = dx^2/4 + (M2/M1)(d1^2 - dx^2/4), or its mirror.
inline double solve_null_quantum_distance(
    const ExperimentConfig& c, DistanceSide side = DistanceSide::kRight) {
  detail::require_positive_masses(c);
  const double q = 0.25 * c.arm_separation * c.arm_separation;
  if (!(c.dist_left * c.dist_left > q && c.dist_right * c.dist_right > q)) {
    throw InfeasibleGeometryError("held distance must exceed dx/2");
  }
  const double d =
      side == DistanceSide::kRight
          ? std::sqrt(q + c.mass_right / c.mass_left *
                              (c.dist_left * c.dist_left - q))
          : std::sqrt(q + c.mass_left / c.mass_right *
                              (c.dist_right * c.dist_right - q));
  return detail::checked_solution(c, side, d);
}

enum class NullTarget { kClassical, kQuantum };

/// Bracketing root search for the null distance. Only used to cross-check
/// the closed forms and as the entry point for geometries without one.
inline double solve_null_distance_bracketed(const ExperimentConfig& c,
                                            DistanceSide side,
                                            NullTarget target) {
  detail::require_positive_masses(c);
  const double hbar = c.constants.hbar;
  auto residual = [&](double d) {
    auto v = potential_profile(detail::with_distance(c, side, d));
    return target == NullTarget::kClassical
               ? omega_classical(v, c.arm_separation, hbar)
               : omega_quantum(v, c.arm_separation, hbar);
  };
  const double half = 0.5 * c.arm_separation;
  const double held = side == DistanceSide::kRight ? c.dist_left : c.dist_right;
  double lo = half * (1.0 + 1e-9);
  double hi = 2.0 * held + half;
  const double f_lo = residual(lo);
  while (residual(hi) * f_lo > 0.0) {
    hi *= 2.0;
    if (hi > 1e6 * held) {
      throw InfeasibleGeometryError("no sign change while bracketing");
    }
  }
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      residual, lo, hi, boost::math::tools::eps_tolerance<double>(52),
      max_iter);
  return detail::checked_solution(c, side, 0.5 * (a + b));
}

/// omega_Q at the "gap" placement d1 = dx/2 + R1 + gap versus the same
/// placement with d1 rounded to `rounding`; d2 is nulled for omega_C both
/// times.
struct PlacementComparison {
  double dist_left_exact;
  double dist_right_exact;
  double omega_quantum_exact;
  double dist_left_rounded;
  double dist_right_rounded;
  double omega_quantum_rounded;
};

inline PlacementComparison placement_comparison(const ExperimentConfig& c,
                                                double gap = 1e-3,
                                                double rounding = 1e-3) {
  PlacementComparison out{};
  auto nulled = [&](double d1) {
    auto cfg = c;
    cfg.dist_left = d1;
    cfg.dist_right = solve_null_distance(cfg, DistanceSide::kRight);
    return std::pair{cfg.dist_right, omega_quantum(cfg)};
  };
  out.dist_left_exact = 0.5 * c.arm_separation + c.radius_left() + gap;
  std::tie(out.dist_right_exact, out.omega_quantum_exact) =
      nulled(out.dist_left_exact);
  out.dist_left_rounded = std::round(out.dist_left_exact / rounding) * rounding;
  std::tie(out.dist_right_rounded, out.omega_quantum_rounded) =
      nulled(out.dist_left_rounded);
  return out;
}

}  // namespace gravint
