#pragma once

#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "gravint/errors.hpp"
#include "gravint/gravity.hpp"
#include "gravint/phasespace/grid.hpp"

namespace gravint::phasespace {

/// A potential whose derivatives of every order are known in closed form.
template <class P>
concept AnalyticPotential = requires(const P& v, int k, double x) {
  { v.derivative(k, x) } -> std::convertible_to<double>;
};

/// V(q) = curvature q^2 + slope q + offset.
struct QuadraticPotential {
  double curvature = 0.0;
  double slope = 0.0;
  double offset = 0.0;

  double derivative(int k, double x) const {
    switch (k) {
      case 0: return (curvature * x + slope) * x + offset;
      case 1: return 2.0 * curvature * x + slope;
      case 2: return 2.0 * curvature;
      default: return 0.0;
    }
  }
};

static_assert(AnalyticPotential<QuadraticPotential>);
static_assert(AnalyticPotential<TwoBallPotential>);

/// H(q, p) = p^2 / 2m + V(q) sampled on a q axis: V and its derivatives up
/// to `max_order` are stored per q sample.
class HamiltonianField {
 public:
  template <AnalyticPotential P>
  HamiltonianField(const P& potential, const Axis& q_axis, int max_order,
                   double mass, double hbar, bool kinetic_enabled = true)
      : q_axis_(q_axis), mass_(mass), hbar_(hbar),
        kinetic_enabled_(kinetic_enabled),
        derivatives_(static_cast<std::size_t>(max_order) + 1,
                     std::vector<double>(q_axis.n)) {
    q_axis.check();
    if (max_order < 1) throw InputError("derivative order must be >= 1");
    if (!(mass > 0.0) || !(hbar > 0.0)) {
      throw InputError("mass and hbar must be positive");
    }
    try {
      for (int k = 0; k <= max_order; ++k) {
        for (std::size_t i = 0; i < q_axis.n; ++i) {
          derivatives_[k][i] = potential.derivative(k, q_axis[i]);
        }
      }
    } catch (const DomainError& e) {
      throw GridError(std::string("potential undefined on the q grid: ") +
                      e.what());
    }
  }

  const Axis& q_axis() const { return q_axis_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  bool kinetic_enabled() const { return kinetic_enabled_; }
  int max_order() const { return static_cast<int>(derivatives_.size()) - 1; }

  /// Held-trap variant: same potential, free dispersion switched off.
  HamiltonianField with_kinetic(bool enabled) const {
    HamiltonianField h = *this;
    h.kinetic_enabled_ = enabled;
    return h;
  }

  /// k-th derivative of V at q sample i.
  double potential_derivative(int k, std::size_t i) const {
    if (k < 0 || k > max_order()) {
      throw InputError("insufficient derivative order: need V^(" +
                       std::to_string(k) + "), have up to V^(" +
                       std::to_string(max_order()) + ")");
    }
    return derivatives_[static_cast<std::size_t>(k)][i];
  }

  double max_abs_force() const {
    double m = 0.0;
    for (double v : derivatives_[1]) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Axis q_axis_;
  double mass_;
  double hbar_;
  bool kinetic_enabled_;
  std::vector<std::vector<double>> derivatives_;
};

}  // namespace gravint::phasespace
