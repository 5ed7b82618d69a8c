#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gravint/errors.hpp"

namespace gravint::phasespace {

/// n uniformly spaced samples including both endpoints.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  double spacing() const { return (max - min) / static_cast<double>(n - 1); }
  double operator[](std::size_t i) const {
    return min + static_cast<double>(i) * spacing();
  }
  bool contains(double x) const { return x >= min && x <= max; }

  void check() const {
    if (n < 4 || !(max > min)) {
      throw GridError("axis needs at least 4 points and max > min");
    }
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Sampled quasiprobability W(q, p), row-major in q: values[iq * n_p + ip].
struct WignerGrid {
  Axis q;
  Axis p;
  double hbar = 1.0;
  double time = 0.0;
  std::vector<double> values;

  WignerGrid() = default;
  WignerGrid(Axis q_axis, Axis p_axis, double hbar_, double t = 0.0)
      : q(q_axis), p(p_axis), hbar(hbar_), time(t),
        values(q_axis.n * p_axis.n, 0.0) {
    q.check();
    p.check();
    if (!(hbar > 0.0)) throw GridError("hbar must be positive");
  }

  /// Same axes, zero values: the container for a tangent.
  WignerGrid zeros_like() const { return WignerGrid(q, p, hbar, time); }

  double& at(std::size_t iq, std::size_t ip) { return values[iq * p.n + ip]; }
  double at(std::size_t iq, std::size_t ip) const {
    return values[iq * p.n + ip];
  }
  std::span<const double> row(std::size_t iq) const {
    return {values.data() + iq * p.n, p.n};
  }

  double cell_area() const { return q.spacing() * p.spacing(); }

  /// sum W dq dp
  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_area();
  }

  double min_value() const {
    return *std::min_element(values.begin(), values.end());
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  /// Root of sum W^2 dq dp.
  double l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s * cell_area());
  }

  /// Position density sum_p W dp at every q sample.
  std::vector<double> position_marginal() const {
    std::vector<double> m(q.n, 0.0);
    for (std::size_t i = 0; i < q.n; ++i) {
      double s = 0.0;
      for (double v : row(i)) s += v;
      m[i] = s * p.spacing();
    }
    return m;
  }

  bool same_axes(const WignerGrid& other) const {
    return q == other.q && p == other.p && hbar == other.hbar;
  }
};

}  // namespace gravint::phasespace
