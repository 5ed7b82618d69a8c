#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gravint/errors.hpp"
#include "gravint/phasespace/brackets.hpp"
#include "gravint/phasespace/fft.hpp"
#include "gravint/phasespace/grid.hpp"
#include "gravint/phasespace/hamiltonian.hpp"

namespace gravint::phasespace {

/// Largest step the explicit (kinetic) part tolerates:
/// dq m / (4 p_max). Infinite when free dispersion is masked, since the
/// potential part is integrated exactly.
inline double stable_time_step(const HamiltonianField& h, const WignerGrid& w) {
  if (!h.kinetic_enabled()) return std::numeric_limits<double>::infinity();
  const double p_max = std::max(std::abs(w.p.min), std::abs(w.p.max));
  return w.q.spacing() * h.mass() / p_max / 4.0;
}

using WignerObserver = std::function<void(const WignerGrid&)>;

namespace detail {

/// Integrating-factor RK4. The potential part L is diagonal in (q, kappa_p)
/// with purely imaginary symbol i r, so exp(h L) is an exact phase rotation
/// of the p-spectrum. The kinetic part K is stepped by classical RK4 in the
/// interaction picture.
class LawsonStepper {
 public:
  LawsonStepper(const HamiltonianField& h, const WignerGrid& w,
                BracketOrder order, double dt)
      : h_(h), ws_(w.q.n, w.p.n), dt_(dt) {
    const auto rates = potential_rates(h, w.p, 0, order.n_max);
    full_.resize(rates.size());
    half_.resize(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
      full_[i] = std::polar(1.0, rates[i] * dt);
      half_[i] = std::polar(1.0, rates[i] * dt * 0.5);
    }
  }

  void step(WignerGrid& w) {
    if (!h_.kinetic_enabled()) {
      rotate(w, full_);
      return;
    }
    const double h = dt_;
    const WignerGrid k1 = kinetic(w);

    WignerGrid w2 = axpy(w, 0.5 * h, k1);
    rotate(w2, half_);
    const WignerGrid k2 = kinetic(w2);

    WignerGrid w_half = w;
    rotate(w_half, half_);
    WignerGrid w3 = axpy(w_half, 0.5 * h, k2);
    const WignerGrid k3 = kinetic(w3);

    WignerGrid w_full = w_half;
    rotate(w_full, half_);
    WignerGrid k3_rot = k3;
    rotate(k3_rot, half_);
    WignerGrid w4 = axpy(w_full, h, k3_rot);
    const WignerGrid k4 = kinetic(w4);

    // E(h)(w + h/6 k1) + h/6 (2 E(h/2)(k2 + k3) + k4)
    WignerGrid first = axpy(w, h / 6.0, k1);
    rotate(first, full_);
    WignerGrid mid = axpy(k2, 1.0, k3);
    rotate(mid, half_);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      w.values[i] = first.values[i] +
                    h / 6.0 * (2.0 * mid.values[i] + k4.values[i]);
    }
  }

 private:
  static WignerGrid axpy(const WignerGrid& x, double a, const WignerGrid& y) {
    WignerGrid out = x;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += a * y.values[i];
    }
    return out;
  }

  WignerGrid kinetic(const WignerGrid& w) {
    WignerGrid out = w.zeros_like();
    add_kinetic_part(h_, w, ws_, out);
    return out;
  }

  void rotate(WignerGrid& w, const std::vector<std::complex<double>>& factor) {
    ws_.load(w.values);
    ws_.forward_p();
    auto d = ws_.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= factor[i];
    ws_.backward_p();
    ws_.store_real(w.values, 1.0 / static_cast<double>(w.p.n));
  }

  const HamiltonianField& h_;
  SpectralWorkspace ws_;
  double dt_;
  std::vector<std::complex<double>> full_;
  std::vector<std::complex<double>> half_;
};

}  // namespace detail

/// W(t) under dW/dt = {H, W} + Moyal corrections up to `order`, in
/// ceil(t / dt) equal steps. The observer sees the initial grid and the grid
/// after every step.
inline WignerGrid evolve_wigner(const HamiltonianField& h, const WignerGrid& w0,
                                BracketOrder order, double t, double dt,
                                const WignerObserver& observer = {}) {
  detail::check_aligned(h, w0);
  if (!(t >= 0.0) || !(dt > 0.0)) {
    throw InputError("evolve_wigner needs t >= 0 and dt > 0");
  }
  if (std::abs(h.hbar() - w0.hbar) > 1e-15 * h.hbar()) {
    throw InputError("Hamiltonian and Wigner grid disagree on hbar");
  }
  const auto steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / dt - 1e-12)));
  const double h_step = t / static_cast<double>(steps);
  const double bound = stable_time_step(h, w0);
  if (h_step > bound) {
    throw InputError("time step " + std::to_string(h_step) +
                     " exceeds the stability bound " + std::to_string(bound));
  }

  WignerGrid w = w0;
  if (observer) observer(w);
  if (t == 0.0) return w;

  const double initial_max = w0.max_abs();
  const double initial_total = w0.total();
  detail::LawsonStepper stepper(h, w0, order, h_step);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.step(w);
    w.time = w0.time + h_step * static_cast<double>(n);
    const double m = w.max_abs();
    if (!std::isfinite(m) || m > 1e6 * initial_max) {
      throw InstabilityError("Wigner evolution unstable at t = " +
                             std::to_string(w.time));
    }
    if (observer) observer(w);
  }
  if (std::abs(w.total() - initial_total) > 1e-5) {
    throw InstabilityError("normalisation drifted by " +
                           std::to_string(w.total() - initial_total));
  }
  return w;
}

}  // namespace gravint::phasespace
