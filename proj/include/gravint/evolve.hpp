#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "gravint/errors.hpp"
#include "gravint/two_level.hpp"

namespace gravint {

using WarningSink = std::function<void(const std::string&)>;

struct EvolveOptions {
  /// Absolute and relative local error bound per accepted step.
  double tolerance = 1e-10;
  /// Receives non-fatal diagnostics, e.g. states leaving the physical set.
  WarningSink on_warning{};
};

namespace detail {

using OdeState = std::array<double, 3>;  // rho_LL, Re rho_LR, Im rho_LR

inline OdeState pack(const TwoLevelState& s) {
  return {s.rho_LL, s.rho_LR.real(), s.rho_LR.imag()};
}

inline TwoLevelState unpack(const OdeState& x) {
  return {x[0], Complex{x[1], x[2]}};
}

inline void check_options(const EvolveOptions& opt) {
  if (!(opt.tolerance > 0.0 && opt.tolerance <= 1e-3)) {
    throw InputError("integrator tolerance must lie in (0, 1e-3]");
  }
}

}  // namespace detail

/// Integrates the model from t = 0 and returns the state at each requested
/// time. `times` must be non-negative and non-decreasing.
inline std::vector<TwoLevelState> evolve_trajectory(
    const DynamicsModel& model, const TwoLevelState& initial,
    std::span<const double> times, const EvolveOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  validate(model);
  detail::check_options(opt);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw InputError("evolution times must be non-negative and sorted");
    }
  }
  std::vector<TwoLevelState> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  // odeint starts observing at the first grid time, so prepend t = 0.
  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());

  auto rhs = [&model](const detail::OdeState& x, detail::OdeState& dxdt,
                      double) {
    const auto d = derivative(model, detail::unpack(x));
    dxdt = {d.d_rho_LL, d.d_rho_LR.real(), d.d_rho_LR.imag()};
  };
  bool warned = false;
  std::size_t seen = 0;
  auto observe = [&](const detail::OdeState& x, double t) {
    if (seen++ == 0) return;  // the prepended t = 0
    for (double v : x) {
      if (!std::isfinite(v)) {
        throw IntegrationError("non-finite state at t = " + std::to_string(t));
      }
    }
    const auto s = detail::unpack(x);
    if (!warned && opt.on_warning && !s.is_physical(10.0 * opt.tolerance)) {
      warned = true;
      opt.on_warning("state left the physical set at t = " +
                     std::to_string(t) + " (violation " +
                     std::to_string(s.positivity_violation()) +
                     "); the model parameters are not positivity preserving");
    }
    out.push_back(s);
  };

  auto x = detail::pack(initial);
  const double t_end = grid.back();
  const double dt0 = t_end > 0.0 ? std::min(1e-3, t_end * 1e-3) : 1e-3;
  try {
    odeint::integrate_times(
        odeint::make_controlled<odeint::runge_kutta_dopri5<detail::OdeState>>(
            opt.tolerance, opt.tolerance),
        rhs, x, grid.begin(), grid.end(), dt0, observe);
  } catch (const odeint::odeint_error& e) {
    throw IntegrationError(std::string("step size control failed: ") +
                           e.what());
  }
  return out;
}

inline TwoLevelState evolve(const DynamicsModel& model,
                            const TwoLevelState& initial, double t,
                            const EvolveOptions& opt = {}) {
  if (!(t >= 0.0)) throw InputError("evolution time must be >= 0");
  const double times[] = {t};
  return evolve_trajectory(model, initial, times, opt).front();
}

/// rho_LR(0) exp((-lambda + i omega) t); lambda = 0 for the unitary models.
inline Complex analytic_coherence(const DynamicsModel& model,
                                  const TwoLevelState& initial, double t) {
  validate(model);
  double rate = 0.0;
  double omega = 0.0;
  if (const auto* s = std::get_if<model::Schrodinger>(&model)) {
    omega = s->omega_q;
  } else if (const auto* c = std::get_if<model::ClassicalPoisson>(&model)) {
    omega = c->omega_c;
  } else if (const auto* td = std::get_if<model::TilloyDiosi>(&model)) {
    rate = td->lambda;
    omega = td->omega_g;
  } else {
    throw UnsupportedModelError(
        "no closed-form coherence for the general linear model; use "
        "spectral_solution");
  }
  return initial.rho_LR * std::exp(Complex{-rate * t, omega * t});
}

}  // namespace gravint
