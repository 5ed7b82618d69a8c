#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "gravint/errors.hpp"
#include "gravint/phasespace/grid.hpp"
#include "gravint/phasespace/hamiltonian.hpp"

namespace gravint::phasespace {

namespace detail {

/// sum_j exp(i p_j s / hbar) W(q_i, p_j) dp
inline std::complex<double> row_transform(const WignerGrid& w, std::size_t i,
                                          double s) {
  const auto row = w.row(i);
  const double dp = w.p.spacing();
  // exp(i p_j s/hbar) = exp(i p_0 s/hbar) * step^j, step = exp(i dp s/hbar);
  // the recurrence drifts, so re-seed it every block.
  constexpr std::size_t kBlock = 64;
  std::complex<double> acc{};
  for (std::size_t j0 = 0; j0 < row.size(); j0 += kBlock) {
    std::complex<double> phase = std::polar(1.0, w.p[j0] * s / w.hbar);
    const std::complex<double> step = std::polar(1.0, dp * s / w.hbar);
    const std::size_t j1 = std::min(row.size(), j0 + kBlock);
    for (std::size_t j = j0; j < j1; ++j) {
      acc += row[j] * phase;
      phase *= step;
    }
  }
  return acc * dp;
}

/// Four-point Lagrange stencil around fractional index t on an axis of n
/// samples. Returns the first index and the weights.
inline std::pair<std::size_t, std::array<double, 4>> cubic_stencil(
    double t, std::size_t n) {
  auto base = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
  base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 4);
  const double x = t - static_cast<double>(base);  // position among 0..3
  std::array<double, 4> wts{};
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) l *= (x - b) / static_cast<double>(a - b);
    }
    wts[a] = l;
  }
  return {static_cast<std::size_t>(base), wts};
}

}  // namespace detail

/// <x|rho|y> = integral exp(i p (x - y) / hbar) W((x + y)/2, p) dp, by
/// rectangle quadrature in p and cubic interpolation in q.
inline std::complex<double> weyl_density_matrix(const WignerGrid& w, double x,
                                                double y) {
  const double q = 0.5 * (x + y);
  if (!w.q.contains(q)) {
    throw GridError("(x + y)/2 = " + std::to_string(q) +
                    " lies outside the q grid");
  }
  const double s = x - y;
  const double t = (q - w.q.min) / w.q.spacing();
  const double nearest = std::round(t);
  if (std::abs(t - nearest) < 1e-12) {
    return detail::row_transform(w, static_cast<std::size_t>(nearest), s);
  }
  const auto [base, wts] = detail::cubic_stencil(t, w.q.n);
  std::complex<double> out{};
  for (std::size_t a = 0; a < 4; ++a) {
    out += wts[a] * detail::row_transform(w, base + a, s);
  }
  return out;
}

/// Operator-kernel image of the potential part of the Poisson bracket:
/// (x - y)/(i hbar) V'((x + y)/2) <x|rho|y>.
template <AnalyticPotential P, class Kernel>
std::complex<double> potential_commutator_term(const P& potential, double hbar,
                                               Kernel&& rho_kernel, double x,
                                               double y) {
  const double force = potential.derivative(1, 0.5 * (x + y));
  const std::complex<double> rho = rho_kernel(x, y);
  return (x - y) / std::complex<double>(0.0, hbar) * force * rho;
}

}  // namespace gravint::phasespace
