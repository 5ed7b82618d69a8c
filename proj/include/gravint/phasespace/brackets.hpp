#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "gravint/errors.hpp"
#include "gravint/phasespace/fft.hpp"
#include "gravint/phasespace/grid.hpp"
#include "gravint/phasespace/hamiltonian.hpp"

namespace gravint::phasespace {

/// Number of hbar^(2n) correction terms kept beyond the Poisson bracket.
/// n_max = 0 is classical Liouville flow.
struct BracketOrder {
  int n_max = 3;
};

namespace detail {

inline void check_aligned(const HamiltonianField& h, const WignerGrid& w) {
  if (!(h.q_axis() == w.q)) {
    throw GridError("Hamiltonian and Wigner grids use different q axes");
  }
}

/// Rate table r(q_i, kappa_k) such that the potential part of the bracket
/// acts on the p-spectrum of row i as multiplication by i * r. For terms
/// n in [n_lo, n_hi]:
///   r = sum_n hbar^(2n) V^(2n+1)(q_i) kappa^(2n+1) / (4^n (2n+1)!)
/// which is c_n (i kappa)^(2n+1) V^(2n+1) / i with
/// c_n = (-1)^n hbar^(2n) / (2^(2n) (2n+1)!).
inline std::vector<double> potential_rates(const HamiltonianField& h,
                                           const Axis& p_axis, int n_lo,
                                           int n_hi) {
  if (2 * n_hi + 1 > h.max_order()) {
    throw InputError("insufficient derivative order for Moyal order " +
                     std::to_string(n_hi) + ": need V^(" +
                     std::to_string(2 * n_hi + 1) + ")");
  }
  const auto kappa = wavenumbers(p_axis.n, p_axis.spacing());
  const std::size_t nq = h.q_axis().n;
  std::vector<double> rates(nq * p_axis.n, 0.0);
  std::vector<double> coeff(static_cast<std::size_t>(n_hi) + 1, 0.0);
  {
    double hbar_pow = 1.0;   // hbar^(2n)
    double four_pow = 1.0;   // 4^n
    double factorial = 1.0;  // (2n+1)!
    for (int n = 0; n <= n_hi; ++n) {
      if (n > 0) {
        hbar_pow *= h.hbar() * h.hbar();
        four_pow *= 4.0;
        factorial *= static_cast<double>((2 * n) * (2 * n + 1));
      }
      coeff[n] = hbar_pow / (four_pow * factorial);
    }
  }
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t k = 0; k < p_axis.n; ++k) {
      const double kk = kappa[k];
      double kpow = kk;  // kappa^(2n+1)
      double r = 0.0;
      for (int n = 0; n <= n_hi; ++n) {
        if (n >= n_lo) {
          r += coeff[n] * h.potential_derivative(2 * n + 1, i) * kpow;
        }
        kpow *= kk * kk;
      }
      rates[i * p_axis.n + k] = r;
    }
  }
  return rates;
}

/// out += IFFT_p( i r FFT_p(W) )
inline void add_potential_part(const WignerGrid& w,
                               const std::vector<double>& rates,
                               SpectralWorkspace& ws, WignerGrid& out) {
  ws.load(w.values);
  ws.forward_p();
  auto d = ws.data();
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    d[idx] *= std::complex<double>(0.0, rates[idx]);
  }
  ws.backward_p();
  const double scale = 1.0 / static_cast<double>(w.p.n);
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    out.values[idx] += scale * d[idx].real();
  }
}

/// out += -(p / m) dW/dq, derivative taken spectrally along q.
inline void add_kinetic_part(const HamiltonianField& h, const WignerGrid& w,
                             SpectralWorkspace& ws, WignerGrid& out) {
  const auto kappa = wavenumbers(w.q.n, w.q.spacing());
  ws.load(w.values);
  ws.forward_q();
  auto d = ws.data();
  for (std::size_t i = 0; i < w.q.n; ++i) {
    for (std::size_t j = 0; j < w.p.n; ++j) {
      d[i * w.p.n + j] *= std::complex<double>(0.0, kappa[i]);
    }
  }
  ws.backward_q();
  const double scale = 1.0 / static_cast<double>(w.q.n);
  for (std::size_t i = 0; i < w.q.n; ++i) {
    for (std::size_t j = 0; j < w.p.n; ++j) {
      const std::size_t idx = i * w.p.n + j;
      out.values[idx] -= w.p[j] / h.mass() * scale * d[idx].real();
    }
  }
}

}  // namespace detail

/// {H, W} = V'(q) dW/dp - (p/m) dW/dq. The kinetic part is skipped when the
/// Hamiltonian has free dispersion masked.
inline WignerGrid poisson_bracket(const HamiltonianField& h,
                                  const WignerGrid& w) {
  detail::check_aligned(h, w);
  SpectralWorkspace ws(w.q.n, w.p.n);
  WignerGrid out = w.zeros_like();
  detail::add_potential_part(w, detail::potential_rates(h, w.p, 0, 0), ws, out);
  if (h.kinetic_enabled()) detail::add_kinetic_part(h, w, ws, out);
  return out;
}

/// Poisson bracket plus sum_{n=1}^{n_max} c_n V^(2n+1)(q) d^(2n+1)W/dp^(2n+1).
/// For p^2/2m + V(q) no other derivative combinations survive.
inline WignerGrid moyal_bracket(const HamiltonianField& h, const WignerGrid& w,
                                BracketOrder order) {
  detail::check_aligned(h, w);
  if (order.n_max < 0) throw InputError("Moyal order must be >= 0");
  SpectralWorkspace ws(w.q.n, w.p.n);
  WignerGrid out = w.zeros_like();
  detail::add_potential_part(
      w, detail::potential_rates(h, w.p, 0, order.n_max), ws, out);
  if (h.kinetic_enabled()) detail::add_kinetic_part(h, w, ws, out);
  return out;
}

/// The individual correction terms n = 1..n_max.
inline std::vector<WignerGrid> moyal_correction_terms(const HamiltonianField& h,
                                                      const WignerGrid& w,
                                                      BracketOrder order) {
  detail::check_aligned(h, w);
  SpectralWorkspace ws(w.q.n, w.p.n);
  std::vector<WignerGrid> terms;
  for (int n = 1; n <= order.n_max; ++n) {
    WignerGrid t = w.zeros_like();
    detail::add_potential_part(w, detail::potential_rates(h, w.p, n, n), ws, t);
    terms.push_back(std::move(t));
  }
  return terms;
}

/// Size of each retained correction and the share of the last one in the
/// full tangent; a crude bound on what truncation leaves out.
struct TruncationDiagnostics {
  std::vector<double> term_norms;  // L2 norm of term n = 1..n_max
  double total_norm = 0.0;         // L2 norm of the full truncated bracket
  double tail_estimate = 0.0;      // term_norms.back() / total_norm
  bool geometric_decrease = true;  // every term smaller than its predecessor
};

inline TruncationDiagnostics truncation_diagnostics(const HamiltonianField& h,
                                                    const WignerGrid& w,
                                                    BracketOrder order) {
  TruncationDiagnostics d;
  for (const auto& t : moyal_correction_terms(h, w, order)) {
    d.term_norms.push_back(t.l2_norm());
  }
  d.total_norm = moyal_bracket(h.with_kinetic(false), w, order).l2_norm();
  d.tail_estimate = d.term_norms.empty() || d.total_norm == 0.0
                        ? 0.0
                        : d.term_norms.back() / d.total_norm;
  for (std::size_t i = 1; i < d.term_norms.size(); ++i) {
    d.geometric_decrease =
        d.geometric_decrease && d.term_norms[i] < d.term_norms[i - 1];
  }
  return d;
}

}  // namespace gravint::phasespace
