#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gravint/errors.hpp"
#include "gravint/evolve.hpp"
#include "gravint/matrix_exp.hpp"
#include "gravint/two_level.hpp"

namespace gravint {

/// Real 2x2 generator of the coherence f = (Re rho_LR, Im rho_LR) under the
/// general linear model, df/dt = A f. Expanding b_LR f + b_RL conj(f) in
/// real and imaginary parts gives
///   A = [[Re(b_LR + b_RL), Im(b_RL - b_LR)],
///        [Im(b_LR + b_RL), Re(b_LR - b_RL)]].
struct CoherenceMatrix {
  SquareMatrix<2> a{};

  explicit CoherenceMatrix(const model::GeneralLinear& m) {
    const Complex sum = m.b_LR + m.b_RL;
    const Complex diff = m.b_LR - m.b_RL;
    a = {{{sum.real(), -diff.imag()}, {sum.imag(), diff.real()}}};
  }

  double trace() const { return a[0][0] + a[1][1]; }
  double determinant() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
  double frobenius_norm() const {
    return std::sqrt(a[0][0] * a[0][0] + a[0][1] * a[0][1] +
                     a[1][0] * a[1][0] + a[1][1] * a[1][1]);
  }
};

/// Inverse of the CoherenceMatrix construction: the (b_LR, b_RL) pair that
/// produces the given A. Every real 2x2 matrix is reachable.
inline std::pair<Complex, Complex> coherence_couplings(const SquareMatrix<2>& a) {
  const Complex b_lr{0.5 * (a[0][0] + a[1][1]), 0.5 * (a[1][0] - a[0][1])};
  const Complex b_rl{0.5 * (a[0][0] - a[1][1]), 0.5 * (a[1][0] + a[0][1])};
  return {b_lr, b_rl};
}

enum class EigenBranch { kRealDistinct, kComplexPair, kRepeated };

struct EigenClassification {
  EigenBranch branch;
  Complex lambda1;
  Complex lambda2;

  /// Some mode grows; such parameters cannot keep rho positive.
  bool growing() const {
    return std::max(lambda1.real(), lambda2.real()) > 0.0;
  }
};

/// Eigenvalues are called repeated when |l1 - l2| < 1e-9 max(1, |A|_F).
/// Only used for reporting: the solution itself is branch-free.
inline EigenClassification classify(const CoherenceMatrix& m) {
  const double half_trace = 0.5 * m.trace();
  const double disc = half_trace * half_trace - m.determinant();
  const double split = 2.0 * std::sqrt(std::abs(disc));
  const double tol = 1e-9 * std::max(1.0, m.frobenius_norm());
  if (split < tol) {
    return {EigenBranch::kRepeated, Complex{half_trace}, Complex{half_trace}};
  }
  const double r = std::sqrt(std::abs(disc));
  if (disc > 0.0) {
    return {EigenBranch::kRealDistinct, Complex{half_trace + r},
            Complex{half_trace - r}};
  }
  return {EigenBranch::kComplexPair, Complex{half_trace, r},
          Complex{half_trace, -r}};
}

inline std::string solution_form(const EigenClassification& c) {
  using detail::format_double;
  switch (c.branch) {
    case EigenBranch::kRealDistinct:
      return "f(t) = c1 exp(" + format_double(c.lambda1.real()) +
             " t) v1 + c2 exp(" + format_double(c.lambda2.real()) + " t) v2";
    case EigenBranch::kComplexPair:
      return "f(t) = c1 exp((" + format_double(c.lambda1.real()) + " + i " +
             format_double(c.lambda1.imag()) + ") t) v + c.c.";
    case EigenBranch::kRepeated:
      return "f(t) = c1 exp(" + format_double(c.lambda1.real()) +
             " t) v + c2 exp(" + format_double(c.lambda1.real()) +
             " t) (w + t v)";
  }
  return {};
}

namespace detail {

/// Generator of (f1, f2, rho_LL): the coherence block A plus the population
/// row 2 (Re a_LR, -Im a_LR, 0).
inline SquareMatrix<3> augmented_generator(const model::GeneralLinear& m) {
  const CoherenceMatrix cm(m);
  return {{{cm.a[0][0], cm.a[0][1], 0.0},
           {cm.a[1][0], cm.a[1][1], 0.0},
           {2.0 * m.a_LR.real(), -2.0 * m.a_LR.imag(), 0.0}}};
}

template <std::size_t N>
SquareMatrix<N> scaled(SquareMatrix<N> a, double t) {
  for (auto& row : a)
    for (auto& v : row) v *= t;
  return a;
}

}  // namespace detail

/// Closed-form evolution of the general linear model: the coherence is
/// exp(A t) f(0), and rho_LL(t) = rho_LL(0) + integral of the population
/// rate, taken from the bottom row of the exponential of the augmented
/// generator.
inline TwoLevelState spectral_solution(const model::GeneralLinear& m,
                                       const TwoLevelState& initial, double t,
                                       const WarningSink& on_warning = {}) {
  if (!(t >= 0.0)) throw InputError("evolution time must be >= 0");
  const CoherenceMatrix cm(m);
  if (on_warning) {
    const auto cls = classify(cm);
    if (cls.growing()) {
      on_warning("coherence generator has an eigenvalue with positive real "
                 "part; the model does not preserve positivity");
    }
  }
  const ColumnVector<2> f0 = {initial.rho_LR.real(), initial.rho_LR.imag()};
  const auto f = mat_vec(expm(detail::scaled(cm.a, t)), f0);
  const ColumnVector<3> x0 = {f0[0], f0[1], initial.rho_LL};
  const auto x = mat_vec(expm(detail::scaled(detail::augmented_generator(m), t)), x0);
  return {x[2], Complex{f[0], f[1]}};
}

inline std::vector<TwoLevelState> spectral_trajectory(
    const model::GeneralLinear& m, const TwoLevelState& initial,
    std::span<const double> times, const WarningSink& on_warning = {}) {
  std::vector<TwoLevelState> out;
  out.reserve(times.size());
  bool first = true;
  for (double t : times) {
    out.push_back(spectral_solution(m, initial, t,
                                    first ? on_warning : WarningSink{}));
    first = false;
  }
  return out;
}

/// Long-time rho_LL from |+><+| with mu1 = mu2 = mu on top of a dephasing
/// coherence part: 1/2 - mu (omega_g - lambda) / (lambda^2 + omega_g^2).
inline double steady_state_population(double mu, double lambda,
                                      double omega_g) {
  if (!(lambda > 0.0)) {
    throw NoLimitError("no long-time limit without dephasing (lambda = 0)");
  }
  return 0.5 - mu * (omega_g - lambda) / (lambda * lambda + omega_g * omega_g);
}

inline double steady_state_population(const model::GeneralLinear& m) {
  if (m.b_RL != Complex{} || m.a_LR.real() != m.a_LR.imag()) {
    throw UnsupportedModelError(
        "steady state formula needs b_RL = 0 and Re a_LR = Im a_LR");
  }
  return steady_state_population(m.a_LR.real(), -m.b_LR.real(),
                                 m.b_LR.imag());
}

}  // namespace gravint
