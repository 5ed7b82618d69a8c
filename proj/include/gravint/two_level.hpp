#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <variant>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"

namespace gravint {

using Complex = std::complex<double>;

/// Reduced density matrix over the arm states {|L>, |R>}. Only <L|rho|L> and
/// <L|rho|R> are stored; <R|rho|R> = 1 - rho_LL and <R|rho|L> = conj(rho_LR)
/// so trace and hermiticity hold by construction.
struct TwoLevelState {
  double rho_LL = 0.5;
  Complex rho_LR{0.5, 0.0};

  double rho_RR() const { return 1.0 - rho_LL; }
  Complex rho_RL() const { return std::conj(rho_LR); }

  /// Amount by which the state violates 0 <= rho_LL <= 1 and
  /// |rho_LR|^2 <= rho_LL (1 - rho_LL); zero for physical states.
  double positivity_violation() const {
    double v = 0.0;
    v = std::max(v, -rho_LL);
    v = std::max(v, rho_LL - 1.0);
    v = std::max(v, std::norm(rho_LR) - rho_LL * (1.0 - rho_LL));
    return v;
  }

  bool is_physical(double slack = 0.0) const {
    return positivity_violation() <= slack;
  }

  /// (|L> + |R>)/sqrt(2) projector.
  static TwoLevelState plus() { return {0.5, Complex{0.5, 0.0}}; }

  friend bool operator==(const TwoLevelState&, const TwoLevelState&) = default;
};

/// Time derivative of a TwoLevelState; not itself a state.
struct TwoLevelTangent {
  double d_rho_LL = 0.0;
  Complex d_rho_LR{};
};

namespace model {

struct Schrodinger {
  double omega_q = 0.0;  // rad/s
};

struct ClassicalPoisson {
  double omega_c = 0.0;  // rad/s
};

/// Dephasing at rate lambda plus a modified phase frequency omega_g.
struct TilloyDiosi {
  double lambda = 0.0;   // 1/s, >= 0
  double omega_g = 0.0;  // rad/s
};

/// Linear deviation term consistent with classical paths. The population
/// coupling a_RL is fixed by hermiticity to conj(a_LR) and the diagonal
/// coefficients vanish, so only these three are free:
///   d/dt rho_LL = 2 (Re a_LR Re rho_LR - Im a_LR Im rho_LR)
///   d/dt rho_LR = b_LR rho_LR + b_RL conj(rho_LR)
struct GeneralLinear {
  Complex a_LR{};
  Complex b_LR{};
  Complex b_RL{};
};

}  // namespace model

using DynamicsModel = std::variant<model::Schrodinger, model::ClassicalPoisson,
                                   model::TilloyDiosi, model::GeneralLinear>;

inline model::TilloyDiosi make_tilloy_diosi(double lambda, double omega_g) {
  if (!(lambda >= 0.0)) {
    throw ValidationError("Tilloy-Diosi dephasing rate lambda must be >= 0");
  }
  return {lambda, omega_g};
}

/// The population couplings mu1 = Re a_LR, mu2 = Im a_LR on top of a
/// dephasing coherence part b_LR = -lambda + i omega_g.
inline model::GeneralLinear make_population_coupled(double lambda,
                                                    double omega_g, double mu1,
                                                    double mu2) {
  make_tilloy_diosi(lambda, omega_g);
  return {Complex{mu1, mu2}, Complex{-lambda, omega_g}, Complex{}};
}

inline void validate(const DynamicsModel& m) {
  if (const auto* td = std::get_if<model::TilloyDiosi>(&m)) {
    make_tilloy_diosi(td->lambda, td->omega_g);
  }
}

inline TwoLevelTangent derivative(const DynamicsModel& m,
                                  const TwoLevelState& s) {
  return std::visit(
      [&s](const auto& mm) -> TwoLevelTangent {
        using T = std::decay_t<decltype(mm)>;
        const Complex i{0.0, 1.0};
        if constexpr (std::is_same_v<T, model::Schrodinger>) {
          return {0.0, i * mm.omega_q * s.rho_LR};
        } else if constexpr (std::is_same_v<T, model::ClassicalPoisson>) {
          return {0.0, i * mm.omega_c * s.rho_LR};
        } else if constexpr (std::is_same_v<T, model::TilloyDiosi>) {
          return {0.0, Complex{-mm.lambda, mm.omega_g} * s.rho_LR};
        } else {
          const double dll = 2.0 * (mm.a_LR.real() * s.rho_LR.real() -
                                    mm.a_LR.imag() * s.rho_LR.imag());
          return {dll, mm.b_LR * s.rho_LR + mm.b_RL * std::conj(s.rho_LR)};
        }
      },
      m);
}

/// Compact descriptor used in record headers and manifests. Contains no
/// commas so it can sit inside a comma-separated header line.
inline std::string describe(const DynamicsModel& m) {
  using detail::format_double;
  auto cplx = [](Complex z) {
    return format_double(z.real()) + (std::signbit(z.imag()) ? "" : "+") +
           format_double(z.imag()) + "i";
  };
  return std::visit(
      [&](const auto& mm) -> std::string {
        using T = std::decay_t<decltype(mm)>;
        if constexpr (std::is_same_v<T, model::Schrodinger>) {
          return "schrodinger{omega_q=" + format_double(mm.omega_q) + "}";
        } else if constexpr (std::is_same_v<T, model::ClassicalPoisson>) {
          return "classical{omega_c=" + format_double(mm.omega_c) + "}";
        } else if constexpr (std::is_same_v<T, model::TilloyDiosi>) {
          return "tilloy-diosi{lambda=" + format_double(mm.lambda) +
                 ";omega_g=" + format_double(mm.omega_g) + "}";
        } else {
          return "general{a_lr=" + cplx(mm.a_LR) + ";b_lr=" + cplx(mm.b_LR) +
                 ";b_rl=" + cplx(mm.b_RL) + "}";
        }
      },
      m);
}

}  // namespace gravint
