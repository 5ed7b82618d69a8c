#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <ceres/ceres.h>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"
#include "gravint/signal.hpp"

namespace gravint {

/// s(t) = 1/2 + (c/2) exp(-lambda t) cos(omega t + phi)
struct FringeParameters {
  double lambda = 0.0;
  double omega = 0.0;
  double contrast = 1.0;
  double phase = 0.0;
};

inline double fringe_model(const FringeParameters& p, double t) {
  return 0.5 + 0.5 * p.contrast * std::exp(-p.lambda * t) *
                   std::cos(p.omega * t + p.phase);
}

struct FitOptions {
  std::optional<FringeParameters> initial_guess;
  int max_iterations = 200;
  double min_periods = 2.0;
};

struct FitResult {
  double lambda_hat = 0.0;
  double omega_hat = 0.0;
  double contrast_hat = 0.0;
  double phase_hat = 0.0;
  // (lambda, omega, contrast) block of sigma^2 (J^T J)^-1; the phase is
  // fitted but marginalised out of the reported covariance.
  std::array<std::array<double, 3>, 3> covariance{};
  double residual_norm = 0.0;
  std::size_t samples = 0;
  int iterations = 0;
  bool lambda_at_bound = false;
  FringeParameters seed;

  double standard_error(std::size_t i) const {
    return std::sqrt(std::max(0.0, covariance[i][i]));
  }
};

namespace detail {

inline double centred(const FringeRecord& r, std::size_t i) {
  return r.signal[i] - 0.5;
}

inline double periodogram(const FringeRecord& r, double omega) {
  std::complex<double> acc{};
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    acc += centred(r, i) * std::polar(1.0, -omega * r.times[i]);
  }
  return std::norm(acc);
}

/// Peak of the periodogram up to the mean Nyquist frequency, refined with
/// Brent's method. Empty when the strongest line completes fewer than
/// `min_periods` cycles over the span.
inline std::optional<double> periodogram_peak(const FringeRecord& r,
                                              double min_periods) {
  const double span = r.times.back() - r.times.front();
  const double natural = 2.0 * std::numbers::pi / span;
  const double w_min = min_periods * natural;
  const double mean_dt = span / static_cast<double>(r.times.size() - 1);
  const double w_hi = std::numbers::pi / mean_dt;
  if (!(w_hi > w_min)) return std::nullopt;
  // Start the scan well below the resolvable band so that a slow line is
  // seen as such rather than through a sidelobe; oversample eightfold.
  const double w_lo = 0.25 * natural;
  const double dw = natural / 8.0;
  const auto n = static_cast<std::size_t>(std::ceil((w_hi - w_lo) / dw)) + 1;
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pw = periodogram(r, w_lo + dw * static_cast<double>(k));
    if (pw > best_power) {
      best_power = pw;
      best = k;
    }
  }
  const double centre = w_lo + dw * static_cast<double>(best);
  if (best == 0 || centre < w_min) return std::nullopt;
  const auto [w, neg] = boost::math::tools::brent_find_minima(
      [&](double w) { return -periodogram(r, w); }, centre - dw,
      std::min(w_hi, centre + dw), 40);
  (void)neg;
  return w;
}

/// Linear least squares for y ~ exp(-lambda t)(a cos wt + b sin wt) at fixed
/// (lambda, omega); returns (a, b, rss).
inline std::array<double, 3> project_fringe(const FringeRecord& r,
                                            double lambda, double omega,
                                            std::size_t begin,
                                            std::size_t end) {
  double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0, yy = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double e = std::exp(-lambda * r.times[i]);
    const double c = e * std::cos(omega * r.times[i]);
    const double s = e * std::sin(omega * r.times[i]);
    const double y = centred(r, i);
    cc += c * c;
    ss += s * s;
    cs += c * s;
    yc += y * c;
    ys += y * s;
    yy += y * y;
  }
  const double det = cc * ss - cs * cs;
  if (!(std::abs(det) > 1e-300)) return {0.0, 0.0, yy};
  const double a = (yc * ss - ys * cs) / det;
  const double b = (ys * cc - yc * cs) / det;
  return {a, b, yy - a * yc - b * ys};
}

/// Damping seed from a straight-line fit of the log of per-period fringe
/// amplitudes against window centre.
inline double log_envelope_rate(const FringeRecord& r, double omega) {
  const double period = 2.0 * std::numbers::pi / omega;
  std::vector<double> xs, ys;
  std::size_t begin = 0;
  while (begin < r.times.size()) {
    std::size_t end = begin;
    while (end < r.times.size() && r.times[end] < r.times[begin] + period) ++end;
    if (end - begin >= 4 && r.times[end - 1] - r.times[begin] > 0.5 * period) {
      const auto [a, b, rss] = project_fringe(r, 0.0, omega, begin, end);
      (void)rss;
      const double amp = std::hypot(a, b);
      if (amp > 0.0) {
        xs.push_back(0.5 * (r.times[begin] + r.times[end - 1]));
        ys.push_back(std::log(amp));
      }
    }
    begin = end;
  }
  if (xs.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? std::max(0.0, -sxy / sxx) : 0.0;
}

/// Scan lambda around the envelope estimate with the linear parameters
/// projected out and keep the best.
inline FringeParameters seed_parameters(const FringeRecord& r, double omega,
                                        double lambda0) {
  const double span = r.times.back() - r.times.front();
  std::vector<double> grid = {0.0, lambda0};
  const double scale = std::max(lambda0, 1.0 / span);
  for (int k = -20; k <= 20; ++k) grid.push_back(scale * std::pow(10.0, k / 10.0));
  FringeParameters best{0.0, omega, 0.0, 0.0};
  double best_rss = std::numeric_limits<double>::infinity();
  for (double lam : grid) {
    const auto [a, b, rss] = project_fringe(r, lam, omega, 0, r.times.size());
    if (rss < best_rss) {
      best_rss = rss;
      // (c/2) cos(wt + phi) = a cos wt + b sin wt
      best = {lam, omega, 2.0 * std::hypot(a, b), std::atan2(-b, a)};
    }
  }
  return best;
}

struct FringeResidual {
  double t;
  double y;

  template <class T>
  bool operator()(const T* const p, T* residual) const {
    using std::cos;
    using std::exp;
    residual[0] = T(0.5) + T(0.5) * p[2] * exp(-p[0] * t) * cos(p[1] * t + p[3]) -
                  T(y);
    return true;
  }
};

}  // namespace detail

/// Bounded least-squares fit of the damped fringe, seeded by the periodogram
/// peak, a log-envelope regression and a projected lambda scan.
inline FitResult fit_damped_fringe(const FringeRecord& record,
                                   const FitOptions& opt = {}) {
  validate(record);
  const std::size_t n = record.times.size();
  if (n < 8) {
    throw FitError(FitError::Kind::kInsufficientSpan,
                   "need at least 8 samples to fit a fringe");
  }
  double lo = record.signal.front(), hi = lo;
  for (double v : record.signal) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) {
    throw FitError(FitError::Kind::kInsufficientSpan,
                   "signal is constant; there is no fringe to fit");
  }
  const double span = record.times.back() - record.times.front();

  FringeParameters seed;
  if (opt.initial_guess) {
    seed = *opt.initial_guess;
    if (!(seed.omega > 0.0) ||
        span < opt.min_periods * 2.0 * std::numbers::pi / seed.omega) {
      throw FitError(FitError::Kind::kInsufficientSpan,
                     "record spans fewer than " +
                         detail::format_double(opt.min_periods) +
                         " periods of the initial guess");
    }
  } else {
    const auto peak = detail::periodogram_peak(record, opt.min_periods);
    if (!peak) {
      throw FitError(FitError::Kind::kInsufficientSpan,
                     "no fringe with at least " +
                         detail::format_double(opt.min_periods) +
                         " periods inside the record span");
    }
    seed = detail::seed_parameters(record, *peak,
                                   detail::log_envelope_rate(record, *peak));
  }

  double p[4] = {seed.lambda, seed.omega, seed.contrast, seed.phase};
  ceres::Problem problem;
  for (std::size_t i = 0; i < n; ++i) {
    problem.AddResidualBlock(
        new ceres::AutoDiffCostFunction<detail::FringeResidual, 1, 4>(
            new detail::FringeResidual{record.times[i], record.signal[i]}),
        nullptr, p);
  }
  for (int k = 0; k < 3; ++k) problem.SetParameterLowerBound(p, k, 0.0);

  ceres::Solver::Options so;
  so.linear_solver_type = ceres::DENSE_QR;
  so.max_num_iterations = opt.max_iterations;
  so.function_tolerance = 1e-15;
  so.gradient_tolerance = 1e-15;
  so.parameter_tolerance = 1e-14;
  so.logging_type = ceres::SILENT;
  so.minimizer_progress_to_stdout = false;
  so.num_threads = 1;
  ceres::Solver::Summary summary;
  ceres::Solve(so, &problem, &summary);
  if (summary.termination_type != ceres::CONVERGENCE ||
      !std::isfinite(summary.final_cost)) {
    throw FitError(FitError::Kind::kNonConvergence,
                   "fit did not converge after " +
                       std::to_string(summary.iterations.size()) +
                       " iterations: " + summary.message);
  }

  if (!(p[1] > 0.0) || span < opt.min_periods * 2.0 * std::numbers::pi / p[1]) {
    throw FitError(FitError::Kind::kInsufficientSpan,
                   "fitted fringe completes fewer than " +
                       detail::format_double(opt.min_periods) +
                       " periods over the record");
  }

  FitResult res;
  res.seed = seed;
  res.lambda_hat = p[0];
  res.omega_hat = p[1];
  res.contrast_hat = p[2];
  res.phase_hat = std::remainder(p[3], 2.0 * std::numbers::pi);
  res.samples = n;
  res.iterations = static_cast<int>(summary.iterations.size());
  res.lambda_at_bound = p[0] == 0.0;

  // Gauss-Newton covariance sigma^2 (J^T J)^-1 with the analytic Jacobian.
  Eigen::MatrixXd jac(n, 4);
  double rss = 0.0;
  const FringeParameters fp{p[0], p[1], p[2], p[3]};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = record.times[i];
    const double e = std::exp(-fp.lambda * t);
    const double arg = fp.omega * t + fp.phase;
    const double c = std::cos(arg), s = std::sin(arg);
    const double half = 0.5 * fp.contrast * e;
    jac(i, 0) = -t * half * c;
    jac(i, 1) = -t * half * s;
    jac(i, 2) = 0.5 * e * c;
    jac(i, 3) = -half * s;
    const double r = fringe_model(fp, t) - record.signal[i];
    rss += r * r;
  }
  res.residual_norm = std::sqrt(rss);
  const double dof = static_cast<double>(n) - 4.0;
  const double sigma2 = rss / dof;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  // Pseudo-inverse through the symmetric eigendecomposition keeps the result
  // positive semidefinite even when J^T J is nearly singular.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
  const auto& vals = eig.eigenvalues();
  const double cutoff = vals.maxCoeff() * 1e-14;
  Eigen::VectorXd inv(4);
  for (int k = 0; k < 4; ++k) inv(k) = vals(k) > cutoff ? 1.0 / vals(k) : 0.0;
  const Eigen::MatrixXd cov =
      sigma2 * eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) res.covariance[a][b] = 0.5 * (cov(a, b) + cov(b, a));
  return res;
}

inline std::string format_fit(const FitResult& r) {
  using detail::format_double;
  static const char* const kNames[] = {"lambda", "omega", "contrast"};
  std::string s;
  auto put = [&s](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  put("lambda_hat_per_s", format_double(r.lambda_hat));
  put("omega_hat_rad_s", format_double(r.omega_hat));
  put("contrast_hat", format_double(r.contrast_hat));
  put("phase_hat_rad", format_double(r.phase_hat));
  for (std::size_t i = 0; i < 3; ++i) {
    put(std::string(kNames[i]) + "_stderr", format_double(r.standard_error(i)));
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      put(std::string("covariance_") + kNames[a] + "_" + kNames[b],
          format_double(r.covariance[a][b]));
  put("residual_norm", format_double(r.residual_norm));
  put("samples", std::to_string(r.samples));
  put("iterations", std::to_string(r.iterations));
  put("lambda_at_lower_bound", r.lambda_at_bound ? "true" : "false");
  put("seed_lambda", format_double(r.seed.lambda));
  put("seed_omega", format_double(r.seed.omega));
  return s;
}

}  // namespace gravint
