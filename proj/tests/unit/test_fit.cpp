#include <gtest/gtest.h>

#include <cmath>

#include "gravint/fit.hpp"
#include "../support/generators.hpp"

using namespace gravint;

TEST(Fit, NoiselessTilloyDiosiRecovered) {
  const auto r = synthesize_record(model::TilloyDiosi{0.05, 0.22}, uniform_times(120, 600), 0, 1);
  const auto f = fit_damped_fringe(r);
  EXPECT_NEAR(f.lambda_hat, 0.05, 1e-6 * 0.05);
  EXPECT_NEAR(f.omega_hat, 0.22, 1e-6 * 0.22);
  EXPECT_NEAR(f.contrast_hat, 1.0, 1e-6);
  EXPECT_NEAR(f.phase_hat, 0.0, 1e-6);
}

TEST(Fit, NoiselessSchrodingerIsUndamped) {
  const auto r = synthesize_record(model::Schrodinger{0.22}, uniform_times(60, 300), 0, 1);
  const auto f = fit_damped_fringe(r);
  EXPECT_LT(f.lambda_hat, 1e-8);
  EXPECT_NEAR(f.omega_hat, 0.22, 1e-8);
}

TEST(Fit, FixedPointOnOwnSynthesisProperty) {
  proptest::Gen g(21);
  for (int i = 0; i < 25; ++i) {
    const FringeParameters p{g.uniform(0.0, 0.05), g.uniform(0.3, 2.0), g.uniform(0.3, 1.0),
                             g.uniform(-3.0, 3.0)};
    FringeRecord r;
    r.times = uniform_times(60, 400);
    for (double t : r.times) r.signal.push_back(fringe_model(p, t));
    const auto f = fit_damped_fringe(r);
    EXPECT_NEAR(f.omega_hat, p.omega, 1e-7 * p.omega);
    EXPECT_NEAR(f.lambda_hat, p.lambda, 1e-7);
    EXPECT_NEAR(f.contrast_hat, p.contrast, 1e-7);
    EXPECT_NEAR(std::remainder(f.phase_hat - p.phase, 2 * std::numbers::pi), 0.0, 1e-6);
  }
}

TEST(Fit, CovarianceIsSymmetricPositiveSemidefinite) {
  const auto r = synthesize_record(model::TilloyDiosi{0.05, 0.22}, uniform_times(100, 200), 0.01, 3);
  const auto f = fit_damped_fringe(r);
  Eigen::Matrix3d c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) c(a, b) = f.covariance[a][b];
  EXPECT_LT((c - c.transpose()).norm(), 1e-18);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(c).eigenvalues().minCoeff(), -1e-18);
  EXPECT_GT(f.standard_error(1), 0.0);
}

TEST(Fit, CoverageOfStandardErrors) {
  // Same shape as the estimation-closure criterion, smaller seed block.
  const auto times = uniform_times(100, 200);
  int covered = 0;
  for (int s = 0; s < 20; ++s) {
    const auto r = synthesize_record(model::TilloyDiosi{0.05, 0.22}, times, 0.01,
                                     split_stream(7, s)());
    const auto f = fit_damped_fringe(r);
    covered += std::abs(f.omega_hat - 0.22) <= 3 * f.standard_error(1);
  }
  EXPECT_GE(covered, 17);
}

TEST(Fit, ConstantSignalRejected) {
  FringeRecord r;
  r.times = uniform_times(100, 100);
  r.signal.assign(100, 0.75);
  try {
    fit_damped_fringe(r);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kInsufficientSpan);
  }
}

TEST(Fit, InsufficientSpanRejected) {
  // One period in the record.
  const auto r = synthesize_record(model::Schrodinger{0.22}, uniform_times(2 * std::numbers::pi / 0.22, 100), 0, 1);
  EXPECT_THROW(fit_damped_fringe(r), FitError);
  FitOptions opt;
  opt.initial_guess = FringeParameters{0.0, 0.05, 1.0, 0.0};
  const auto longer = synthesize_record(model::Schrodinger{0.22}, uniform_times(60, 200), 0, 1);
  try {
    fit_damped_fringe(longer, opt);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kInsufficientSpan);
  }
}

TEST(Fit, IterationCapIsNonConvergence) {
  const auto r = synthesize_record(model::TilloyDiosi{0.05, 0.22}, uniform_times(120, 600), 0.02, 1);
  FitOptions opt;
  opt.max_iterations = 1;
  opt.initial_guess = FringeParameters{0.5, 0.25, 0.3, 1.0};
  try {
    fit_damped_fringe(r, opt);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kNonConvergence);
  }
}

TEST(Fit, ReportHasCovarianceBlock) {
  const auto r = synthesize_record(model::TilloyDiosi{0.05, 0.22}, uniform_times(120, 300), 0, 1);
  const auto text = format_fit(fit_damped_fringe(r));
  for (const char* key : {"lambda_hat_per_s", "omega_hat_rad_s", "contrast_hat",
                          "covariance_lambda_omega", "covariance_contrast_contrast",
                          "residual_norm", "lambda_at_lower_bound"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}
