#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gravint/evolve.hpp"
#include "gravint/two_level.hpp"
#include "../support/generators.hpp"

using namespace gravint;

TEST(TwoLevelState, PlusStateIsPure) {
  const auto s = TwoLevelState::plus();
  EXPECT_EQ(s.rho_LL, 0.5);
  EXPECT_EQ(s.rho_RR(), 0.5);
  EXPECT_EQ(s.rho_LR, Complex(0.5, 0.0));
  EXPECT_EQ(s.rho_RL(), Complex(0.5, 0.0));
  EXPECT_TRUE(s.is_physical());
}

TEST(TwoLevelState, PositivityViolationDetected) {
  TwoLevelState s{0.5, Complex{0.6, 0.0}};
  EXPECT_FALSE(s.is_physical());
  EXPECT_GT(s.positivity_violation(), 0.0);
  TwoLevelState t{1.2, Complex{}};
  EXPECT_FALSE(t.is_physical());
}

TEST(Models, TangentsMatchEquations) {
  const TwoLevelState s{0.3, Complex{0.2, -0.1}};
  const Complex i{0, 1};
  auto d = derivative(model::Schrodinger{0.7}, s);
  EXPECT_EQ(d.d_rho_LL, 0.0);
  EXPECT_EQ(d.d_rho_LR, i * 0.7 * s.rho_LR);

  d = derivative(model::TilloyDiosi{0.2, 0.5}, s);
  EXPECT_EQ(d.d_rho_LR, Complex(-0.2, 0.5) * s.rho_LR);

  const model::GeneralLinear g{Complex{0.1, 0.3}, Complex{-0.4, 0.2}, Complex{0.05, -0.02}};
  d = derivative(g, s);
  EXPECT_DOUBLE_EQ(d.d_rho_LL, 2.0 * (0.1 * 0.2 - 0.3 * -0.1));
  const Complex expect = g.b_LR * s.rho_LR + g.b_RL * std::conj(s.rho_LR);
  EXPECT_DOUBLE_EQ(d.d_rho_LR.real(), expect.real());
  EXPECT_DOUBLE_EQ(d.d_rho_LR.imag(), expect.imag());
}

TEST(Models, NegativeDephasingRejected) {
  EXPECT_THROW(make_tilloy_diosi(-0.1, 1.0), ValidationError);
  EXPECT_THROW(evolve(model::TilloyDiosi{-1.0, 0.0}, TwoLevelState{}, 1.0), ValidationError);
}

TEST(Models, DescriptorHasNoCommas) {
  const DynamicsModel models[] = {
      model::Schrodinger{0.22}, model::ClassicalPoisson{0.0},
      model::TilloyDiosi{0.05, 0.22},
      make_population_coupled(0.1, 0.3, 0.05, -0.02)};
  for (const auto& m : models) {
    EXPECT_EQ(describe(m).find(','), std::string::npos) << describe(m);
  }
  EXPECT_EQ(describe(model::TilloyDiosi{0.05, 0.22}), "tilloy-diosi{lambda=0.05;omega_g=0.22}");
}

TEST(Evolve, SchrodingerAndClassicalRotateCoherence) {
  const auto plus = TwoLevelState::plus();
  for (double t : {0.0, 1.0, 10.0, 60.0}) {
    const auto s = evolve(model::Schrodinger{0.22}, plus, t);
    EXPECT_NEAR(s.rho_LR.real(), 0.5 * std::cos(0.22 * t), 1e-9);
    EXPECT_NEAR(s.rho_LR.imag(), 0.5 * std::sin(0.22 * t), 1e-9);
    EXPECT_NEAR(s.rho_LL, 0.5, 1e-12);
    const auto c = evolve(model::ClassicalPoisson{0.0}, plus, t);
    EXPECT_NEAR(std::abs(c.rho_LR - plus.rho_LR), 0.0, 1e-15);
  }
}

TEST(Evolve, TilloyDiosiMatchesClosedFormProperty) {
  proptest::Gen g(99);
  for (int i = 0; i < 40; ++i) {
    const double lam = g.uniform(0, 1), w = g.uniform(-1, 1);
    const TwoLevelState init{g.uniform(0.2, 0.8), std::polar(g.uniform(0, 0.4), g.uniform(-3, 3))};
    std::vector<double> times;
    for (int k = 1; k <= 20; ++k) times.push_back(k * 1.5);
    const auto traj = evolve_trajectory(model::TilloyDiosi{lam, w}, init, times);
    ASSERT_EQ(traj.size(), times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Complex ref = analytic_coherence(model::TilloyDiosi{lam, w}, init, times[k]);
      EXPECT_NEAR(std::abs(traj[k].rho_LR - ref), 0.0, 1e-9);
      EXPECT_NEAR(traj[k].rho_LL, init.rho_LL, 1e-12);
    }
  }
}

TEST(Evolve, TraceAndHermiticityPreservedForGeneralModels) {
  proptest::Gen g(5);
  for (int i = 0; i < 30; ++i) {
    const model::GeneralLinear m{Complex{g.uniform(-0.2, 0.2), g.uniform(-0.2, 0.2)},
                                 Complex{-g.uniform(0.1, 1), g.uniform(-1, 1)},
                                 Complex{g.uniform(-0.05, 0.05), g.uniform(-0.05, 0.05)}};
    const auto s = evolve(m, TwoLevelState::plus(), 5.0);
    // rho_RR is defined as 1 - rho_LL, so check the populations stay real
    // and finite and rho_RL is the conjugate.
    EXPECT_TRUE(std::isfinite(s.rho_LL));
    EXPECT_EQ(s.rho_RL(), std::conj(s.rho_LR));
    EXPECT_DOUBLE_EQ(s.rho_LL + s.rho_RR(), 1.0);
  }
}

TEST(Evolve, ZeroTimeReturnsInitialState) {
  const TwoLevelState init{0.4, Complex{0.1, 0.2}};
  const auto s = evolve(model::TilloyDiosi{0.3, 0.4}, init, 0.0);
  EXPECT_EQ(s.rho_LL, init.rho_LL);
  EXPECT_EQ(s.rho_LR, init.rho_LR);
}

TEST(Evolve, InputErrors) {
  EXPECT_THROW(evolve(model::Schrodinger{1}, TwoLevelState{}, -1.0), InputError);
  EvolveOptions bad;
  bad.tolerance = 0.1;
  EXPECT_THROW(evolve(model::Schrodinger{1}, TwoLevelState{}, 1.0, bad), InputError);
  const double unsorted[] = {2.0, 1.0};
  EXPECT_THROW(evolve_trajectory(model::Schrodinger{1}, TwoLevelState{}, unsorted), InputError);
}

TEST(Evolve, UnphysicalModelWarnsOnce) {
  // Positive real part on the coherence grows it past the positivity bound.
  const model::GeneralLinear m{Complex{}, Complex{0.5, 0.0}, Complex{}};
  int warnings = 0;
  EvolveOptions opt;
  opt.on_warning = [&](const std::string&) { ++warnings; };
  std::vector<double> times = {1.0, 2.0, 3.0, 4.0};
  evolve_trajectory(m, TwoLevelState::plus(), times, opt);
  EXPECT_EQ(warnings, 1);
}

TEST(Evolve, BlowUpIsIntegrationError) {
  const model::GeneralLinear m{Complex{}, Complex{800.0, 0.0}, Complex{}};
  EXPECT_THROW(evolve(m, TwoLevelState::plus(), 2.0), IntegrationError);
}

TEST(AnalyticCoherence, GeneralModelUnsupported) {
  EXPECT_THROW(analytic_coherence(model::GeneralLinear{}, TwoLevelState{}, 1.0),
               UnsupportedModelError);
}
