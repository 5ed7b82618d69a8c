#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "gravint/phasespace/oracle.hpp"

using namespace gravint;
using namespace gravint::phasespace;

namespace {

// Odd sizes put q = 0 on a grid row, so the coherence needs no
// interpolation and a coarse grid is enough.
OracleConfig small(OracleConfig c) {
  c.n_q = 257;
  c.n_p = 257;
  c.steps = 32;
  return c;
}

}  // namespace

TEST(OracleConfig, DefaultsAndOverrides) {
  const auto c = load_oracle_config("potential = quadratic\ncurvature = 3\nslope = 0.5\nsteps = 10\n");
  ASSERT_TRUE(std::holds_alternative<QuadraticPotential>(c.potential));
  EXPECT_EQ(std::get<QuadraticPotential>(c.potential).slope, 0.5);
  EXPECT_EQ(c.steps, 10u);
  EXPECT_EQ(c.n_q, 512u);
  const auto d = load_oracle_config("");
  const auto& v = std::get<TwoBallPotential>(d.potential);
  EXPECT_DOUBLE_EQ(v.coupling_left / (v.dist_left * v.dist_left),
                   v.coupling_right / (v.dist_right * v.dist_right));
}

TEST(OracleConfig, Rejections) {
  EXPECT_THROW(load_oracle_config("grid = 5\n"), ParseError);
  EXPECT_THROW(load_oracle_config("potential = cubic\n"), ParseError);
  EXPECT_THROW(load_oracle_config("steps = 2.5\n"), ParseError);
  EXPECT_THROW(load_oracle_config("mask_kinetic = maybe\n"), ParseError);
  EXPECT_THROW(load_oracle_config("packet_width = -1\n"), ValidationError);
}

TEST(TwoStateFrequencies, QuadraticOracle) {
  // V = a q^2 + b q: V(dx/2) - V(-dx/2) = b dx and dx V'(0) = b dx.
  const auto f = two_state_frequencies(QuadraticPotential{3.0, 0.5, 0.0}, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(f.omega_quantum, 2.0);
  EXPECT_DOUBLE_EQ(f.omega_classical, 2.0);
}

TEST(PhaseTrack, UnwrapsAndFitsSlope) {
  std::vector<double> t;
  std::vector<std::complex<double>> c;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.2 * i);
    c.push_back(std::polar(0.5, 1.7 * 0.2 * i + 0.3));
  }
  const auto track = fit_phase_track(t, c);
  EXPECT_NEAR(track.omega, 1.7, 1e-12);
  EXPECT_NEAR(track.phases.back() - track.phases.front(), 1.7 * 9.8, 1e-12);
}

TEST(RunOracle, QuadraticPotentialCollapses) {
  auto c = small(OracleConfig{});
  c.potential = QuadraticPotential{3.0, 0.5, 0.0};
  const auto r = run_oracle(c);
  EXPECT_LE(r.max_phase_gap, 1e-10);
  EXPECT_TRUE(r.quadratic_collapse);
  EXPECT_NEAR(r.moyal.omega, 0.5, 0.01);
  EXPECT_TRUE(r.passed());
}

TEST(RunOracle, NulledTwoBallSeparatesMoyalFromPoisson) {
  const auto r = run_oracle(small(OracleConfig{}));
  EXPECT_LT(std::abs(r.two_state.omega_classical), 1e-12);
  EXPECT_NEAR(r.moyal.omega, r.two_state.omega_quantum, 0.05 * r.two_state.omega_quantum);
  EXPECT_LT(std::abs(r.poisson.omega), r.resolution_floor);
  EXPECT_TRUE(r.moyal_matches_quantum);
  EXPECT_TRUE(r.poisson_matches_classical);
  EXPECT_LT(r.normalisation_drift, 1e-8);
  EXPECT_TRUE(r.midpoint_on_grid);
}

TEST(RunOracle, UnderResolvedShearIsReported) {
  auto c = small(OracleConfig{});
  c.n_q = 256;
  c.mask_kinetic = true;
  const auto r = run_oracle(c);
  EXPECT_FALSE(r.midpoint_on_grid);
  EXPECT_LT(r.q_samples_per_fringe, 2.0);
  EXPECT_FALSE(r.passed());
}

TEST(RunOracle, ReportSchema) {
  auto c = small(OracleConfig{});
  c.steps = 8;
  c.duration = 1.0;
  const auto text = format_report(run_oracle(c), c);
  for (const char* key : {"omega_moyal_oracle", "omega_poisson_oracle", "resolution_floor",
                          "truncation_tail_estimate", "moyal_term_norm_3", "overall"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(RunOracle, SingularGeometryIsGridError) {
  auto c = small(OracleConfig{});
  c.potential = TwoBallPotential{100.0, 200.0, 0.57, 0.81};
  EXPECT_THROW(run_oracle(c), GridError);
}

TEST(RunOracle, ShippedConfigsParse) {
  const char* dir = std::getenv("GRAVINT_CONFIGS");
  if (!dir) dir = GRAVINT_CONFIGS_DIR;
  for (const char* name : {"scaled_two_ball.cfg", "scaled_quadratic.cfg"}) {
    EXPECT_NO_THROW(load_oracle_config(read_text_file(std::string(dir) + "/" + name))) << name;
  }
}
