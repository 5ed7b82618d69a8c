#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gravint/config.hpp"
#include "gravint/signal.hpp"

namespace fs = std::filesystem;

namespace {

// Environment overrides the paths baked in at build time.
std::string env(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    binary_ = env("GRAVINT_CLI", GRAVINT_CLI_PATH);
    configs_ = env("GRAVINT_CONFIGS", GRAVINT_CONFIGS_DIR);
    std::random_device rd;
    dir_ = fs::temp_directory_path() /
           ("gravint_cli_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!dir_.empty()) fs::remove_all(dir_);
  }

  int run(const std::string& args) const {
    const std::string cmd = "'" + binary_ + "' " + args + " > '" +
                            (dir_ / "stdout.txt").string() + "' 2> '" +
                            (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string config(const std::string& name) const {
    return "'" + (fs::path(configs_) / name).string() + "'";
  }
  std::string out(const std::string& sub) const {
    return "'" + (dir_ / sub).string() + "'";
  }
  std::string file(const std::string& sub) const {
    return (dir_ / sub).string();
  }

  gravint::KeyValueMap key_values(const std::string& sub) const {
    return gravint::parse_key_values(gravint::read_text_file(file(sub)));
  }

  double number(const gravint::KeyValueMap& kv, const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      ADD_FAILURE() << "missing key " << key;
      return std::nan("");
    }
    return gravint::detail::parse_double(it->second, key);
  }

  std::string binary_, configs_;
  fs::path dir_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  const auto text = gravint::read_text_file(path);
  for (auto line : gravint::detail::split(text, '\n')) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto c : gravint::detail::split(line, ',')) cells.emplace_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

TEST_F(Cli, FrequenciesForCaesiumGeometry) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("f") + " frequencies"), 0);
  const auto kv = key_values("f/frequencies.txt");
  EXPECT_NEAR(number(kv, "omega_quantum_rad_s"), 0.22, 0.03 * 0.22);
  EXPECT_LT(std::abs(number(kv, "omega_classical_rad_s")),
            1e-12 * number(kv, "omega_quantum_rad_s"));
  EXPECT_NEAR(number(kv, "radius_left_m"), 6.3e-3, 1e-4);
  EXPECT_NEAR(number(kv, "radius_right_m"), 7.9e-3, 1e-4);
  EXPECT_TRUE(kv.contains("placement_rounded_omega_quantum_rad_s"));
}

TEST_F(Cli, SymmetricGeometryHasNoPhase) {
  ASSERT_EQ(run("--config " + config("symmetric.cfg") + " --out " + out("f") + " frequencies"),
            0);
  const auto kv = key_values("f/frequencies.txt");
  EXPECT_NEAR(number(kv, "omega_classical_rad_s"), 0.0, 1e-15);
  EXPECT_NEAR(number(kv, "omega_quantum_rad_s"), 0.0, 1e-15);
}

TEST_F(Cli, MissingConfigIsInputError) {
  EXPECT_EQ(run("--config /definitely/not/here.cfg --out " + out("f") + " frequencies"), 2);
  EXPECT_EQ(run("--out " + out("f") + " frequencies"), 2);
  EXPECT_EQ(run("--out " + out("f") + " no-such-command"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, SchrodingerRecordCoversAboutTwoPeriods) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("s") +
                " simulate --model schrodinger --duration 60 --samples 601"),
            0);
  const auto r = gravint::read_record_file(file("s/fringe.csv"));
  ASSERT_EQ(r.times.size(), 601u);
  EXPECT_DOUBLE_EQ(r.times.back(), 60.0);
  EXPECT_FALSE(r.population.has_value());
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < r.signal.size(); ++i) {
    if (r.signal[i] > r.signal[i - 1] && r.signal[i] > r.signal[i + 1]) ++maxima;
  }
  // omega_Q * 60 / 2pi = 2.1 periods: the t = 0 maximum plus two interior ones
  EXPECT_EQ(maxima, 2);
  EXPECT_NEAR(r.signal.front(), 1.0, 1e-12);
}

TEST_F(Cli, TilloyDiosiWithoutDephasingMatchesSchrodinger) {
  ASSERT_EQ(run("--out " + out("a") +
                " simulate --model schrodinger --omega-q 0.3 --duration 40 --samples 150"),
            0);
  ASSERT_EQ(run("--out " + out("b") +
                " simulate --model tilloy-diosi --lambda 0 --omega-g 0.3 --duration 40 "
                "--samples 150"),
            0);
  const auto a = read_csv(file("a/fringe.csv"));
  const auto b = read_csv(file("b/fringe.csv"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 2; i < a.size(); ++i) {
    EXPECT_EQ(a[i][1], b[i][1]) << "row " << i;
  }
}

TEST_F(Cli, GeneralModelWritesPopulation) {
  ASSERT_EQ(run("--out " + out("g") +
                " simulate --model general --a-lr 0.02,0.01 --b-lr=-0.1,0.3 --b-rl 0.01,0"
                " --duration 50 --samples 100"),
            0);
  const auto r = gravint::read_record_file(file("g/fringe.csv"));
  ASSERT_TRUE(r.population.has_value());
  EXPECT_NEAR(r.population->front(), 0.5, 1e-12);
  EXPECT_GT(std::abs(gravint::population_shift(r)), 1e-4);
}

TEST_F(Cli, SimulateRejectsConflictingOrIncompleteFlags) {
  EXPECT_EQ(run("--out " + out("x") +
                " simulate --model schrodinger --omega-q 1 --lambda 0.1 --duration 5"),
            2);
  EXPECT_EQ(run("--out " + out("x") + " simulate --model tilloy-diosi --lambda 0.1 --duration 5"),
            2);
  EXPECT_EQ(run("--out " + out("x") + " simulate --model schrodinger --omega-q 1"), 2);
  EXPECT_EQ(run("--out " + out("x") + " simulate --model bogus --duration 5"), 2);
  EXPECT_EQ(run("--out " + out("x") +
                " simulate --model tilloy-diosi --lambda=-1 --omega-g 1 --duration 5"),
            2);
  EXPECT_EQ(run("--out " + out("x") +
                " simulate --model general --a-lr 1 --b-lr 0,0 --b-rl 0,0 --duration 5"),
            2);
}

TEST_F(Cli, SweepOfD2CrossesClassicalNullOnce) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("w") +
                " sweep --parameter d2 --from 0.06 --to 0.12 --steps 41"),
            0);
  const auto rows = read_csv(file("w/sweep.csv"));
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"value", "omega_C_rad_s", "omega_Q_rad_s",
                                               "status"}));
  const auto cfg = gravint::load_config_file(fs::path(configs_) / "caesium.cfg");
  const double null_d2 = cfg.dist_left * std::sqrt(cfg.mass_right / cfg.mass_left);
  int flips = 0;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i][3], "ok");
    const double prev = std::stod(rows[i - 1][1]);
    const double cur = std::stod(rows[i][1]);
    if ((prev < 0) != (cur < 0)) {
      ++flips;
      EXPECT_LE(std::stod(rows[i - 1][0]), null_d2);
      EXPECT_GE(std::stod(rows[i][0]), null_d2);
    }
  }
  EXPECT_EQ(flips, 1);
}

TEST_F(Cli, SweepOfSeparationGrowsPhasePerLength) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("w") +
                " sweep --parameter dx --from 0.01 --to 0.1 --steps 10"),
            0);
  const auto rows = read_csv(file("w/sweep.csv"));
  ASSERT_EQ(rows.size(), 11u);
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = std::stod(rows[i][2]) / std::stod(rows[i][0]);
    EXPECT_GT(ratio, prev);
    prev = ratio;
  }
}

TEST_F(Cli, SweepKeepsInfeasibleRows) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("w") +
                " sweep --parameter d1 --from 0.01 --to 0.1 --steps 4"),
            0);
  const auto rows = read_csv(file("w/sweep.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_TRUE(rows[1][3].starts_with("infeasible"));
  EXPECT_TRUE(rows[1][1].empty());
  EXPECT_EQ(rows[4][3], "ok");
}

TEST_F(Cli, SweepRejectsZeroSteps) {
  EXPECT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("w") +
                " sweep --parameter d2 --from 0.06 --to 0.12 --steps 0"),
            2);
  EXPECT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("w") +
                " sweep --parameter rho --from 0.06 --to 0.12 --steps 3"),
            2);
}

TEST_F(Cli, SimulateThenFitRecoversParameters) {
  ASSERT_EQ(run("--out " + out("s") +
                " simulate --model tilloy-diosi --lambda 0.02 --omega-g 0.25 --duration 100"
                " --samples 200"),
            0);
  ASSERT_EQ(run("--out " + out("fit") + " fit " + out("s/fringe.csv")), 0);
  const auto kv = key_values("fit/fit.txt");
  EXPECT_NEAR(number(kv, "lambda_hat_per_s"), 0.02, 1e-6);
  EXPECT_NEAR(number(kv, "omega_hat_rad_s"), 0.25, 1e-6);
  for (const char* k : {"covariance_lambda_lambda", "covariance_lambda_omega",
                        "covariance_omega_contrast", "covariance_contrast_contrast",
                        "lambda_stderr", "omega_stderr", "residual_norm"}) {
    EXPECT_TRUE(kv.contains(k)) << k;
  }
}

TEST_F(Cli, FitOfConstantRecordFails) {
  std::string text = "# model=flat,seed=0,noise_sd=0\nt_s,signal\n";
  for (int i = 0; i < 50; ++i) text += std::to_string(i) + ",0.5\n";
  gravint::write_text_file(file("flat.csv"), text);
  EXPECT_EQ(run("--out " + out("fit") + " fit " + out("flat.csv")), 3);
  const auto manifest = nlohmann::json::parse(gravint::read_text_file(file("fit/manifest.json")));
  EXPECT_EQ(manifest["status"], "failed");
  EXPECT_EQ(run("--out " + out("fit") + " fit " + out("missing.csv")), 2);
}

TEST_F(Cli, ManifestListsOutputs) {
  ASSERT_EQ(run("--config " + config("caesium.cfg") + " --out " + out("m") + " --seed 42"
                " simulate --model classical --noise-sd 0.01"),
            0);
  const auto m = nlohmann::json::parse(gravint::read_text_file(file("m/manifest.json")));
  EXPECT_EQ(m["subcommand"], "simulate");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["status"], "ok");
  EXPECT_DOUBLE_EQ(m["tolerance"].get<double>(), 1e-10);
  EXPECT_TRUE(m.contains("tool_version"));
  EXPECT_TRUE(m.contains("timestamp"));
  EXPECT_DOUBLE_EQ(m["resolved"]["duration_s"].get<double>(), 20.0);
  ASSERT_EQ(m["outputs"].size(), 1u);
  EXPECT_EQ(m["outputs"][0], "fringe.csv");
  EXPECT_TRUE(fs::exists(file("m/fringe.csv")));
}

TEST_F(Cli, NoisyRunsAreDeterministicPerSeed) {
  const std::string args =
      " simulate --model tilloy-diosi --lambda 0.01 --omega-g 0.2 --duration 30 --noise-sd 0.05";
  ASSERT_EQ(run("--seed 7 --out " + out("a") + args), 0);
  ASSERT_EQ(run("--seed 7 --out " + out("b") + args), 0);
  ASSERT_EQ(run("--seed 8 --out " + out("c") + args), 0);
  const auto a = gravint::read_text_file(file("a/fringe.csv"));
  EXPECT_EQ(a, gravint::read_text_file(file("b/fringe.csv")));
  EXPECT_NE(a, gravint::read_text_file(file("c/fringe.csv")));
}

TEST_F(Cli, IntegrateMethodAgreesWithClosedForm) {
  const std::string args =
      " simulate --model tilloy-diosi --lambda 0.05 --omega-g 0.4 --duration 30 --samples 61";
  ASSERT_EQ(run("--out " + out("a") + args), 0);
  ASSERT_EQ(run("--tolerance 1e-12 --out " + out("b") + args + " --method integrate"), 0);
  const auto a = gravint::read_record_file(file("a/fringe.csv"));
  const auto b = gravint::read_record_file(file("b/fringe.csv"));
  for (std::size_t i = 0; i < a.signal.size(); ++i) {
    EXPECT_NEAR(a.signal[i], b.signal[i], 1e-9);
  }
}

TEST_F(Cli, UnderResolvedOracleExitsThree) {
  ASSERT_EQ(run("--config " + config("scaled_two_ball.cfg") + " --out " + out("o") +
                " validate-oracle --grid-q 128 --grid-p 128 --steps 16"),
            3);
  const auto kv = key_values("o/oracle_report.txt");
  EXPECT_EQ(kv.at("overall"), "fail");
}

TEST_F(Cli, QuadraticOracleWritesSnapshots) {
  ASSERT_EQ(run("--config " + config("scaled_quadratic.cfg") + " --out " + out("o") +
                " validate-oracle --grid-q 129 --grid-p 128 --steps 16 --snapshots"),
            0);
  EXPECT_EQ(key_values("o/oracle_report.txt").at("overall"), "pass");
  for (const char* f : {"wigner_initial.bin", "wigner_final.bin", "wigner_final.bin.meta"}) {
    EXPECT_TRUE(fs::exists(file(std::string("o/") + f))) << f;
  }
  EXPECT_EQ(fs::file_size(file("o/wigner_final.bin")), 8u + 16u + 48u + 129u * 128u * 8u);
}

}  // namespace
