#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"
#include "gravint/fit.hpp"
#include "gravint/gravity.hpp"
#include "gravint/phasespace/oracle.hpp"
#include "gravint/phasespace/snapshot.hpp"
#include "gravint/signal.hpp"
#include "gravint/two_level.hpp"
#include "gravint/version.hpp"

namespace fs = std::filesystem;
using gravint::detail::format_double;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Written before any data file and rewritten once the run is over.
class Manifest {
 public:
  Manifest(std::string subcommand, const Globals& g)
      : dir_(g.out), path_((fs::path(g.out) / "manifest.json").string()) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["tool_version"] = gravint::kVersion;
    doc_["timestamp"] = utc_timestamp();
    doc_["output_dir"] = fs::absolute(g.out).string();
    doc_["config_path"] = g.config;
    doc_["seed"] = g.seed;
    doc_["tolerance"] = g.tolerance;
    doc_["status"] = "running";
    doc_["outputs"] = json::array();
  }

  json& resolved() { return doc_["resolved"]; }

  void write() const {
    gravint::write_text_file(path_, doc_.dump(2) + "\n");
  }

  std::string output(const std::string& name) {
    doc_["outputs"].push_back(name);
    return (fs::path(dir_) / name).string();
  }

  void finish(const std::string& status, const std::string& message = {}) {
    doc_["status"] = status;
    if (!message.empty()) doc_["message"] = message;
    write();
  }

 private:
  std::string dir_;
  std::string path_;
  json doc_;
};

gravint::ExperimentConfig require_config(const Globals& g) {
  if (g.config.empty()) throw gravint::InputError("--config is required");
  return gravint::load_config_file(g.config);
}

json config_json(const gravint::ExperimentConfig& c) {
  json j;
  for (const auto& [k, v] : gravint::parse_key_values(gravint::serialize_config(c))) {
    j[k] = gravint::detail::parse_double(v, k);
  }
  return j;
}

std::string key_values(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string s;
  for (const auto& [k, v] : rows) s += k + " = " + v + "\n";
  return s;
}

// ---- frequencies -------------------------------------------------------

int cmd_frequencies(const Globals& g) {
  const auto c = require_config(g);
  Manifest m("frequencies", g);
  m.resolved() = config_json(c);
  m.write();

  std::vector<std::pair<std::string, std::string>> rows = {
      {"omega_classical_rad_s", format_double(gravint::omega_classical(c))},
      {"omega_quantum_rad_s", format_double(gravint::omega_quantum(c))},
      {"radius_left_m", format_double(c.radius_left())},
      {"radius_right_m", format_double(c.radius_right())},
      {"dist_left_m", format_double(c.dist_left)},
      {"dist_right_m", format_double(c.dist_right)},
  };
  auto attempt = [&rows](const std::string& key, auto&& f) {
    try {
      rows.emplace_back(key, format_double(f()));
    } catch (const gravint::InputError& e) {
      rows.emplace_back(key, std::string("infeasible (") + e.what() + ")");
    }
  };
  attempt("dist_right_null_classical_m", [&] { return gravint::solve_null_distance(c); });
  attempt("dist_right_null_quantum_m",
          [&] { return gravint::solve_null_quantum_distance(c); });
  try {
    const auto p = gravint::placement_comparison(c);
    rows.insert(rows.end(),
                {{"placement_exact_dist_left_m", format_double(p.dist_left_exact)},
                 {"placement_exact_dist_right_m", format_double(p.dist_right_exact)},
                 {"placement_exact_omega_quantum_rad_s", format_double(p.omega_quantum_exact)},
                 {"placement_rounded_dist_left_m", format_double(p.dist_left_rounded)},
                 {"placement_rounded_dist_right_m", format_double(p.dist_right_rounded)},
                 {"placement_rounded_omega_quantum_rad_s",
                  format_double(p.omega_quantum_rounded)}});
  } catch (const gravint::InputError& e) {
    rows.emplace_back("placement_comparison", std::string("infeasible (") + e.what() + ")");
  }
  const std::string text = key_values(rows);
  gravint::write_text_file(m.output("frequencies.txt"), text);
  std::cout << text;
  m.finish("ok");
  return 0;
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string model;
  std::optional<double> omega_q, omega_c, lambda, omega_g;
  std::optional<std::string> a_lr, b_lr, b_rl;
  std::optional<double> duration;
  std::size_t samples = 200;
  double noise_sd = 0.0;
  std::string method = "auto";
};

gravint::Complex parse_complex(const std::string& text, const char* flag) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw gravint::InputError(std::string(flag) + " expects 're,im'");
  }
  return {gravint::detail::parse_double(gravint::detail::trim(text.substr(0, comma)), flag),
          gravint::detail::parse_double(gravint::detail::trim(text.substr(comma + 1)), flag)};
}

gravint::DynamicsModel select_model(const SimulateArgs& a,
                                    const std::optional<gravint::ExperimentConfig>& cfg) {
  struct Flag {
    const char* name;
    bool given;
  };
  const Flag flags[] = {{"--omega-q", a.omega_q.has_value()}, {"--omega-c", a.omega_c.has_value()},
                        {"--lambda", a.lambda.has_value()},   {"--omega-g", a.omega_g.has_value()},
                        {"--a-lr", a.a_lr.has_value()},       {"--b-lr", a.b_lr.has_value()},
                        {"--b-rl", a.b_rl.has_value()}};
  auto allow_only = [&](std::initializer_list<std::string> ok) {
    for (const auto& f : flags) {
      if (!f.given) continue;
      bool fine = false;
      for (const auto& o : ok) fine = fine || o == f.name;
      if (!fine) {
        throw gravint::InputError(std::string(f.name) + " conflicts with --model " + a.model);
      }
    }
  };
  auto need = [](bool given, const char* flag, const std::string& model) {
    if (!given) throw gravint::InputError("--model " + model + " needs " + flag);
  };
  if (a.model == "schrodinger") {
    allow_only({"--omega-q"});
    if (a.omega_q) return gravint::model::Schrodinger{*a.omega_q};
    if (!cfg) throw gravint::InputError("--model schrodinger needs --omega-q or --config");
    return gravint::model::Schrodinger{gravint::omega_quantum(*cfg)};
  }
  if (a.model == "classical") {
    allow_only({"--omega-c"});
    if (a.omega_c) return gravint::model::ClassicalPoisson{*a.omega_c};
    if (!cfg) throw gravint::InputError("--model classical needs --omega-c or --config");
    return gravint::model::ClassicalPoisson{gravint::omega_classical(*cfg)};
  }
  if (a.model == "tilloy-diosi") {
    allow_only({"--lambda", "--omega-g"});
    need(a.lambda.has_value(), "--lambda", a.model);
    need(a.omega_g.has_value(), "--omega-g", a.model);
    return gravint::make_tilloy_diosi(*a.lambda, *a.omega_g);
  }
  if (a.model == "general") {
    allow_only({"--a-lr", "--b-lr", "--b-rl"});
    need(a.a_lr.has_value(), "--a-lr", a.model);
    need(a.b_lr.has_value(), "--b-lr", a.model);
    need(a.b_rl.has_value(), "--b-rl", a.model);
    return gravint::model::GeneralLinear{parse_complex(*a.a_lr, "--a-lr"),
                                         parse_complex(*a.b_lr, "--b-lr"),
                                         parse_complex(*a.b_rl, "--b-rl")};
  }
  throw gravint::InputError("unknown model '" + a.model + "'");
}

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  std::optional<gravint::ExperimentConfig> cfg;
  if (!g.config.empty()) cfg = gravint::load_config_file(g.config);
  const auto model = select_model(a, cfg);
  double duration = 0.0;
  if (a.duration) {
    duration = *a.duration;
  } else if (cfg) {
    duration = cfg->hold_time;
  } else {
    throw gravint::InputError("--duration is required without --config");
  }
  gravint::SolveMethod method;
  if (a.method == "auto") method = gravint::SolveMethod::kAuto;
  else if (a.method == "integrate") method = gravint::SolveMethod::kIntegrate;
  else throw gravint::InputError("--method must be auto or integrate");
  const auto times = gravint::uniform_times(duration, a.samples);

  Manifest m("simulate", g);
  json& r = m.resolved();
  if (cfg) r["config"] = config_json(*cfg);
  r["model"] = gravint::describe(model);
  r["duration_s"] = duration;
  r["samples"] = a.samples;
  r["noise_sd"] = a.noise_sd;
  r["method"] = a.method;
  m.write();

  gravint::EvolveOptions opt;
  opt.tolerance = g.tolerance;
  opt.on_warning = [](const std::string& w) { std::cerr << "warning: " << w << "\n"; };
  const auto record = gravint::synthesize_record(model, times, a.noise_sd, g.seed, method, opt);
  gravint::write_text_file(m.output("fringe.csv"), gravint::format_record(record));
  m.finish("ok");
  return 0;
}

// ---- sweep -------------------------------------------------------------

struct SweepArgs {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const auto base = require_config(g);
  double gravint::ExperimentConfig::*field = nullptr;
  if (a.parameter == "d1") field = &gravint::ExperimentConfig::dist_left;
  else if (a.parameter == "d2") field = &gravint::ExperimentConfig::dist_right;
  else if (a.parameter == "M1") field = &gravint::ExperimentConfig::mass_left;
  else if (a.parameter == "M2") field = &gravint::ExperimentConfig::mass_right;
  else if (a.parameter == "dx") field = &gravint::ExperimentConfig::arm_separation;
  else throw gravint::InputError("--parameter must be one of d1, d2, M1, M2, dx");
  if (a.steps < 1) throw gravint::InputError("--steps must be >= 1");
  if (a.steps > 1 && a.from == a.to) throw gravint::InputError("empty sweep range");
  if (!std::isfinite(a.from) || !std::isfinite(a.to)) {
    throw gravint::InputError("sweep bounds must be finite");
  }

  Manifest m("sweep", g);
  m.resolved()["config"] = config_json(base);
  m.resolved()["parameter"] = a.parameter;
  m.resolved()["from"] = a.from;
  m.resolved()["to"] = a.to;
  m.resolved()["steps"] = a.steps;
  m.write();

  struct Row {
    double value;
    std::string omega_c, omega_q, status;
  };
  std::vector<std::future<Row>> jobs;
  for (int i = 0; i < a.steps; ++i) {
    const double v = a.steps == 1 ? a.from
                                  : a.from + (a.to - a.from) * i / static_cast<double>(a.steps - 1);
    jobs.push_back(std::async(std::launch::async, [base, field, v] {
      auto c = base;
      c.*field = v;
      try {
        gravint::validate(c);
        return Row{v, format_double(gravint::omega_classical(c)),
                   format_double(gravint::omega_quantum(c)), "ok"};
      } catch (const gravint::InputError& e) {
        std::string msg = e.what();
        for (char& ch : msg) if (ch == ',' || ch == '\n') ch = ';';
        return Row{v, "", "", "infeasible: " + msg};
      }
    }));
  }
  std::string csv = "value,omega_C_rad_s,omega_Q_rad_s,status\n";
  for (auto& j : jobs) {
    const Row r = j.get();
    csv += format_double(r.value) + "," + r.omega_c + "," + r.omega_q + "," + r.status + "\n";
  }
  gravint::write_text_file(m.output("sweep.csv"), csv);
  m.finish("ok");
  return 0;
}

// ---- validate-oracle ---------------------------------------------------

struct OracleArgs {
  std::optional<std::size_t> grid_q, grid_p, steps;
  std::optional<int> moyal_order;
  std::optional<double> duration;
  bool snapshots = false;
};

int cmd_validate_oracle(const Globals& g, const OracleArgs& a) {
  namespace ps = gravint::phasespace;
  auto c = g.config.empty() ? ps::OracleConfig{}
                            : ps::load_oracle_config(gravint::read_text_file(g.config));
  if (a.grid_q) c.n_q = *a.grid_q;
  if (a.grid_p) c.n_p = *a.grid_p;
  if (a.steps) c.steps = *a.steps;
  if (a.moyal_order) c.moyal_order = *a.moyal_order;
  if (a.duration) c.duration = *a.duration;

  Manifest m("validate-oracle", g);
  json& r = m.resolved();
  r["grid_points_q"] = c.n_q;
  r["grid_points_p"] = c.n_p;
  r["duration"] = c.duration;
  r["steps"] = c.steps;
  r["moyal_order"] = c.moyal_order;
  r["mask_kinetic"] = c.mask_kinetic;
  r["particle_mass"] = c.particle_mass;
  r["packet_width"] = c.packet_width;
  r["phase_tolerance"] = c.phase_tolerance;
  m.write();

  const auto report = ps::run_oracle(c);
  const std::string text = ps::format_report(report, c);
  gravint::write_text_file(m.output("oracle_report.txt"), text);
  if (a.snapshots) {
    ps::write_snapshot(m.output("wigner_initial.bin"), report.initial);
    m.output("wigner_initial.bin.meta");
    ps::write_snapshot(m.output("wigner_final.bin"), report.final_moyal);
    m.output("wigner_final.bin.meta");
  }
  std::cout << text;
  if (!report.passed()) {
    m.finish("failed", "oracle checks failed");
    std::cerr << "error: oracle validation failed\n";
    return kExitNumerical;
  }
  m.finish("ok");
  return 0;
}

// ---- fit ---------------------------------------------------------------

int cmd_fit(const Globals& g, const std::string& record_path) {
  const auto record = gravint::read_record_file(record_path);
  Manifest m("fit", g);
  m.resolved()["record"] = record_path;
  m.resolved()["record_model"] = record.metadata.model;
  m.resolved()["samples"] = record.times.size();
  m.write();
  try {
    const auto fit = gravint::fit_damped_fringe(record);
    const std::string text = gravint::format_fit(fit);
    gravint::write_text_file(m.output("fit.txt"), text);
    std::cout << text;
    m.finish("ok");
    return 0;
  } catch (const gravint::FitError& e) {
    m.finish("failed", e.what());
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gravitational phase shifts beyond the classical limit: frequencies, "
               "fringe records, phase-space oracle and fits"};
  app.set_version_flag("--version", gravint::kVersion);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment config (or scaled oracle config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Noise seed")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "Adaptive integrator tolerance")
      ->capture_default_str();

  auto* freq = app.add_subcommand("frequencies", "omega_C, omega_Q, radii and null placements");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic fringe record");
  simulate->add_option("--model", sim.model, "schrodinger | classical | tilloy-diosi | general")
      ->required();
  simulate->add_option("--omega-q", sim.omega_q, "rad/s");
  simulate->add_option("--omega-c", sim.omega_c, "rad/s");
  simulate->add_option("--lambda", sim.lambda, "dephasing rate, 1/s");
  simulate->add_option("--omega-g", sim.omega_g, "rad/s");
  simulate->add_option("--a-lr", sim.a_lr, "population coupling 're,im'");
  simulate->add_option("--b-lr", sim.b_lr, "coherence coupling 're,im'");
  simulate->add_option("--b-rl", sim.b_rl, "conjugate coupling 're,im'");
  simulate->add_option("--duration", sim.duration, "s (default: hold_time_s of --config)");
  simulate->add_option("--samples", sim.samples)->capture_default_str();
  simulate->add_option("--noise-sd", sim.noise_sd)->capture_default_str();
  simulate->add_option("--method", sim.method, "auto | integrate")->capture_default_str();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "omega_C and omega_Q across one geometry parameter");
  sweep->add_option("--parameter", sw.parameter, "d1 | d2 | M1 | M2 | dx")->required();
  sweep->add_option("--from", sw.from)->required();
  sweep->add_option("--to", sw.to)->required();
  sweep->add_option("--steps", sw.steps)->required();

  OracleArgs orc;
  auto* oracle = app.add_subcommand("validate-oracle", "Phase-space check of the two-state reduction");
  oracle->add_option("--grid-q", orc.grid_q);
  oracle->add_option("--grid-p", orc.grid_p);
  oracle->add_option("--steps", orc.steps);
  oracle->add_option("--moyal-order", orc.moyal_order);
  oracle->add_option("--duration", orc.duration);
  oracle->add_flag("--snapshots", orc.snapshots, "Also write initial and final Wigner grids");

  std::string record_path;
  auto* fit = app.add_subcommand("fit", "Damped-fringe fit of a record");
  fit->add_option("record", record_path, "Fringe record CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    fs::create_directories(g.out);
    if (*freq) return cmd_frequencies(g);
    if (*simulate) return cmd_simulate(g, sim);
    if (*sweep) return cmd_sweep(g, sw);
    if (*oracle) return cmd_validate_oracle(g, orc);
    if (*fit) return cmd_fit(g, record_path);
  } catch (const gravint::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const gravint::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
