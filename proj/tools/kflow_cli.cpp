// kflow: classify, run, check, plot and oracle subcommands.
//
// Exit codes: 0 success / all asserting checks pass, 1 check failure,
// 2 positivity breakdown, 3 invalid config or input.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kflow/class_calculus.hpp"
#include "kflow/config.hpp"
#include "kflow/io.hpp"
#include "kflow/plot.hpp"

namespace {

using namespace kflow;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBreakdown = 2;
constexpr int kExitBadInput = 3;

struct Options {
  std::string config_path;
  std::string trajectory_path;
  std::string csv_path;
  std::string out;
  std::string backend;
  std::vector<double> times;
};

config::ScenarioConfig load_config(const Options& o) {
  auto c = config::load(o.config_path);
  if (!o.backend.empty()) c.backend = parse_backend(o.backend);
  return c;
}

std::string path_in(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

ordered_json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

int cmd_classify(const Options& o) {
  const auto c = load_config(o);
  const CohomologyClass l(c.l), omega0(c.omega0);
  const double big_t = classes::singularity_time(l, omega0);
  const bool nef = classes::nef_check(l);
  const auto poly = classes::volume_polynomial(l, omega0);
  ordered_json j = {{"scenario", c.name},
                    {"T", number_or_inf(big_t)},
                    {"k", nef ? ordered_json(classes::collapse_order(l, omega0)) : ordered_json()},
                    {"volume_polynomial", poly.coefficients},
                    {"L_kahler", classes::kahler_check(l)},
                    {"L_nef", nef},
                    {"omega0_kahler", classes::kahler_check(omega0)}};
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  io::write_file(path_in(io::output_dir(o.out), c.name + ".classify.json"), text);
  return kExitOk;
}

// Runs the scenario and writes CSV, trajectory and manifest.
flow::Trajectory run_and_store(const config::ScenarioConfig& c, const std::string& dir) {
  const auto scenario = config::to_scenario(c);
  const auto start = std::chrono::steady_clock::now();
  auto traj = flow::run(scenario);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto checks = config::effective_checks(c);
  io::write_file(path_in(dir, c.name + ".csv"),
                 io::diagnostics_csv(io::csv_analysis(traj, checks)));
  io::write_file(path_in(dir, c.name + ".trajectory.json"), io::trajectory_json(traj, c).dump());
  io::write_file(path_in(dir, c.name + ".manifest.json"),
                 io::manifest_json(traj, c, wall).dump(2) + "\n");
  std::cerr << c.name << ": " << flow::to_string(traj.termination) << ", last sample t = "
            << traj.final_time() << " (" << traj.accepted_steps << " steps, " << wall << " s)\n";
  if (!traj.detail.empty()) std::cerr << "  " << traj.detail << '\n';
  return traj;
}

int cmd_run(const Options& o) {
  const auto c = load_config(o);
  const auto traj = run_and_store(c, io::output_dir(o.out));
  return traj.termination == flow::Termination::completed ? kExitOk : kExitBreakdown;
}

int cmd_check(const Options& o) {
  if (o.config_path.empty() == o.trajectory_path.empty())
    throw config::ConfigError("", 0, "check needs exactly one of a config or --trajectory");
  const std::string dir = io::output_dir(o.out);
  config::ScenarioConfig c;
  flow::Trajectory traj;
  if (!o.config_path.empty()) {
    c = load_config(o);
    traj = run_and_store(c, dir);
  } else {
    const auto base = std::filesystem::path(o.trajectory_path).parent_path().string();
    traj = io::trajectory_from_json(ordered_json::parse(io::read_file(o.trajectory_path)), c,
                                    base.empty() ? "." : base);
    if (!o.backend.empty()) traj.scenario.backend = parse_backend(o.backend);
  }
  if (traj.termination != flow::Termination::completed) return kExitBreakdown;

  const auto report = io::run_checks(traj, config::effective_checks(c));
  io::write_file(path_in(dir, c.name + ".report.json"), io::report_json(report).dump(2) + "\n");
  for (const auto& r : report.checks) {
    char margin[32];
    std::snprintf(margin, sizeof margin, "%.3e", r.worst_margin);
    std::cout << (r.asserting ? "" : "(probe) ") << r.name << ": " << verify::to_string(r.verdict)
              << "  worst_margin=" << margin << '\n';
  }
  std::cout << (report.all_pass() ? "all asserting checks pass" : "CHECK FAILURE") << '\n';
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_plot(const Options& o) {
  const auto table = io::parse_csv(io::read_file(o.csv_path));
  const std::string dir = io::output_dir(o.out);
  for (const auto& [name, svg] : plot::figures_from_csv(table)) {
    io::write_file(path_in(dir, name), svg);
    std::cout << path_in(dir, name) << '\n';
  }
  return kExitOk;
}

int cmd_oracle(const Options& o) {
  const auto c = load_config(o);
  const auto s = config::to_scenario(c);
  if (!s.spatially_constant())
    throw config::ConfigError("rho", 0, "oracle needs a spatially constant scenario");
  std::vector<double> times = o.times;
  if (times.empty())
    for (int i = 0; i <= static_cast<int>(std::floor(c.t_max + 1e-12)); ++i) times.push_back(i);
  for (double t : times)
    if (!(t >= 0.0) || t > c.t_max)
      throw config::ConfigError("times", 0, "requested times must lie in [0, t_max]");
  const auto table =
      flow::homogeneous_oracle(s.l, s.omega0, s.rho[0], s.k(), s.gauge, times);
  std::printf("%8s %20s %20s %20s\n", "t", "u", "f", "v");
  for (const auto& r : table) std::printf("%8.4f %20.12f %20.12f %20.12f\n", r.t, r.u, r.f, r.v);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar potential flow on flat tori: classification, runs and estimate checks"};
  app.require_subcommand(1);
  Options o;
  const auto backend_check = CLI::IsMember({"spectral", "fd4"});

  auto* classify = app.add_subcommand("classify", "singularity time, collapse order, volume polynomial");
  classify->add_option("config", o.config_path, "scenario config")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "integrate the flow and write CSV, trajectory and manifest");
  run->add_option("config", o.config_path, "scenario config")->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "run the configured estimate checks");
  check->add_option("config", o.config_path, "scenario config (runs the flow first)")
      ->check(CLI::ExistingFile);
  check->add_option("--trajectory", o.trajectory_path, "stored trajectory JSON")
      ->check(CLI::ExistingFile);

  auto* plot = app.add_subcommand("plot", "render SVG figures from a diagnostics CSV");
  plot->add_option("csv", o.csv_path, "diagnostics CSV")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "reference solution for spatially constant data");
  oracle->add_option("config", o.config_path, "scenario config")->required()->check(CLI::ExistingFile);
  oracle->add_option("--times", o.times, "sample times (default 0, 1, ..., t_max)")->delimiter(',');

  for (auto* sub : {classify, run, check, plot, oracle})
    sub->add_option("--out", o.out, "output directory (default $KFLOW_OUT_DIR or .)");
  for (auto* sub : {run, check, oracle})
    sub->add_option("--backend", o.backend, "differentiation backend")->check(backend_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*run) return cmd_run(o);
    if (*check) return cmd_check(o);
    if (*plot) return cmd_plot(o);
    if (*oracle) return cmd_oracle(o);
  } catch (const config::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
