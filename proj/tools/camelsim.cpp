// camelsim: scenario-driven simulator of a lossless two-level atom in a
// plane travelling wave. Evolves momentum-space wave packets with the exact
// dressed-state propagator and writes per-level observable time series.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "camel/camel.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            unsigned threads) {
  const camel::Scenario sc = camel::load_scenario(scenario_path);
  const auto base_dir =
      std::filesystem::path(scenario_path).parent_path().empty()
          ? std::filesystem::path(".")
          : std::filesystem::path(scenario_path).parent_path();
  const camel::RunResult result =
      camel::run_scenario(sc, out_dir, threads, base_dir);
  std::cout << "wrote " << result.series_path.string() << " ("
            << sc.schedule.n_samples << " samples";
  if (!result.snapshot_paths.empty())
    std::cout << ", " << result.snapshot_paths.size() << " snapshots";
  std::cout << ")\n";
  std::cout << "summary: " << result.summary_path.string() << "\n";
  const auto& r = result.final_record;
  std::printf("final: tau=%.6g n_g=%.6g n_e=%.6g\n", r.tau, r.n_g, r.n_e);
  return 0;
}

int cmd_verify(const std::string& scenario_path, double step, double tolerance,
               unsigned threads) {
  const camel::Scenario sc = camel::load_scenario(scenario_path);
  const auto base_dir =
      std::filesystem::path(scenario_path).parent_path().empty()
          ? std::filesystem::path(".")
          : std::filesystem::path(scenario_path).parent_path();
  camel::OdeSettings settings{step, tolerance};
  const camel::VerifyReport report =
      camel::verify_scenario(sc, settings, threads, base_dir);
  std::printf("oracle step: %.6g\n", report.step);
  std::printf("max propagator-vs-oracle error: %.3e (threshold %.0e)\n",
              report.max_error, camel::verify_error_threshold);
  std::printf("norm drift: %.3e (threshold %.0e)\n",
              report.residuals.norm_drift, camel::verify_norm_threshold);
  std::printf("momentum drift: %.3e (threshold %.0e)\n",
              report.residuals.momentum_drift,
              camel::verify_momentum_threshold);
  std::cout << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? 0 : 1;
}

int cmd_presets() {
  for (const auto& p : camel::list_presets())
    std::cout << p.name << ": " << p.description << "\n";
  return 0;
}

int cmd_preset(const std::string& name, bool emit, const std::string& out_dir) {
  const camel::Scenario sc = camel::preset_scenario(name);
  const std::string text = camel::scenario_to_text(sc);
  if (!emit) {
    std::cout << text;
    return 0;
  }
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / (name + ".scenario");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-level atom / travelling wave simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  unsigned threads = 1;
  double step = 0.0;
  double tolerance = 0.0;
  std::string preset_name;
  bool emit = false;

  auto* run = app.add_subcommand("run", "evolve a scenario and write CSV,"
                                        " snapshots and a JSON summary");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (default: .)");
  run->add_option("--threads", threads, "worker threads for the evolution");

  auto* verify = app.add_subcommand(
      "verify", "check the analytic propagator against the brute-force"
                " integrator on a scenario");
  verify->add_option("scenario", scenario_path, "scenario file")->required();
  verify->add_option("--step", step, "fixed oracle step (default: automatic)");
  verify->add_option("--tolerance", tolerance,
                     "adaptive oracle tolerance (<= 1e-6)");
  verify->add_option("--threads", threads, "worker threads");

  auto* presets =
      app.add_subcommand("presets", "list the bundled scenario gallery");

  auto* preset = app.add_subcommand(
      "preset", "print a gallery scenario (or write it with --emit)");
  preset->add_option("name", preset_name, "preset name, e.g. fig2")->required();
  preset->add_flag("--emit", emit, "write <name>.scenario instead of printing");
  preset->add_option("--out", out_dir, "directory for --emit (default: .)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir, threads);
    if (verify->parsed())
      return cmd_verify(scenario_path, step, tolerance, threads);
    if (presets->parsed()) return cmd_presets();
    if (preset->parsed()) return cmd_preset(preset_name, emit, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
