#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "camel/observables.hpp"
#include "camel/oracle.hpp"
#include "camel/propagator.hpp"
#include "camel/scenario.hpp"

namespace camel {

namespace detail {

// Shortest decimal that round-trips; fixed format keeps output byte-stable.
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_optional(const std::optional<double>& x) {
  return x ? fmt_double(*x) : std::string{};
}

} // namespace detail

inline constexpr const char* series_header =
    "tau,n_g,n_e,p_mean_g,p_mean_e,p_norm_g,p_norm_e,"
    "e_kin_g,e_kin_e,e_kin_total,e_norm_g,e_norm_e";

inline std::string to_csv_row(const ObservableRecord& r) {
  using detail::fmt_double;
  using detail::fmt_optional;
  std::string row;
  row += fmt_double(r.tau);
  for (const double* v : {&r.n_g, &r.n_e, &r.p_mean_g, &r.p_mean_e})
    row += ',' + fmt_double(*v);
  row += ',' + fmt_optional(r.p_norm_g) + ',' + fmt_optional(r.p_norm_e);
  for (const double* v : {&r.e_kin_g, &r.e_kin_e, &r.e_kin_total})
    row += ',' + fmt_double(*v);
  row += ',' + fmt_optional(r.e_norm_g) + ',' + fmt_optional(r.e_norm_e);
  return row;
}

// Invariants every emitted record must satisfy; violations indicate a broken
// build rather than a bad scenario, so they abort the run.
inline void check_record(const ObservableRecord& r) {
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("observable validity failure at tau = " +
                             detail::fmt_double(r.tau) + ": " + what);
  };
  const double slack = 1e-12;
  if (!(r.n_g >= -slack && r.n_g <= 1.0 + slack) ||
      !(r.n_e >= -slack && r.n_e <= 1.0 + slack))
    fail("population outside [0, 1]");
  if (std::abs(r.n_g + r.n_e - 1.0) > 1e-10) fail("n_g + n_e drifted from 1");
  if (r.e_kin_total != r.e_kin_g + r.e_kin_e)
    fail("kinetic energy split identity broken");
}

struct RunResult {
  std::filesystem::path series_path;
  std::vector<std::filesystem::path> snapshot_paths;
  std::filesystem::path summary_path;
  ObservableRecord final_record;
  ConservationResiduals final_residuals;
};

inline void write_snapshot(const std::filesystem::path& path,
                           const TwoLevelState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# tau = " << detail::fmt_double(state.tau) << "\n";
  out << "# columns: family momentum p, ground density at p, excited density"
         " at p+1\n";
  const auto ground = distribution(state, Level::ground);
  const auto excited = distribution(state, Level::excited);
  for (std::size_t j = 0; j < ground.momenta.size(); ++j)
    out << detail::fmt_double(ground.momenta[j]) << ' '
        << detail::fmt_double(ground.density[j]) << ' '
        << detail::fmt_double(excited.density[j]) << '\n';
}

inline nlohmann::json record_to_json(const ObservableRecord& r) {
  nlohmann::json j{{"tau", r.tau},
                   {"n_g", r.n_g},
                   {"n_e", r.n_e},
                   {"p_mean_g", r.p_mean_g},
                   {"p_mean_e", r.p_mean_e},
                   {"e_kin_g", r.e_kin_g},
                   {"e_kin_e", r.e_kin_e},
                   {"e_kin_total", r.e_kin_total}};
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  put("p_norm_g", r.p_norm_g);
  put("p_norm_e", r.p_norm_e);
  put("e_norm_g", r.e_norm_g);
  put("e_norm_e", r.e_norm_e);
  return j;
}

// Evolve the scenario, sampling observables on the uniform schedule, and
// write the CSV series, snapshot files and JSON summary into out_dir.
inline RunResult run_scenario(const Scenario& sc,
                              const std::filesystem::path& out_dir,
                              unsigned threads = 1,
                              const std::filesystem::path& base_dir = ".") {
  validate(sc);
  std::filesystem::create_directories(out_dir);

  const TwoLevelState initial = build_initial_state(sc, base_dir);
  TwoLevelState state = initial;

  RunResult result;
  result.series_path = out_dir / sc.outputs.series;
  std::ofstream series(result.series_path);
  if (!series)
    throw std::runtime_error("cannot write " + result.series_path.string());
  series << series_header << '\n';

  const std::size_t n = sc.schedule.n_samples;
  const double dtau =
      sc.schedule.tau_max / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) evolve_in_place(state, dtau, sc.params, threads);
    const ObservableRecord rec = observe(state);
    check_record(rec);
    const ConservationResiduals res = conservation_residuals(state, initial);
    if (res.norm_drift > 1e-8 || res.momentum_drift > 1e-8)
      throw std::runtime_error(
          "conservation residual exceeded 1e-8 at tau = " +
          detail::fmt_double(state.tau) +
          "; the discretization is inconsistent");
    series << to_csv_row(rec) << '\n';
    if (i + 1 == n) {
      result.final_record = rec;
      result.final_residuals = res;
    }
  }
  series.close();

  // snapshots evolve fresh from the initial state: evaluation is exact in
  // tau, so this lands on the requested times with no schedule rounding
  for (std::size_t k = 0; k < sc.schedule.snapshot_taus.size(); ++k) {
    const double t = sc.schedule.snapshot_taus[k];
    const TwoLevelState snap = evolve(initial, t, sc.params, threads);
    auto path = out_dir / (sc.outputs.snapshot_prefix + "_" +
                           std::to_string(k) + ".txt");
    write_snapshot(path, snap);
    result.snapshot_paths.push_back(std::move(path));
  }

  nlohmann::json summary{
      {"scenario", sc.name},
      {"params", {{"rabi", sc.params.rabi}, {"detuning", sc.params.detuning}}},
      {"grid",
       {{"center", sc.grid.center},
        {"half_width", sc.grid.half_width},
        {"n_points", sc.grid.n_points}}},
      {"schedule",
       {{"tau_max", sc.schedule.tau_max},
        {"n_samples", sc.schedule.n_samples}}},
      {"final_record", record_to_json(result.final_record)},
      {"residuals",
       {{"norm_drift", result.final_residuals.norm_drift},
        {"momentum_drift", result.final_residuals.momentum_drift}}},
      {"outputs", {{"series", sc.outputs.series}}}};
  if (!result.snapshot_paths.empty()) {
    auto& files = summary["outputs"]["snapshots"];
    for (const auto& p : result.snapshot_paths)
      files.push_back(p.filename().string());
  }
  result.summary_path = out_dir / sc.outputs.summary;
  std::ofstream summary_out(result.summary_path);
  if (!summary_out)
    throw std::runtime_error("cannot write " + result.summary_path.string());
  summary_out << summary.dump(2) << '\n';

  return result;
}

struct VerifyReport {
  double max_error = 0.0;
  ConservationResiduals residuals;
  double step = 0.0;
  bool passed = false;
};

inline constexpr double verify_error_threshold = 1e-8;
inline constexpr double verify_norm_threshold = 1e-10;
inline constexpr double verify_momentum_threshold = 1e-9;

// Certify the analytic propagator against the brute-force integrator on the
// scenario's initial state over its full schedule.
inline VerifyReport verify_scenario(const Scenario& sc, OdeSettings settings,
                                    unsigned threads = 1,
                                    const std::filesystem::path& base_dir = ".") {
  validate(sc);
  const TwoLevelState initial = build_initial_state(sc, base_dir);
  if (settings.step <= 0.0 && settings.tolerance <= 0.0)
    settings.step =
        default_step(max_generalized_rabi(initial.grid, sc.params));

  VerifyReport report;
  report.step = settings.step;
  report.max_error = compare_propagators(initial, sc.schedule.tau_max,
                                         sc.params, settings, threads);
  const TwoLevelState evolved =
      evolve(initial, sc.schedule.tau_max, sc.params, threads);
  report.residuals = conservation_residuals(evolved, initial);
  report.passed = report.max_error <= verify_error_threshold &&
                  report.residuals.norm_drift <= verify_norm_threshold &&
                  report.residuals.momentum_drift <= verify_momentum_threshold;
  return report;
}

} // namespace camel
