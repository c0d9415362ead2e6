#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>
#include <vector>
#include <string>

#include <json.hpp>

#include "camel/runner.hpp"
#include "camel/scenario.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

const char* minimal_scenario = R"(
# minimal run
[params]
rabi = 20.0
detuning = 0.0

[grid]
center = 0
half_width = 12
n_points = 1024

[ground]
type = gaussian
center = 0
sigma = 1.0

[schedule]
tau_max = 1.0
n_samples = 11
)";

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("camel_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

TEST_CASE("parse_scenario: minimal file gets defaults") {
  const auto sc = camel::parse_scenario(minimal_scenario, "mini.scenario");
  CHECK(sc.params.rabi == 20.0);
  CHECK(sc.ground.kind == camel::LevelSpec::Kind::gaussian);
  CHECK(sc.excited.kind == camel::LevelSpec::Kind::absent);
  CHECK(sc.ground.gaussian.phase_slope == 0.0);
  CHECK(sc.ground.weight == camel::cplx{1.0, 0.0});
  CHECK(sc.outputs.series == "series.csv");
  CHECK(sc.schedule.snapshot_taus.empty());
  CHECK_FALSE(sc.override_validity);
  CHECK(sc.name == "mini");
}

TEST_CASE("parse_scenario: errors carry file and line information") {
  CHECK_THROWS_WITH(camel::parse_scenario("[params\nrabi = 1\n", "x.scenario"),
                    ContainsSubstring("x.scenario:1"));
  CHECK_THROWS_WITH(camel::parse_scenario("[params]\nrabi\n", "x.scenario"),
                    ContainsSubstring("expected 'key = value'"));
  CHECK_THROWS_WITH(
      camel::parse_scenario("[params]\nrabi = 1\nrabi = 2\n", "x.scenario"),
      ContainsSubstring("duplicate key"));
  CHECK_THROWS_WITH(
      camel::parse_scenario("[params]\nrabi = oops\n", "x.scenario"),
      ContainsSubstring("expected a number"));
  CHECK_THROWS_WITH(camel::parse_scenario("[wat]\nx = 1\n", "x.scenario"),
                    ContainsSubstring("unknown section"));

  std::string typo = minimal_scenario;
  typo += "\n[output]\nseriess = out.csv\n";
  CHECK_THROWS_WITH(camel::parse_scenario(typo, "x.scenario"),
                    ContainsSubstring("unknown key 'seriess'"));
}

TEST_CASE("parse_scenario: validity rules are named in rejections") {
  std::string zero_points = minimal_scenario;
  const auto pos = zero_points.find("n_points = 1024");
  zero_points.replace(pos, 15, "n_points = 0");
  CHECK_THROWS_WITH(camel::parse_scenario(zero_points, "x.scenario"),
                    ContainsSubstring("n_points"));

  std::string long_run = minimal_scenario;
  const auto tpos = long_run.find("tau_max = 1.0");
  long_run.replace(tpos, 13, "tau_max = 40.0");
  CHECK_THROWS_WITH(camel::parse_scenario(long_run, "x.scenario"),
                    ContainsSubstring("time-validity rule"));

  // same file passes with the override flag
  long_run += "\n[validity]\noverride = true\n";
  CHECK_NOTHROW(camel::parse_scenario(long_run, "x.scenario"));

  std::string cramped = minimal_scenario;
  const auto hpos = cramped.find("half_width = 12");
  cramped.replace(hpos, 15, "half_width = 5");
  CHECK_THROWS_WITH(camel::parse_scenario(cramped, "x.scenario"),
                    ContainsSubstring("grid adequacy rule"));
}

TEST_CASE("parse_scenario: physical parameter block converts to recoil units") {
  const char* text = R"(
[physical]
mass = 3.82e-26
wavelength = 589e-9
rabi = 6.283185307179586e6

[grid]
center = 0
half_width = 0
n_points = 1

[ground]
type = gaussian
sigma = 1

[schedule]
tau_max = 1.0
)";
  const auto sc = camel::parse_scenario(text, "sodium.scenario");
  REQUIRE(sc.physical.has_value());
  CHECK(sc.params.rabi == Catch::Approx(40.00073).epsilon(1e-5));
  CHECK(sc.params.detuning == Catch::Approx(0.0).margin(1e-12));

  std::string both = text;
  both += "\n[params]\nrabi = 1\n";
  CHECK_THROWS_WITH(camel::parse_scenario(both, "x.scenario"),
                    ContainsSubstring("exactly one of [params] or [physical]"));
}

TEST_CASE("presets: catalogue of eight documented entries") {
  const auto& presets = camel::list_presets();
  CHECK(presets.size() == 8);

  std::ostringstream listing;
  for (const auto& p : presets) listing << p.name << ": " << p.description << "\n";
  CHECK_THAT(listing.str(),
             ContainsSubstring("fig7: general superpositional case (CAMEL)"));
  CHECK_THAT(listing.str(),
             ContainsSubstring("fig5: one-state case with definite momentum"));

  for (const auto& p : presets) {
    const auto sc = camel::preset_scenario(p.name);
    CHECK_NOTHROW(camel::validate(sc));
    const auto state = camel::build_initial_state(sc);
    CHECK(camel::population_norm(state) == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK(camel::preset_scenario("fig5").grid.n_points == 1);
  CHECK_THROWS_AS(camel::preset_scenario("fig3"), std::invalid_argument);
}

TEST_CASE("preset emission round-trips through the parser") {
  for (const char* name : {"fig1", "fig7"}) {
    const auto sc = camel::preset_scenario(name);
    const auto text = camel::scenario_to_text(sc);
    const auto back = camel::parse_scenario(text, std::string(name) + ".scenario");
    CHECK(back.params.rabi == sc.params.rabi);
    CHECK(back.params.detuning == sc.params.detuning);
    CHECK(back.grid.n_points == sc.grid.n_points);
    CHECK(back.schedule.tau_max == sc.schedule.tau_max);
    CHECK(back.schedule.n_samples == sc.schedule.n_samples);
    CHECK(back.ground.kind == sc.ground.kind);
    CHECK(back.excited.kind == sc.excited.kind);
    CHECK(back.schedule.snapshot_taus == sc.schedule.snapshot_taus);
  }
}

TEST_CASE("run_scenario: series, snapshot and summary files") {
  auto sc = camel::parse_scenario(minimal_scenario, "mini.scenario");
  sc.schedule.snapshot_taus = {0.0, 0.5};
  const auto dir = fresh_dir("run_smoke");

  const auto result = camel::run_scenario(sc, dir);
  const std::string series = slurp(result.series_path);
  CHECK_THAT(series, ContainsSubstring(camel::series_header));
  std::size_t rows = 0;
  for (char c : series) rows += c == '\n';
  CHECK(rows == sc.schedule.n_samples + 1);
  // the excited level starts empty: the first row must flag p_norm_e blank
  const auto first_row = series.substr(series.find('\n') + 1);
  CHECK_THAT(first_row.substr(0, first_row.find('\n')),
             ContainsSubstring(",,"));

  REQUIRE(result.snapshot_paths.size() == 2);
  const std::string snap = slurp(result.snapshot_paths[1]);
  CHECK_THAT(snap, ContainsSubstring("# tau = 0.5"));
  // three whitespace-separated columns per data row
  std::istringstream snap_in(snap);
  std::string line;
  while (std::getline(snap_in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double p, dg, de;
    REQUIRE((row >> p >> dg >> de));
    CHECK(dg >= 0.0);
    CHECK(de >= 0.0);
  }

  const auto summary = nlohmann::json::parse(slurp(result.summary_path));
  CHECK(summary["scenario"] == "mini");
  CHECK(summary["residuals"]["norm_drift"].get<double>() <= 1e-10);
  CHECK(summary["final_record"]["n_g"].get<double>() +
            summary["final_record"]["n_e"].get<double>() ==
        Catch::Approx(1.0).margin(1e-10));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_scenario: thread count never changes the bytes") {
  const auto sc = camel::parse_scenario(minimal_scenario, "mini.scenario");
  const auto dir1 = fresh_dir("det_a");
  const auto dir2 = fresh_dir("det_b");
  const auto r1 = camel::run_scenario(sc, dir1, 1);
  const auto r2 = camel::run_scenario(sc, dir2, 3);
  CHECK(slurp(r1.series_path) == slurp(r2.series_path));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("run_scenario: tabulated initial level from a sidecar file") {
  const auto dir = fresh_dir("tab");
  {
    std::ofstream out(dir / "ground.txt");
    out << "-6 0 0\n-3 0.5 0\n0 1 0\n3 0.5 0\n6 0 0\n";
  }
  const char* text = R"(
[params]
rabi = 10

[grid]
half_width = 12
n_points = 512

[ground]
type = tabulated
path = ground.txt

[schedule]
tau_max = 0.5
n_samples = 5
)";
  const auto sc = camel::parse_scenario(text, (dir / "tab.scenario").string());
  const auto state = camel::build_initial_state(sc, dir);
  CHECK(camel::population_norm(state) == Catch::Approx(1.0).margin(1e-12));
  const auto result = camel::run_scenario(sc, dir / "out", 1, dir);
  CHECK(std::filesystem::exists(result.series_path));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_scenario: fig5 normalized-momentum columns are constant") {
  auto sc = camel::preset_scenario("fig5");
  sc.schedule.n_samples = 201;
  const auto dir = fresh_dir("fig5_run");
  const auto result = camel::run_scenario(sc, dir);

  std::istringstream csv(slurp(result.series_path));
  std::string line;
  std::getline(csv, line); // header
  std::size_t data_rows = 0;
  while (std::getline(csv, line)) {
    ++data_rows;
    // columns 6 and 7 hold p_norm_g and p_norm_e
    std::vector<std::string> cols;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cols.push_back(cell);
    REQUIRE(cols.size() >= 10);
    if (!cols[5].empty())
      CHECK(std::stod(cols[5]) == Catch::Approx(0.0).margin(1e-12));
    if (!cols[6].empty())
      CHECK(std::stod(cols[6]) == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK(data_rows == sc.schedule.n_samples);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify_scenario: fig2 state certified against the oracle") {
  // verification window: the first dozen floppings of the fig2 packet
  auto sc = camel::preset_scenario("fig2");
  sc.schedule.tau_max = 24.0 * std::numbers::pi / sc.params.rabi;
  const auto report = camel::verify_scenario(sc, {}, 8);
  CHECK(report.passed);
  CHECK(report.max_error <= 1e-8);
  CHECK(report.residuals.norm_drift <= 1e-10);
  CHECK(report.residuals.momentum_drift <= 1e-9);
}

TEST_CASE("verify_scenario: small scenario passes, reckless step is reported") {
  const char* text = R"(
[params]
rabi = 8
detuning = 1

[grid]
half_width = 6
n_points = 129

[ground]
type = gaussian
sigma = 0.8

[schedule]
tau_max = 2.0
)";
  const auto sc = camel::parse_scenario(text, "small.scenario");
  const auto report = camel::verify_scenario(sc, {});
  CHECK(report.passed);
  CHECK(report.max_error <= camel::verify_error_threshold);

  CHECK_THROWS_WITH(camel::verify_scenario(sc, {0.5, 0.0}),
                    ContainsSubstring("smaller step"));
}
