#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "camel/state.hpp"
#include "camel/units.hpp"

namespace camel {

// ---- scenario description ----------------------------------------------

struct GaussianSpec {
  double center = 0.0;      // physical momentum of the packet, hbar k
  double sigma = 1.0;       // momentum width, hbar k
  double phase_slope = 0.0; // linear phase = position offset
};

struct LevelSpec {
  enum class Kind { absent, gaussian, tabulated };
  Kind kind = Kind::absent;
  GaussianSpec gaussian;
  std::string tabulated_path;
  cplx weight{1.0, 0.0};
};

struct GridSpec {
  double center = 0.0;
  double half_width = 0.0;
  std::size_t n_points = 1;
};

struct ScheduleSpec {
  double tau_max = 0.0;
  std::size_t n_samples = 2;
  std::vector<double> snapshot_taus;
};

struct OutputSpec {
  std::string series = "series.csv";
  std::string snapshot_prefix = "snapshot";
  std::string summary = "summary.json";
};

struct Scenario {
  std::string name = "scenario";
  std::optional<PhysicalParams> physical; // boundary input, converted on load
  SimParams params;
  GridSpec grid;
  LevelSpec ground, excited;
  ScheduleSpec schedule;
  OutputSpec outputs;
  bool override_validity = false;
};

// ---- validation ----------------------------------------------------------

inline double grid_spacing(const GridSpec& g) {
  return g.n_points > 1
             ? 2.0 * g.half_width / static_cast<double>(g.n_points - 1)
             : 1.0;
}

// Grid adequacy for one Gaussian packet given in family coordinates.
inline void check_packet_adequacy(const Scenario& sc, const GaussianSpec& g,
                                  double family_center, const char* level) {
  const double needed = std::abs(family_center - sc.grid.center) +
                        6.0 * g.sigma + 1.0;
  if (sc.grid.half_width < needed) {
    std::ostringstream msg;
    msg << "grid adequacy rule violated for the " << level
        << " packet: half_width must be >= |center offset| + 6 sigma + 1 = "
        << needed << " (got " << sc.grid.half_width << ")";
    throw std::invalid_argument(msg.str());
  }
  const double dp = grid_spacing(sc.grid);
  if (dp > g.sigma / 8.0) {
    std::ostringstream msg;
    msg << "grid adequacy rule violated for the " << level
        << " packet: dp = " << dp << " must be <= sigma/8 = " << g.sigma / 8.0;
    throw std::invalid_argument(msg.str());
  }
}

inline void validate(const Scenario& sc) {
  validate(sc.params);
  if (sc.grid.n_points == 0)
    throw std::invalid_argument("scenario: grid n_points must be >= 1");
  if (sc.grid.n_points == 1 && sc.grid.half_width != 0.0)
    throw std::invalid_argument(
        "scenario: a single-point grid requires half_width = 0");
  if (sc.grid.n_points > 1 && !(sc.grid.half_width > 0.0))
    throw std::invalid_argument("scenario: grid half_width must be positive");
  if (!(sc.schedule.tau_max > 0.0))
    throw std::invalid_argument("scenario: tau_max must be positive");
  if (sc.schedule.n_samples < 2)
    throw std::invalid_argument("scenario: n_samples must be >= 2");
  for (double t : sc.schedule.snapshot_taus)
    if (t < 0.0 || t > sc.schedule.tau_max)
      throw std::invalid_argument(
          "scenario: snapshot times must lie in [0, tau_max]");
  if (sc.ground.kind == LevelSpec::Kind::absent &&
      sc.excited.kind == LevelSpec::Kind::absent)
    throw std::invalid_argument(
        "scenario: at least one level must be populated");
  for (const LevelSpec* lvl : {&sc.ground, &sc.excited}) {
    if (lvl->kind == LevelSpec::Kind::gaussian && !(lvl->gaussian.sigma > 0.0))
      throw std::invalid_argument("scenario: packet sigma must be positive");
    if (lvl->kind == LevelSpec::Kind::tabulated && lvl->tabulated_path.empty())
      throw std::invalid_argument(
          "scenario: tabulated level needs a path key");
  }

  if (sc.override_validity || sc.grid.n_points == 1) return;

  // Discretization guard rails. Evolution is exact per family; these rules
  // keep the quadrature of the increasingly oscillatory integrands honest.
  if (sc.ground.kind == LevelSpec::Kind::gaussian)
    check_packet_adequacy(sc, sc.ground.gaussian, sc.ground.gaussian.center,
                          "ground");
  if (sc.excited.kind == LevelSpec::Kind::gaussian)
    check_packet_adequacy(sc, sc.excited.gaussian,
                          sc.excited.gaussian.center - 1.0, "excited");
  const double phase_step = 2.0 * grid_spacing(sc.grid) * sc.schedule.tau_max;
  if (phase_step > 0.25 * std::numbers::pi) {
    std::ostringstream msg;
    msg << "time-validity rule violated: 2 * dp * tau_max = " << phase_step
        << " exceeds pi/4; refine the grid, shorten the run, or set"
           " override = true under [validity]";
    throw std::invalid_argument(msg.str());
  }
}

// ---- initial state -------------------------------------------------------

inline std::vector<cplx> level_amplitudes(const LevelSpec& lvl,
                                          const MomentumGrid& grid,
                                          double axis_offset,
                                          const std::filesystem::path& base_dir) {
  switch (lvl.kind) {
    case LevelSpec::Kind::absent:
      return {};
    case LevelSpec::Kind::gaussian:
      return gaussian_amplitudes(grid, lvl.gaussian.center, lvl.gaussian.sigma,
                                 lvl.gaussian.phase_slope, axis_offset);
    case LevelSpec::Kind::tabulated: {
      std::filesystem::path p = lvl.tabulated_path;
      if (p.is_relative()) p = base_dir / p;
      const auto rows = load_tabulated(p);
      std::vector<double> axis(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j)
        axis[j] = grid.point(j) + axis_offset;
      return resample_linear(rows, axis);
    }
  }
  return {};
}

inline TwoLevelState build_initial_state(
    const Scenario& sc, const std::filesystem::path& base_dir = ".") {
  const MomentumGrid grid =
      build_grid(sc.grid.center, sc.grid.half_width, sc.grid.n_points);
  const auto ground = level_amplitudes(sc.ground, grid, 0.0, base_dir);
  const auto excited = level_amplitudes(sc.excited, grid, 1.0, base_dir);
  return assemble_state(grid, ground, excited, sc.ground.weight,
                        sc.excited.weight);
}

// ---- plain-text key-value format ------------------------------------------

namespace detail {

struct ParsedFile {
  // section -> key -> (value, line)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>>
      sections;
  std::string origin;
};

[[noreturn]] inline void parse_fail(const std::string& origin, int line,
                                    const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline ParsedFile parse_keyvalue(std::string_view text, std::string_view origin) {
  ParsedFile out;
  out.origin = origin;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        parse_fail(out.origin, lineno, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        parse_fail(out.origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      parse_fail(out.origin, lineno, "expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) parse_fail(out.origin, lineno, "empty key");
    if (!out.sections[section].emplace(key, std::pair{value, lineno}).second)
      parse_fail(out.origin, lineno, "duplicate key '" + key + "'");
  }
  return out;
}

class SectionReader {
public:
  SectionReader(const ParsedFile& file, const std::string& name)
      : file_(file), name_(name) {
    if (auto it = file.sections.find(name); it != file.sections.end())
      entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    if (!entries_) return std::nullopt;
    auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    consumed_.push_back(key);
    return it->second.first;
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw std::runtime_error(file_.origin + ": missing key '" + key +
                               "' in section [" + name_ + "]");
    }
    return to_number(key, *v);
  }

  std::optional<double> maybe_number(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    return to_number(key, *v);
  }

  std::vector<double> number_list(const std::string& key) {
    auto v = raw(key);
    if (!v) return {};
    std::vector<double> out;
    std::string item;
    std::istringstream ss(*v);
    while (std::getline(ss, item, ','))
      out.push_back(to_number(key, std::string(trim(item))));
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail_key(key, "expected a boolean (true/false)");
  }

  // every key consumed? catches typos early
  void finish() {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      bool used = false;
      for (const auto& c : consumed_) used = used || c == key;
      if (!used)
        parse_fail(file_.origin, value.second,
                   "unknown key '" + key + "' in section [" + name_ + "]");
    }
  }

private:
  double to_number(const std::string& key, const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    double value = 0.0;
    auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || end != last)
      fail_key(key, "expected a number, got '" + text + "'");
    return value;
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& what) {
    int line = 0;
    if (entries_) {
      if (auto it = entries_->find(key); it != entries_->end())
        line = it->second.second;
    }
    parse_fail(file_.origin, line, "key '" + key + "': " + what);
  }

  const ParsedFile& file_;
  std::string name_;
  const std::map<std::string, std::pair<std::string, int>>* entries_ = nullptr;
  std::vector<std::string> consumed_;
};

inline LevelSpec read_level(const ParsedFile& file, const std::string& name) {
  SectionReader sec(file, name);
  LevelSpec lvl;
  if (!sec.present()) return lvl;
  const std::string kind = sec.raw("type").value_or("absent");
  if (kind == "absent") {
    lvl.kind = LevelSpec::Kind::absent;
  } else if (kind == "gaussian") {
    lvl.kind = LevelSpec::Kind::gaussian;
    lvl.gaussian.center = sec.number("center", 0.0);
    lvl.gaussian.sigma = sec.number("sigma");
    lvl.gaussian.phase_slope = sec.number("phase_slope", 0.0);
  } else if (kind == "tabulated") {
    lvl.kind = LevelSpec::Kind::tabulated;
    lvl.tabulated_path = sec.raw("path").value_or("");
  } else {
    throw std::runtime_error(file.origin + ": section [" + name +
                             "]: unknown type '" + kind + "'");
  }
  if (lvl.kind != LevelSpec::Kind::absent)
    lvl.weight = cplx{sec.number("weight_re", 1.0), sec.number("weight_im", 0.0)};
  sec.finish();
  return lvl;
}

} // namespace detail

inline Scenario parse_scenario(std::string_view text, std::string_view origin) {
  const detail::ParsedFile file = detail::parse_keyvalue(text, origin);
  for (const auto& [name, entries] : file.sections) {
    (void)entries;
    static constexpr std::array known = {"params",   "physical", "grid",
                                         "ground",   "excited",  "schedule",
                                         "output",   "validity"};
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok)
      throw std::runtime_error(std::string(origin) + ": unknown section [" +
                               name + "]");
  }

  Scenario sc;
  sc.name = std::filesystem::path(origin).stem().string();

  detail::SectionReader params(file, "params");
  detail::SectionReader physical(file, "physical");
  if (params.present() == physical.present())
    throw std::runtime_error(std::string(origin) +
                             ": provide exactly one of [params] or [physical]");
  if (params.present()) {
    sc.params.rabi = params.number("rabi");
    sc.params.detuning = params.number("detuning", 0.0);
    params.finish();
  } else {
    PhysicalParams ph;
    ph.atomic_mass = physical.number("mass");
    const auto lambda = physical.maybe_number("wavelength");
    if (lambda) {
      if (!(*lambda > 0.0))
        throw std::runtime_error(std::string(origin) +
                                 ": wavelength must be positive");
      ph.wavenumber = 2.0 * std::numbers::pi / *lambda;
    } else {
      ph.wavenumber = physical.number("wavenumber");
    }
    auto omega = physical.maybe_number("omega");
    if (!omega) {
      if (!lambda)
        throw std::runtime_error(std::string(origin) +
                                 ": [physical] needs omega or wavelength");
      omega = speed_of_light * ph.wavenumber; // the k = omega/c convention
    }
    ph.field_frequency = *omega;
    ph.transition_frequency = physical.number("omega0", *omega);
    ph.rabi_frequency = physical.number("rabi");
    physical.finish();
    sc.physical = ph;
    sc.params = to_dimensionless(ph);
  }

  detail::SectionReader grid(file, "grid");
  sc.grid.center = grid.number("center", 0.0);
  sc.grid.half_width = grid.number("half_width", 0.0);
  const double n_points = grid.number("n_points");
  if (!(n_points >= 0.0) || n_points != std::floor(n_points))
    throw std::runtime_error(std::string(origin) +
                             ": n_points must be a non-negative integer");
  sc.grid.n_points = static_cast<std::size_t>(n_points);
  grid.finish();

  sc.ground = detail::read_level(file, "ground");
  sc.excited = detail::read_level(file, "excited");

  detail::SectionReader schedule(file, "schedule");
  sc.schedule.tau_max = schedule.number("tau_max");
  const double n_samples = schedule.number("n_samples", 2.0);
  if (!(n_samples >= 0.0) || n_samples != std::floor(n_samples))
    throw std::runtime_error(std::string(origin) +
                             ": n_samples must be a non-negative integer");
  sc.schedule.n_samples = static_cast<std::size_t>(n_samples);
  sc.schedule.snapshot_taus = schedule.number_list("snapshot_taus");
  schedule.finish();

  detail::SectionReader output(file, "output");
  sc.outputs.series = output.raw("series").value_or(sc.outputs.series);
  sc.outputs.snapshot_prefix =
      output.raw("snapshot_prefix").value_or(sc.outputs.snapshot_prefix);
  sc.outputs.summary = output.raw("summary").value_or(sc.outputs.summary);
  output.finish();

  detail::SectionReader validity(file, "validity");
  sc.override_validity = validity.flag("override", false);
  validity.finish();

  validate(sc);
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

// ---- presets ---------------------------------------------------------------

struct PresetInfo {
  std::string name;
  std::string description;
};

inline const std::vector<PresetInfo>& list_presets() {
  static const std::vector<PresetInfo> catalogue = {
      {"fig1", "ground-level momentum distributions: initial, after 4 and"
               " after 12 Rabi floppings"},
      {"fig2", "one-level wave-packet populations: damped Rabi flopping"},
      {"fig5", "one-state case with definite momentum: constant normalized"
               " momenta"},
      {"fig6", "one-state wave-packet case: normalized momenta stay within"
               " one photon momentum"},
      {"fig7", "general superpositional case (CAMEL): normalized momenta"
               " accumulate beyond one photon momentum"},
      {"fig8", "definite-momentum case: flopping level kinetic energies"},
      {"fig9", "one-level wave-packet case: kinetic energies with damped"
               " fluctuations"},
      {"fig10", "general superpositional case (CAMEL): kinetic energy"
                " accumulation per level"},
  };
  return catalogue;
}

inline Scenario preset_scenario(std::string_view name) {
  constexpr double rabi = 20.0;
  constexpr double pi = std::numbers::pi;

  Scenario sc;
  sc.name = std::string(name);
  sc.params = {rabi, 0.0};

  auto gaussian = [](double center, double sigma) {
    LevelSpec lvl;
    lvl.kind = LevelSpec::Kind::gaussian;
    lvl.gaussian = {center, sigma, 0.0};
    return lvl;
  };
  auto wide_grid = [&sc](std::size_t n) {
    sc.grid = {0.0, 24.0, n};
  };

  if (name == "fig1") {
    wide_grid(4096);
    sc.ground = gaussian(0.0, 2.0);
    sc.schedule = {24.0 * pi / rabi, 301,
                   {0.0, 8.0 * pi / rabi, 24.0 * pi / rabi}};
  } else if (name == "fig2" || name == "fig9") {
    wide_grid(8192);
    sc.ground = gaussian(0.0, 2.0);
    sc.schedule = {288.0 * pi / rabi, 4801, {}};
  } else if (name == "fig5" || name == "fig8") {
    sc.grid = {0.0, 0.0, 1};
    sc.ground = gaussian(0.0, 1.0); // evaluates to 1 on the single grid point
    sc.schedule = {24.0 * pi / rabi, 1201, {}};
  } else if (name == "fig6") {
    wide_grid(4096);
    sc.ground = gaussian(0.0, 0.4);
    sc.schedule = {24.0 * pi / rabi, 1201, {}};
  } else if (name == "fig7" || name == "fig10") {
    sc.params.detuning = -10.0;
    wide_grid(8192);
    sc.ground = gaussian(0.0, 2.0);
    sc.excited = gaussian(10.0, 2.0);
    sc.schedule = {96.0 * pi / rabi, 2401, {}};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "'; see the presets subcommand");
  }
  validate(sc);
  return sc;
}

// Serialize a scenario back to the key-value format (used by preset --emit).
inline std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << sc.name << " scenario\n\n";
  out << "[params]\nrabi = " << sc.params.rabi
      << "\ndetuning = " << sc.params.detuning << "\n\n";
  out << "[grid]\ncenter = " << sc.grid.center
      << "\nhalf_width = " << sc.grid.half_width
      << "\nn_points = " << sc.grid.n_points << "\n\n";
  auto emit_level = [&out](const char* name, const LevelSpec& lvl) {
    if (lvl.kind == LevelSpec::Kind::absent) return;
    out << "[" << name << "]\n";
    if (lvl.kind == LevelSpec::Kind::gaussian) {
      out << "type = gaussian\ncenter = " << lvl.gaussian.center
          << "\nsigma = " << lvl.gaussian.sigma
          << "\nphase_slope = " << lvl.gaussian.phase_slope << "\n";
    } else {
      out << "type = tabulated\npath = " << lvl.tabulated_path << "\n";
    }
    out << "weight_re = " << lvl.weight.real()
        << "\nweight_im = " << lvl.weight.imag() << "\n\n";
  };
  emit_level("ground", sc.ground);
  emit_level("excited", sc.excited);
  out << "[schedule]\ntau_max = " << sc.schedule.tau_max
      << "\nn_samples = " << sc.schedule.n_samples << "\n";
  if (!sc.schedule.snapshot_taus.empty()) {
    out << "snapshot_taus = ";
    for (std::size_t i = 0; i < sc.schedule.snapshot_taus.size(); ++i)
      out << (i ? ", " : "") << sc.schedule.snapshot_taus[i];
    out << "\n";
  }
  if (sc.override_validity) out << "\n[validity]\noverride = true\n";
  return out.str();
}

} // namespace camel
