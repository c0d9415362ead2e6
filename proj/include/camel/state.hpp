#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "camel/grid.hpp"

namespace camel {

using cplx = std::complex<double>;

// Two-level momentum-space state, family-aligned: slot j holds the ground
// amplitude at p_j together with the excited amplitude at p_j + 1, so each
// index is a closed two-dimensional subsystem under the interaction.
struct TwoLevelState {
  MomentumGrid grid;
  std::vector<cplx> a; // ground level, sampled at p_j
  std::vector<cplx> b; // excited level, sampled at p_j + 1
  double tau = 0.0;
};

inline std::vector<double> density(std::span<const cplx> amps) {
  std::vector<double> d(amps.size());
  for (std::size_t j = 0; j < amps.size(); ++j) d[j] = std::norm(amps[j]);
  return d;
}

// Total population integrate(|a|^2) + integrate(|b|^2); equals 1 for a
// normalized state.
inline double population_norm(const TwoLevelState& s) {
  return integrate(density(s.a), s.grid) + integrate(density(s.b), s.grid);
}

inline TwoLevelState normalized(TwoLevelState s) {
  const double n = population_norm(s);
  if (!(n > 0.0))
    throw std::invalid_argument("state: cannot normalize a zero-norm state");
  const double inv = 1.0 / std::sqrt(n);
  for (auto& z : s.a) z *= inv;
  for (auto& z : s.b) z *= inv;
  return s;
}

// Unnormalized Gaussian packet exp(-(p-center)^2/(4 sigma^2)) e^{i slope p},
// sampled at p_j + axis_offset. The offset serves the excited level, whose
// physical momentum axis sits one photon momentum above the family grid.
inline std::vector<cplx> gaussian_amplitudes(const MomentumGrid& grid,
                                             double center, double sigma,
                                             double phase_slope,
                                             double axis_offset = 0.0) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("gaussian packet: sigma must be positive");
  std::vector<cplx> out(grid.size());
  const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double p = grid.point(j) + axis_offset;
    const double x = p - center;
    out[j] = std::polar(std::exp(-x * x * inv4s2), phase_slope * p);
  }
  return out;
}

// Combine per-level amplitude arrays (either may be empty = absent) with
// complex weights into a normalized state at tau = 0.
inline TwoLevelState assemble_state(const MomentumGrid& grid,
                                    std::span<const cplx> ground,
                                    std::span<const cplx> excited,
                                    cplx weight_g = {1.0, 0.0},
                                    cplx weight_e = {1.0, 0.0}) {
  if (ground.empty() && excited.empty())
    throw std::invalid_argument("state: at least one level must be populated");
  if (!ground.empty() && ground.size() != grid.size())
    throw std::invalid_argument("state: ground amplitude count does not match grid");
  if (!excited.empty() && excited.size() != grid.size())
    throw std::invalid_argument("state: excited amplitude count does not match grid");

  TwoLevelState s{grid, std::vector<cplx>(grid.size(), cplx{}),
                  std::vector<cplx>(grid.size(), cplx{}), 0.0};
  for (std::size_t j = 0; j < ground.size(); ++j) s.a[j] = weight_g * ground[j];
  for (std::size_t j = 0; j < excited.size(); ++j) s.b[j] = weight_e * excited[j];
  return normalized(std::move(s));
}

// ---- tabulated amplitudes ---------------------------------------------

struct TabulatedPoint {
  double p;
  cplx amp;
};

// Plain-text amplitude table: three whitespace-separated columns p Re Im
// (momenta in hbar k units). Blank lines and '#' comments are skipped.
inline std::vector<TabulatedPoint> load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open amplitude table: " + path.string());
  std::vector<TabulatedPoint> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double p, re, im;
    if (!(ls >> p)) continue; // blank or comment-only line
    if (!(ls >> re >> im))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected three columns (p Re Im)");
    rows.push_back({p, cplx{re, im}});
  }
  if (rows.size() < 2)
    throw std::runtime_error(path.string() +
                             ": amplitude table needs at least two rows");
  std::sort(rows.begin(), rows.end(),
            [](const TabulatedPoint& x, const TabulatedPoint& y) { return x.p < y.p; });
  return rows;
}

// Linear interpolation of a sorted table onto query momenta; zero outside
// the tabulated range.
inline std::vector<cplx> resample_linear(std::span<const TabulatedPoint> rows,
                                         std::span<const double> momenta) {
  std::vector<cplx> out(momenta.size(), cplx{});
  for (std::size_t j = 0; j < momenta.size(); ++j) {
    const double p = momenta[j];
    if (p < rows.front().p || p > rows.back().p) continue;
    auto hi = std::lower_bound(
        rows.begin(), rows.end(), p,
        [](const TabulatedPoint& r, double v) { return r.p < v; });
    if (hi == rows.begin()) {
      out[j] = hi->amp;
      continue;
    }
    auto lo = hi - 1;
    if (hi == rows.end()) {
      out[j] = lo->amp;
      continue;
    }
    const double t = (p - lo->p) / (hi->p - lo->p);
    out[j] = (1.0 - t) * lo->amp + t * hi->amp;
  }
  return out;
}

} // namespace camel
