#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "camel/grid.hpp"
#include "camel/state.hpp"

namespace camel {

// Populations below this are treated as empty: the normalized per-level
// quantities divide by them and would otherwise blow up at flopping nodes.
inline constexpr double population_epsilon = 1e-9;

enum class Level { ground, excited };

// One time sample of every scalar observable. Momenta in hbar k, energies in
// recoil units. Normalized quantities are absent while the level is empty.
struct ObservableRecord {
  double tau = 0.0;
  double n_g = 0.0, n_e = 0.0;
  double p_mean_g = 0.0, p_mean_e = 0.0;
  std::optional<double> p_norm_g, p_norm_e;
  double e_kin_g = 0.0, e_kin_e = 0.0, e_kin_total = 0.0;
  std::optional<double> e_norm_g, e_norm_e;
};

namespace detail {

inline double moment(const std::vector<double>& dens, const MomentumGrid& grid,
                     double axis_offset, int power) {
  std::vector<double> f(dens.size());
  for (std::size_t j = 0; j < dens.size(); ++j) {
    const double p = grid.point(j) + axis_offset;
    double w = 1.0;
    for (int k = 0; k < power; ++k) w *= p;
    f[j] = dens[j] * w;
  }
  return integrate(f, grid);
}

} // namespace detail

inline std::pair<double, double> populations(const TwoLevelState& s) {
  return {integrate(density(s.a), s.grid), integrate(density(s.b), s.grid)};
}

// First momentum moments per level; the excited moment runs over the shifted
// physical momenta p + 1.
inline std::pair<double, double> level_momenta(const TwoLevelState& s) {
  return {detail::moment(density(s.a), s.grid, 0.0, 1),
          detail::moment(density(s.b), s.grid, 1.0, 1)};
}

inline std::pair<std::optional<double>, std::optional<double>>
normalized_momenta(const TwoLevelState& s) {
  const auto [n_g, n_e] = populations(s);
  const auto [p_g, p_e] = level_momenta(s);
  std::pair<std::optional<double>, std::optional<double>> out;
  if (n_g > population_epsilon) out.first = p_g / n_g;
  if (n_e > population_epsilon) out.second = p_e / n_e;
  return out;
}

inline std::tuple<double, double, double> level_kinetic(const TwoLevelState& s) {
  const double e_g = detail::moment(density(s.a), s.grid, 0.0, 2);
  const double e_e = detail::moment(density(s.b), s.grid, 1.0, 2);
  return {e_g, e_e, e_g + e_e};
}

inline std::pair<std::optional<double>, std::optional<double>>
normalized_kinetic(const TwoLevelState& s) {
  const auto [n_g, n_e] = populations(s);
  const auto [e_g, e_e, e_tot] = level_kinetic(s);
  (void)e_tot;
  std::pair<std::optional<double>, std::optional<double>> out;
  if (n_g > population_epsilon) out.first = e_g / n_g;
  if (n_e > population_epsilon) out.second = e_e / n_e;
  return out;
}

struct DistributionSnapshot {
  double tau = 0.0;
  Level level = Level::ground;
  std::vector<double> momenta; // physical momentum axis of the level
  std::vector<double> density; // |a|^2 or |b|^2, continuum-normalized
};

inline DistributionSnapshot distribution(const TwoLevelState& s, Level level) {
  DistributionSnapshot snap;
  snap.tau = s.tau;
  snap.level = level;
  const double offset = level == Level::ground ? 0.0 : 1.0;
  snap.momenta.resize(s.grid.size());
  for (std::size_t j = 0; j < s.grid.size(); ++j)
    snap.momenta[j] = s.grid.point(j) + offset;
  snap.density = density(level == Level::ground ? s.a : s.b);
  return snap;
}

struct ConservationResiduals {
  double norm_drift = 0.0;
  double momentum_drift = 0.0;
};

// Norm and momentum conservation checks against a reference state. The
// combination <p>_g + <p>_e - n_e is conserved exactly because each family's
// population is conserved; its drift measures accumulated numerical error.
inline ConservationResiduals conservation_residuals(const TwoLevelState& s,
                                                    const TwoLevelState& initial) {
  if (!(s.grid == initial.grid))
    throw std::invalid_argument("residuals: states live on different grids");
  auto invariant = [](const TwoLevelState& st) {
    const auto [pg, pe] = level_momenta(st);
    const auto [ng, ne] = populations(st);
    (void)ng;
    return std::pair{pg + pe - ne, ne};
  };
  const double norm_now = population_norm(s);
  const double norm_ref = population_norm(initial);
  const auto [mom_now, ne_now] = invariant(s);
  const auto [mom_ref, ne_ref] = invariant(initial);
  (void)ne_now;
  (void)ne_ref;
  return {std::abs(norm_now - norm_ref), std::abs(mom_now - mom_ref)};
}

// Full record at the state's current time.
inline ObservableRecord observe(const TwoLevelState& s) {
  ObservableRecord r;
  r.tau = s.tau;
  std::tie(r.n_g, r.n_e) = populations(s);
  std::tie(r.p_mean_g, r.p_mean_e) = level_momenta(s);
  std::tie(r.e_kin_g, r.e_kin_e, r.e_kin_total) = level_kinetic(s);
  if (r.n_g > population_epsilon) {
    r.p_norm_g = r.p_mean_g / r.n_g;
    r.e_norm_g = r.e_kin_g / r.n_g;
  }
  if (r.n_e > population_epsilon) {
    r.p_norm_e = r.p_mean_e / r.n_e;
    r.e_norm_e = r.e_kin_e / r.n_e;
  }
  return r;
}

} // namespace camel
