#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <thread>
#include <vector>

#include "camel/state.hpp"
#include "camel/units.hpp"

namespace camel {

// Generalized detuning of the family at momentum p: the field-atom detuning
// shifted by the Doppler and recoil terms, in recoil units.
inline double generalized_detuning(double p, const SimParams& params) {
  return params.detuning + 2.0 * p + 1.0;
}

// Generalized Rabi frequency: flopping rate and dressed-level splitting.
inline double generalized_rabi(double alpha, const SimParams& params) {
  return std::hypot(alpha, params.rabi);
}

inline double max_generalized_rabi(const MomentumGrid& grid,
                                   const SimParams& params) {
  // alpha is monotone in p, so the extremes sit at the grid ends.
  const double a0 = generalized_detuning(grid.p_min(), params);
  const double a1 = generalized_detuning(grid.p_max(), params);
  return std::max(generalized_rabi(a0, params), generalized_rabi(a1, params));
}

// Per-point dressed-state data. The four quasistationary frequencies of a
// family are mean_{g,e} +/- beta/2; the splitting within either level is
// beta. In the rotating frame used throughout, the optical-scale terms are
// dropped from the means, so mean_g and mean_e coincide at the common
// kinetic mean (p^2 + (p+1)^2)/2 and their difference cancels in every
// modulus-based observable.
struct DressedSpectrum {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> mean_g;
  std::vector<double> mean_e;

  double omega_g(std::size_t j) const { return mean_g[j] + 0.5 * beta[j]; }
  double omega_g_prime(std::size_t j) const { return mean_g[j] - 0.5 * beta[j]; }
  double omega_e(std::size_t j) const { return mean_e[j] + 0.5 * beta[j]; }
  double omega_e_prime(std::size_t j) const { return mean_e[j] - 0.5 * beta[j]; }
};

inline double kinetic_mean(double p) {
  return 0.5 * (p * p + (p + 1.0) * (p + 1.0));
}

inline DressedSpectrum dressed_spectrum(const MomentumGrid& grid,
                                        const SimParams& params) {
  const std::size_t n = grid.size();
  DressedSpectrum d{std::vector<double>(n), std::vector<double>(n),
                    std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const double p = grid.point(j);
    d.alpha[j] = generalized_detuning(p, params);
    d.beta[j] = generalized_rabi(d.alpha[j], params);
    d.mean_g[j] = kinetic_mean(p);
    d.mean_e[j] = d.mean_g[j];
  }
  return d;
}

// Exact propagator of one momentum family over dtau, acting on the pair
// (a(p), b(p+1)). Row-major {aa, ab, ba, bb}. With c = cos(beta dtau / 2)
// and s = sin(beta dtau / 2):
//
//   U = e^{-i K dtau} [ c + i (alpha/beta) s     i (rabi/beta) s      ]
//                     [ i (rabi/beta) s          c - i (alpha/beta) s ]
//
// where K is the family's kinetic mean. This is the manifestly unitary form
// of the four-exponential dressed-state solution; the trigonometric form
// avoids cancellation at small beta dtau.
using FamilyMatrix = std::array<cplx, 4>;

inline FamilyMatrix family_matrix(double p, double dtau,
                                  const SimParams& params) {
  const double alpha = generalized_detuning(p, params);
  const double beta = generalized_rabi(alpha, params);
  const double half = 0.5 * beta * dtau;
  const double c = std::cos(half);
  // sin(x)/beta stays finite as beta -> 0 (free family: U -> phase * I).
  const double s_over_beta = beta > 0.0 ? std::sin(half) / beta : 0.5 * dtau;
  const cplx phase = std::polar(1.0, -kinetic_mean(p) * dtau);
  const cplx diag_shift{0.0, alpha * s_over_beta};
  const cplx coupling{0.0, params.rabi * s_over_beta};
  return {phase * (c + diag_shift), phase * coupling, phase * coupling,
          phase * (c - diag_shift)};
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 2048) {
    for (std::size_t j = 0; j < n; ++j) fn(j);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t j = lo; j < hi; ++j) fn(j);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace detail

// Apply the family propagator pointwise over the grid. Families are
// independent, so the map may run on any number of threads; every slot is
// written exactly once, and results do not depend on the execution order.
inline void evolve_in_place(TwoLevelState& state, double dtau,
                            const SimParams& params, unsigned threads = 1) {
  detail::parallel_for(state.grid.size(), threads, [&](std::size_t j) {
    const FamilyMatrix u = family_matrix(state.grid.point(j), dtau, params);
    const cplx a0 = state.a[j];
    const cplx b0 = state.b[j];
    state.a[j] = u[0] * a0 + u[1] * b0;
    state.b[j] = u[2] * a0 + u[3] * b0;
  });
  state.tau += dtau;
}

inline TwoLevelState evolve(TwoLevelState state, double dtau,
                            const SimParams& params, unsigned threads = 1) {
  evolve_in_place(state, dtau, params, threads);
  return state;
}

} // namespace camel
