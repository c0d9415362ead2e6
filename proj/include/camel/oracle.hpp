#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "camel/propagator.hpp"
#include "camel/state.hpp"
#include "camel/units.hpp"

namespace camel {

// Brute-force reference integrator for the coupled family amplitudes,
// independent of the closed-form propagator. It integrates the interaction
// picture equations
//
//   i da/dtau = -(rabi/2) e^{-i alpha tau} b
//   i db/dtau = -(rabi/2) e^{+i alpha tau} a
//
// with fixed-step RK4 (or adaptive step doubling), so the only thing the two
// paths share is the problem statement.
struct OdeSettings {
  double step = 0.0;      // fixed-step mode when > 0
  double tolerance = 0.0; // adaptive mode when > 0; must be <= 1e-6
};

inline void validate(const OdeSettings& s) {
  const bool fixed = s.step > 0.0;
  const bool adaptive = s.tolerance > 0.0;
  if (fixed == adaptive)
    throw std::invalid_argument(
        "ode settings: set exactly one of step or tolerance");
  if (adaptive && s.tolerance > 1e-6)
    throw std::invalid_argument("ode settings: tolerance must be <= 1e-6");
}

// Default fixed step for a grid whose fastest family oscillates at beta_max:
// comfortably over a thousand steps per oscillation, capped at 1e-3.
inline double default_step(double beta_max) {
  return beta_max > 5.0 ? 0.005 / beta_max : 1e-3;
}

namespace detail {

struct FamilyRhs {
  double half_rabi;
  double alpha;
  // y' = f(y) with the oscillating coupling phase e^{-i alpha tau} supplied
  // by the caller.
  std::pair<cplx, cplx> operator()(const cplx& a, const cplx& b,
                                   const cplx& phase_minus) const {
    return {cplx{0.0, half_rabi} * phase_minus * b,
            cplx{0.0, half_rabi} * std::conj(phase_minus) * a};
  }
};

inline void rk4_step(const FamilyRhs& rhs, cplx& a, cplx& b, double h,
                     const cplx& ph0, const cplx& ph_half, const cplx& ph1) {
  const auto [k1a, k1b] = rhs(a, b, ph0);
  const auto [k2a, k2b] = rhs(a + 0.5 * h * k1a, b + 0.5 * h * k1b, ph_half);
  const auto [k3a, k3b] = rhs(a + 0.5 * h * k2a, b + 0.5 * h * k2b, ph_half);
  const auto [k4a, k4b] = rhs(a + h * k3a, b + h * k3b, ph1);
  a += h / 6.0 * (k1a + 2.0 * (k2a + k3a) + k4a);
  b += h / 6.0 * (k1b + 2.0 * (k2b + k3b) + k4b);
}

inline std::pair<cplx, cplx> integrate_fixed(cplx a, cplx b, double alpha,
                                             double rabi, double tau_end,
                                             double step) {
  const auto n = static_cast<unsigned long long>(std::ceil(tau_end / step));
  if (n == 0) return {a, b};
  const double h = tau_end / static_cast<double>(n);
  const FamilyRhs rhs{0.5 * rabi, alpha};
  const cplx rot_half = std::polar(1.0, -alpha * 0.5 * h);
  const cplx rot_full = rot_half * rot_half;
  cplx ph = 1.0;
  double t = 0.0;
  for (unsigned long long i = 0; i < n; ++i) {
    // refresh the accumulated phase now and then to stop roundoff drift
    if ((i & 511ull) == 0ull) {
      t = static_cast<double>(i) * h;
      ph = std::polar(1.0, -alpha * t);
    }
    rk4_step(rhs, a, b, h, ph, ph * rot_half, ph * rot_full);
    ph *= rot_full;
  }
  return {a, b};
}

inline std::pair<cplx, cplx> integrate_adaptive(cplx a, cplx b, double alpha,
                                                double rabi, double tau_end,
                                                double tol) {
  const FamilyRhs rhs{0.5 * rabi, alpha};
  auto phase_at = [alpha](double t) { return std::polar(1.0, -alpha * t); };
  const double rate = std::max(std::abs(alpha), rabi);
  double h = rate > 0.0 ? std::min(tau_end, 0.1 / rate) : tau_end;
  double t = 0.0;
  while (t < tau_end) {
    h = std::min(h, tau_end - t);
    // one full step against two half steps
    cplx a1 = a, b1 = b;
    rk4_step(rhs, a1, b1, h, phase_at(t), phase_at(t + 0.5 * h), phase_at(t + h));
    cplx a2 = a, b2 = b;
    rk4_step(rhs, a2, b2, 0.5 * h, phase_at(t), phase_at(t + 0.25 * h),
             phase_at(t + 0.5 * h));
    rk4_step(rhs, a2, b2, 0.5 * h, phase_at(t + 0.5 * h),
             phase_at(t + 0.75 * h), phase_at(t + h));
    const double err =
        std::max(std::abs(a2 - a1), std::abs(b2 - b1)) / 15.0;
    const double budget = tol * (h / tau_end);
    if (err <= budget || h <= 1e-12 * tau_end) {
      t += h;
      a = a2 + (a2 - a1) / 15.0;
      b = b2 + (b2 - b1) / 15.0;
    }
    const double scale =
        err > 0.0 ? 0.9 * std::pow(budget / err, 0.2) : 4.0;
    h *= std::clamp(scale, 0.25, 4.0);
  }
  return {a, b};
}

} // namespace detail

// Integrate one family from (a0, b0) to tau_end. Returns the interaction
// picture amplitudes; population |a|^2 + |b|^2 is monitored and a drift
// beyond 1e-6 is reported as an accuracy error.
inline std::pair<cplx, cplx> integrate_family(cplx a0, cplx b0, double p,
                                              double tau_end,
                                              const SimParams& params,
                                              const OdeSettings& settings) {
  validate(settings);
  if (!(tau_end >= 0.0))
    throw std::invalid_argument("oracle: tau_end must be >= 0");
  const double alpha = generalized_detuning(p, params);
  const auto [a, b] =
      settings.step > 0.0
          ? detail::integrate_fixed(a0, b0, alpha, params.rabi, tau_end,
                                    settings.step)
          : detail::integrate_adaptive(a0, b0, alpha, params.rabi, tau_end,
                                       settings.tolerance);
  const double drift =
      std::abs((std::norm(a) + std::norm(b)) - (std::norm(a0) + std::norm(b0)));
  if (drift > 1e-6)
    throw std::runtime_error(
        "oracle: population drifted by more than 1e-6; use a smaller step");
  return {a, b};
}

// Map interaction-picture amplitudes into the rotating frame the analytic
// propagator works in (kinetic phases restored, optical scale dropped).
inline std::pair<cplx, cplx> to_rotating_frame(cplx a_bar, cplx b_bar, double p,
                                               double tau,
                                               const SimParams& params) {
  const double alpha = generalized_detuning(p, params);
  const double kin = kinetic_mean(p);
  return {std::polar(1.0, -(kin - 0.5 * alpha) * tau) * a_bar,
          std::polar(1.0, -(kin + 0.5 * alpha) * tau) * b_bar};
}

// Max absolute difference, over grid points and both components, between the
// analytic propagator and the brute-force integration of the same state.
inline double compare_propagators(const TwoLevelState& initial, double tau_end,
                                  const SimParams& params,
                                  const OdeSettings& settings,
                                  unsigned threads = 1) {
  validate(settings);
  const std::size_t n = initial.grid.size();
  std::vector<double> err(n, 0.0);
  detail::parallel_for(n, threads, [&](std::size_t j) {
    const double p = initial.grid.point(j);
    const FamilyMatrix u = family_matrix(p, tau_end, params);
    const cplx a_exact = u[0] * initial.a[j] + u[1] * initial.b[j];
    const cplx b_exact = u[2] * initial.a[j] + u[3] * initial.b[j];
    const auto [a_bar, b_bar] = integrate_family(
        initial.a[j], initial.b[j], p, tau_end, params, settings);
    const auto [a_ode, b_ode] =
        to_rotating_frame(a_bar, b_bar, p, tau_end, params);
    err[j] = std::max(std::abs(a_ode - a_exact), std::abs(b_ode - b_exact));
  });
  double worst = 0.0;
  for (double e : err) worst = std::max(worst, e);
  return worst;
}

} // namespace camel
