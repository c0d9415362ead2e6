#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "camel/oracle.hpp"

using Catch::Approx;
using camel::cplx;
using camel::OdeSettings;
using camel::SimParams;

namespace {

// distance between the analytic family map and the oracle, both taken to the
// rotating frame
double family_disagreement(cplx a0, cplx b0, double p, double tau,
                           const SimParams& params, const OdeSettings& s) {
  const auto u = camel::family_matrix(p, tau, params);
  const cplx a_exact = u[0] * a0 + u[1] * b0;
  const cplx b_exact = u[2] * a0 + u[3] * b0;
  const auto [a_bar, b_bar] = camel::integrate_family(a0, b0, p, tau, params, s);
  const auto [a_ode, b_ode] = camel::to_rotating_frame(a_bar, b_bar, p, tau, params);
  return std::max(std::abs(a_ode - a_exact), std::abs(b_ode - b_exact));
}

} // namespace

TEST_CASE("ode settings: exactly one mode must be selected") {
  CHECK_THROWS_AS(camel::validate(OdeSettings{}), std::invalid_argument);
  CHECK_THROWS_AS(camel::validate(OdeSettings{1e-3, 1e-8}), std::invalid_argument);
  CHECK_THROWS_AS(camel::validate(OdeSettings{0.0, 1e-5}), std::invalid_argument);
  CHECK_NOTHROW(camel::validate(OdeSettings{1e-3, 0.0}));
  CHECK_NOTHROW(camel::validate(OdeSettings{0.0, 1e-8}));
}

TEST_CASE("oracle: decoupled families stay put") {
  const SimParams params{0.0, 3.0};
  const cplx a0{0.6, 0.1}, b0{-0.3, 0.7};
  const auto [a, b] =
      camel::integrate_family(a0, b0, 1.3, 7.0, params, {1e-3, 0.0});
  CHECK(std::abs(a - a0) <= 1e-12);
  CHECK(std::abs(b - b0) <= 1e-12);
}

TEST_CASE("oracle: resonant full Rabi period returns the population") {
  // alpha = 0 at p = -1/2 with zero detuning; a 2 pi pulse flips the sign
  const SimParams params{5.0, 0.0};
  const double tau = 2.0 * std::numbers::pi / params.rabi;
  const auto [a, b] = camel::integrate_family({1.0, 0.0}, {0.0, 0.0}, -0.5, tau,
                                              params, {1e-4, 0.0});
  CHECK(std::abs(a) == Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(b) <= 1e-9);
  CHECK(a.real() == Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("oracle: fixed-step integrator is 4th order") {
  const SimParams params{4.0, 1.0};
  const cplx a0{std::sqrt(0.5), 0.0}, b0{0.0, std::sqrt(0.5)};
  const double e1 = family_disagreement(a0, b0, 0.7, 2.0, params, {0.02, 0.0});
  const double e2 = family_disagreement(a0, b0, 0.7, 2.0, params, {0.01, 0.0});
  CHECK(e1 / e2 == Approx(16.0).epsilon(0.45));
}

TEST_CASE("oracle: population conserved to 1e-10 over tau = 100 at default step") {
  for (double rabi : {5.0, 20.0, 50.0}) {
    const SimParams params{rabi, 3.0};
    const double p = 1.2;
    const double beta = camel::generalized_rabi(
        camel::generalized_detuning(p, params), params);
    const OdeSettings s{camel::default_step(beta), 0.0};
    const cplx a0{0.8, 0.0}, b0{0.0, 0.6};
    const auto [a, b] = camel::integrate_family(a0, b0, p, 100.0, params, s);
    const double drift = std::abs(std::norm(a) + std::norm(b) - 1.0);
    CHECK(drift < 1e-10);
  }
}

TEST_CASE("oracle: random families agree with the analytic propagator") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pd(-10.0, 10.0), rb(0.0, 50.0),
      det(-20.0, 20.0), taud(0.0, 10.0), phase(0.0, 2.0 * std::numbers::pi),
      mix(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double p = pd(rng);
    const SimParams params{rb(rng), det(rng)};
    const double tau = taud(rng);
    const double w = mix(rng);
    const cplx a0 = std::polar(std::sqrt(w), phase(rng));
    const cplx b0 = std::polar(std::sqrt(1.0 - w), phase(rng));
    const double beta = camel::generalized_rabi(
        camel::generalized_detuning(p, params), params);
    const OdeSettings s{std::min(1e-3, 0.003 / std::max(beta, 1e-6)), 0.0};
    CHECK(family_disagreement(a0, b0, p, tau, params, s) <= 1e-9);
  }
}

TEST_CASE("oracle: adaptive mode tracks the analytic propagator") {
  const SimParams params{20.0, -4.0};
  const cplx a0{0.6, 0.0}, b0{0.0, 0.8};
  const double err =
      family_disagreement(a0, b0, 0.3, 5.0, params, {0.0, 1e-10});
  CHECK(err <= 1e-7);
}

TEST_CASE("oracle: a reckless step triggers the accuracy error") {
  const SimParams params{40.0, 0.0};
  CHECK_THROWS_WITH(
      camel::integrate_family({1.0, 0.0}, {0.0, 0.0}, 0.0, 50.0, params,
                              {0.2, 0.0}),
      Catch::Matchers::ContainsSubstring("smaller step"));
}

TEST_CASE("compare_propagators: free evolution and resonant flopping") {
  const auto g1 = camel::build_grid(0.0, 4.0, 129);
  const auto free_state = camel::assemble_state(
      g1, camel::gaussian_amplitudes(g1, 0.0, 0.8, 0.0), {});
  const SimParams free_params{0.0, 2.0};
  CHECK(camel::compare_propagators(free_state, 10.0, free_params,
                                   {1e-3, 0.0}) <= 1e-12);

  const auto g2 = camel::build_grid(-0.5, 0.0, 1);
  const std::vector<cplx> one{cplx{1.0, 0.0}};
  const auto point = camel::assemble_state(g2, one, {});
  const SimParams res{20.0, 0.0};
  const double tau = 10.0 * std::numbers::pi / res.rabi;
  CHECK(camel::compare_propagators(point, tau, res,
                                   {camel::default_step(res.rabi), 0.0}) <= 1e-9);
}
