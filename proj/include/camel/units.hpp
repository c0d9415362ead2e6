#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace camel {

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m / s

// Laboratory-frame atom/field parameters. SI units, angular frequencies.
// Exists only at the boundary: everything downstream runs on SimParams.
struct PhysicalParams {
  double atomic_mass = 0.0;          // kg
  double wavenumber = 0.0;           // 1/m
  double transition_frequency = 0.0; // rad/s, omega_0
  double field_frequency = 0.0;      // rad/s, omega
  double rabi_frequency = 0.0;       // rad/s, Omega = 2 d E0 / hbar
};

// Dimensionless interaction parameters in recoil units: frequencies in
// omega_r = hbar k^2 / 2M, momenta in hbar k, time in 1/omega_r.
struct SimParams {
  double rabi = 0.0;     // Omega / omega_r, >= 0 (a global phase absorbs any sign)
  double detuning = 0.0; // (omega_0 - omega) / omega_r, any sign
};

struct RecoilScales {
  double omega_r = 0.0;  // hbar k^2 / 2M, rad/s
  double p_photon = 0.0; // hbar k, kg m/s
  double e_recoil = 0.0; // hbar omega_r, J
};

inline void validate(const PhysicalParams& p) {
  if (!(p.atomic_mass > 0.0) || !std::isfinite(p.atomic_mass))
    throw std::invalid_argument("physical params: atomic mass must be positive");
  if (!(p.wavenumber > 0.0) || !std::isfinite(p.wavenumber))
    throw std::invalid_argument("physical params: wavenumber must be positive");
  if (!(p.rabi_frequency >= 0.0) || !std::isfinite(p.rabi_frequency))
    throw std::invalid_argument("physical params: Rabi frequency must be >= 0");
  if (!std::isfinite(p.transition_frequency) || !std::isfinite(p.field_frequency))
    throw std::invalid_argument("physical params: frequencies must be finite");
}

inline void validate(const SimParams& p) {
  if (!(p.rabi >= 0.0) || !std::isfinite(p.rabi))
    throw std::invalid_argument("sim params: rabi must be finite and >= 0");
  if (!std::isfinite(p.detuning))
    throw std::invalid_argument("sim params: detuning must be finite");
}

// Convenience constructor: k from the vacuum wavelength, omega = c k.
inline PhysicalParams from_wavelength(double atomic_mass, double wavelength,
                                      double transition_frequency,
                                      double rabi_frequency) {
  if (!(wavelength > 0.0))
    throw std::invalid_argument("physical params: wavelength must be positive");
  const double k = 2.0 * std::numbers::pi / wavelength;
  PhysicalParams p{atomic_mass, k, transition_frequency, speed_of_light * k,
                   rabi_frequency};
  validate(p);
  return p;
}

inline RecoilScales recoil_scales(const PhysicalParams& p) {
  validate(p);
  const double omega_r =
      hbar * p.wavenumber * p.wavenumber / (2.0 * p.atomic_mass);
  return {omega_r, hbar * p.wavenumber, hbar * omega_r};
}

inline SimParams to_dimensionless(const PhysicalParams& p) {
  const RecoilScales s = recoil_scales(p);
  SimParams out{p.rabi_frequency / s.omega_r,
                (p.transition_frequency - p.field_frequency) / s.omega_r};
  validate(out);
  return out;
}

} // namespace camel
