#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "vslow/constants.hpp"

// Physical model definition for a three-level V system: ground state b
// coupled to excited states a and d by a strong pump and a weak probe.

namespace vslow {

// Level structure, dipole moments and relaxation rates, all in a.u.
// Basis order is (b, a, d) throughout the library.
struct AtomicSystem {
  double omega_ab = 0.0;  // (E_a - E_b)/hbar, > 0
  double omega_da = 0.0;  // (E_d - E_a)/hbar, >= 0
  double d_ba = 0.0;      // dipole matrix element b<->a, real > 0
  double d_bd = 0.0;      // dipole matrix element b<->d, real > 0
  double gamma_aa = 0.0;  // population decay a -> b
  double gamma_dd = 0.0;  // population decay d -> b
  double gamma_ba = 0.0;  // coherence decay b-a
  double gamma_bd = 0.0;  // coherence decay b-d
  double gamma_ad = 0.0;  // coherence decay a-d

  double omega_db() const { return omega_ab + omega_da; }

  void validate() const {
    if (!(omega_ab > 0.0)) throw std::invalid_argument("AtomicSystem: omega_ab must be > 0");
    if (!(omega_da >= 0.0)) throw std::invalid_argument("AtomicSystem: omega_da must be >= 0");
    if (!(d_ba > 0.0) || !(d_bd > 0.0))
      throw std::invalid_argument("AtomicSystem: dipole moments must be > 0");
    if (!(gamma_aa >= 0.0) || !(gamma_dd >= 0.0) || !(gamma_ba >= 0.0) ||
        !(gamma_bd >= 0.0) || !(gamma_ad >= 0.0))
      throw std::invalid_argument("AtomicSystem: relaxation rates must be >= 0");
  }
};

// Pump/probe carrier parameters and the counter-propagating geometry.
struct DriveConfig {
  double eps2 = 0.0;    // pump field amplitude
  double omega1 = 0.0;  // probe carrier angular frequency
  double omega2 = 0.0;  // pump angular frequency
  double k1 = 0.0;      // probe wavevector, > 0
  double k2 = 0.0;      // pump wavevector, < 0 (counter-propagation)

  void validate() const {
    if (!(eps2 >= 0.0)) throw std::invalid_argument("DriveConfig: eps2 must be >= 0");
    if (!(omega1 > 0.0) || !(omega2 > 0.0))
      throw std::invalid_argument("DriveConfig: carrier frequencies must be > 0");
    if (!(k1 > 0.0)) throw std::invalid_argument("DriveConfig: k1 must be > 0");
    if (!(k2 < 0.0)) throw std::invalid_argument("DriveConfig: k2 must be < 0");
  }
};

struct MediumConfig {
  double density = 0.0;      // number density N
  double doppler_k1d = 0.0;  // k1 * D, width of the velocity distribution seen by the probe
  double length = 0.0;       // sample length L

  void validate() const {
    if (!(density > 0.0)) throw std::invalid_argument("MediumConfig: density must be > 0");
    if (!(doppler_k1d > 0.0))
      throw std::invalid_argument("MediumConfig: doppler_k1d must be > 0");
    if (!(length >= 0.0)) throw std::invalid_argument("MediumConfig: length must be >= 0");
  }
};

struct ModelConfig {
  AtomicSystem atom;
  DriveConfig drive;
  MediumConfig medium;
};

// Spontaneous emission rate of a two-level transition, A = 4 w^3 d^2 / (3 c^3).
inline double emission_rate(double dipole, double omega) {
  const double c = constants().speed_of_light_au;
  return 4.0 * omega * omega * omega * dipole * dipole / (3.0 * c * c * c);
}

// Invert the emission-rate formula: the dipole moment that yields decay rate
// gamma on a transition of frequency omega, assuming decay only to the lower
// state.
inline double dipole_from_linewidth(double gamma, double omega) {
  if (!(gamma > 0.0)) throw std::domain_error("dipole_from_linewidth: gamma must be > 0");
  if (!(omega > 0.0)) throw std::domain_error("dipole_from_linewidth: omega must be > 0");
  const double c = constants().speed_of_light_au;
  return std::sqrt(3.0 * gamma * c * c * c / (4.0 * omega * omega * omega));
}

// Baseline rubidium-like parameter set: hyperfine-scale upper-level splitting,
// natural width Gamma with Gamma_ba = Gamma_bd = Gamma_ad/2 = Gamma/2, lasers
// at the midpoint between the two upper levels, counter-propagating pump.
inline ModelConfig default_paper_system() {
  ModelConfig m;
  const double Gamma = 8.63e-10;
  m.atom.omega_ab = 5.845e-2;
  m.atom.omega_da = 4.06e-8;
  m.atom.gamma_aa = Gamma;
  m.atom.gamma_dd = Gamma;
  m.atom.gamma_ba = Gamma / 2.0;
  m.atom.gamma_bd = Gamma / 2.0;
  m.atom.gamma_ad = Gamma;
  m.atom.d_ba = dipole_from_linewidth(m.atom.gamma_aa, m.atom.omega_ab);
  m.atom.d_bd = dipole_from_linewidth(m.atom.gamma_dd, m.atom.omega_db());

  m.drive.eps2 = 3.47e-10;
  m.drive.omega1 = m.atom.omega_ab + m.atom.omega_da / 2.0;  // (E_a+E_d)/2 - E_b
  m.drive.omega2 = m.drive.omega1;
  m.drive.k1 = m.drive.omega1 / constants().speed_of_light_au;
  m.drive.k2 = -m.drive.k1;

  m.medium.density = 3e-14;
  m.medium.doppler_k1d = 4.58e-8;
  m.medium.length = 1e8;
  return m;
}

}  // namespace vslow
