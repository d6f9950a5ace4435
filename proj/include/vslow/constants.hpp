#pragma once

#include <cmath>

// Atomic units (hbar = e = m_e = 1) are used for every internal quantity;
// SI shows up only at I/O boundaries.  CODATA 2018 values.

namespace vslow {

struct PhysicalConstants {
  double speed_of_light_au = 137.035999084;     // 1/alpha
  double fine_structure_alpha = 7.2973525693e-3;
  double au_time_in_seconds = 2.4188843265857e-17;
  double au_frequency_in_Hz = 4.134137333518e16;  // 1 / au_time
  double au_length_in_m = 5.29177210903e-11;      // Bohr radius
  double au_field_in_Vpm = 5.14220674763e11;
};

inline constexpr double pi = 3.14159265358979323846;

inline const PhysicalConstants& constants() {
  static const PhysicalConstants c;
  return c;
}

// Angular frequency in a.u. -> ordinary frequency nu = omega/(2 pi) in Hz.
inline double angular_frequency_au_to_Hz(double w) {
  return w * constants().au_frequency_in_Hz / (2.0 * pi);
}

inline double angular_frequency_Hz_to_au(double nu) {
  return nu * (2.0 * pi) / constants().au_frequency_in_Hz;
}

inline double length_au_to_cm(double z) {
  return z * constants().au_length_in_m * 100.0;
}

inline double length_cm_to_au(double z_cm) {
  return z_cm / (constants().au_length_in_m * 100.0);
}

inline double time_au_to_s(double t) { return t * constants().au_time_in_seconds; }

inline double time_s_to_au(double t_s) { return t_s / constants().au_time_in_seconds; }

}  // namespace vslow
