#pragma once

#include <Eigen/Dense>
#include <complex>

#include "vslow/bloch.hpp"
#include "vslow/errors.hpp"
#include "vslow/system.hpp"

// Reference two-level model (ground b, excited e) driven by the same
// counter-propagating pump/probe pair.  Used to check the degenerate limit of
// the V system, where the upper levels merge into one bright combination with
// dipole sqrt(d_ba^2 + d_bd^2), and as the undressed-line reference.

namespace vslow::twolevel {

struct TwoLevelAtom {
  double omega_eb = 0.0;  // transition frequency
  double dipole = 0.0;
  double gamma_ee = 0.0;  // population decay
  double gamma_be = 0.0;  // coherence decay
};

// Bright-state reduction of a degenerate V system (omega_da = 0).
inline TwoLevelAtom bright_equivalent(const AtomicSystem& atom) {
  TwoLevelAtom t;
  t.omega_eb = atom.omega_ab;
  t.dipole = std::sqrt(atom.d_ba * atom.d_ba + atom.d_bd * atom.d_bd);
  t.gamma_ee = atom.gamma_aa;
  t.gamma_be = atom.gamma_ba;
  return t;
}

namespace detail2 {

using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

// State order (s_ee, s_eb, s_be) with s_bb eliminated by closure.
struct System {
  Mat3 A;
  Vec3 c0;
};

inline System assemble(const TwoLevelAtom& atom, double eps2, const VelocityFrame& f) {
  const complexd I(0.0, 1.0);
  const double r = 0.5 * eps2 * atom.dipole;
  const double det = f.omega2 - atom.omega_eb;
  System s;
  s.A.setZero();
  s.c0.setZero();
  s.A(0, 0) = -atom.gamma_ee;
  s.A(0, 1) = -I * r;
  s.A(0, 2) = I * r;
  s.A(1, 1) = complexd(-atom.gamma_be, det);
  s.A(1, 0) = -2.0 * I * r;
  s.c0(1) = I * r;
  s.A(2, 2) = complexd(-atom.gamma_be, -det);
  s.A(2, 0) = 2.0 * I * r;
  s.c0(2) = -I * r;
  return s;
}

}  // namespace detail2

// Pump-dressed steady state, returned as (s_ee, s_eb, s_be).
inline Eigen::Vector3cd steady_state(const TwoLevelAtom& atom, double eps2,
                                     const VelocityFrame& frame) {
  const auto sys = detail2::assemble(atom, eps2, frame);
  Eigen::Vector3cd y = sys.A.partialPivLu().solve(-sys.c0);
  if (!y.allFinite()) throw numerical_error("twolevel steady_state: singular system");
  return y;
}

// chi(omega, w1, w2) of the dressed two-level atom per unit probe amplitude.
inline complexd chi_single(const TwoLevelAtom& atom, double eps2, double density,
                           const VelocityFrame& frame, double omega) {
  const complexd I(0.0, 1.0);
  const auto sys = detail2::assemble(atom, eps2, frame);
  const Eigen::Vector3cd y0 = steady_state(atom, eps2, frame);
  const double h = 0.5 * atom.dipole;
  Eigen::Vector3cd b;
  b(0) = I * h * y0(2);
  b(1) = I * h * ((1.0 - y0(0)) - y0(0));
  b(2) = 0.0;
  const double Omega = omega + frame.omega1 - frame.omega2;
  Eigen::Matrix3cd M = sys.A;
  for (int i = 0; i < 3; ++i) M(i, i) += complexd(0.0, Omega);
  const Eigen::Vector3cd s = M.partialPivLu().solve(-b);
  if (!s.allFinite()) throw numerical_error("twolevel chi_single: singular response system");
  constexpr double four_pi = 4.0 * pi;
  return 2.0 * four_pi * density * atom.dipole * s(1);
}

}  // namespace vslow::twolevel
