#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "vslow/errors.hpp"
#include "vslow/system.hpp"

// Optical Bloch equations of the pump-dressed V system in the frame
// co-rotating with the pump.  With the field
//
//   E(t) = eps2 cos(k2 z - w2 t) + [eps1/2 e^{i(k1 z - w1 t)} + c.c.]
//
// and slow variables s_ab = rho_ab e^{-i(k2 z - w2 t)},
// s_db = rho_db e^{-i(k2 z - w2 t)}, s_ad = rho_ad, the rotating-wave
// equations are (hbar = 1, u(t) = eps2/2 + eps1/2 e^{-i(w1-w2)t} at z = 0):
//
//   s_aa' = -G_aa s_aa + i d_ba (u s_ba - u* s_ab)
//   s_dd' = -G_dd s_dd + i d_bd (u s_bd - u* s_db)
//   s_bb' =  G_aa s_aa + G_dd s_dd - (population drive terms above)
//   s_ab' = [i(w2 - w_ab) - G_ba] s_ab + i u [d_ba (s_bb - s_aa) - d_bd s_ad]
//   s_db' = [i(w2 - w_db) - G_bd] s_db + i u [d_bd (s_bb - s_dd) - d_ba s_da]
//   s_ad' = [i w_da - G_ad] s_ad + i u d_ba s_bd - i u* d_bd s_ab
//
// plus conjugates.  All spontaneous emission feeds b, so the trace is
// conserved and s_bb is eliminated through closure.  For counter-propagating
// beams the eps1* driving terms carry a spatial factor exp[i(k2-k1)z] that
// averages to zero over the sample, so the linear response keeps only the
// eps1 terms.

namespace vslow {

using complexd = std::complex<double>;
using Mat8 = Eigen::Matrix<complexd, 8, 8>;
using Vec8 = Eigen::Matrix<complexd, 8, 1>;

// Laser frequencies seen by one velocity class.
struct VelocityFrame {
  double omega1 = 0.0;
  double omega2 = 0.0;
};

// Frame of an atom with probe-frame Doppler shift k1*v; the pump shift
// follows from the wavevector ratio.
inline VelocityFrame atom_frame(const DriveConfig& drive, double k1v) {
  return {drive.omega1 - k1v, drive.omega2 - (drive.k2 / drive.k1) * k1v};
}

// Complex 3x3 density matrix over basis (b, a, d).
class DensityMatrix {
 public:
  DensityMatrix() { m_.setZero(); }
  explicit DensityMatrix(const Eigen::Matrix3cd& m) : m_(m) {}

  static DensityMatrix ground_state() {
    DensityMatrix s;
    s.m_(0, 0) = 1.0;
    return s;
  }

  const Eigen::Matrix3cd& matrix() const { return m_; }
  Eigen::Matrix3cd& matrix() { return m_; }

  complexd bb() const { return m_(0, 0); }
  complexd aa() const { return m_(1, 1); }
  complexd dd() const { return m_(2, 2); }
  complexd ba() const { return m_(0, 1); }
  complexd ab() const { return m_(1, 0); }
  complexd bd() const { return m_(0, 2); }
  complexd db() const { return m_(2, 0); }
  complexd ad() const { return m_(1, 2); }
  complexd da() const { return m_(2, 1); }

  double hermiticity_error() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  }
  double trace_error() const { return std::abs(m_.trace() - complexd(1.0, 0.0)); }

  bool is_physical(double tol = 1e-10) const {
    if (hermiticity_error() > tol) return false;
    if (trace_error() > tol) return false;
    for (int i = 0; i < 3; ++i) {
      const complexd p = m_(i, i);
      if (std::abs(p.imag()) > tol) return false;
      if (p.real() < -tol || p.real() > 1.0 + tol) return false;
    }
    return true;
  }

 private:
  Eigen::Matrix3cd m_;  // row/col order (b, a, d)
};

// First-order density-matrix corrections at one Fourier detuning, per unit
// probe amplitude.
struct LinearResponse {
  double omega = 0.0;  // Fourier argument the solve was done at
  complexd aa, dd, bb;
  complexd ab, ba, db, bd, ad, da;

  complexd closure_error() const { return aa + bb + dd; }
};

namespace detail {

// Component order of the reduced 8-dimensional state (s_bb eliminated).
enum ComponentIndex : int {
  I_AA = 0,
  I_DD = 1,
  I_AB = 2,
  I_BA = 3,
  I_DB = 4,
  I_BD = 5,
  I_AD = 6,
  I_DA = 7,
};

struct BlochSystem {
  Mat8 A;   // homogeneous part, y' = A y (+ inhomogeneity)
  Vec8 c0;  // constant term produced by s_bb = 1 - s_aa - s_dd
};

// Assemble the pump-only equations of motion in the reduced basis.
inline BlochSystem assemble(const AtomicSystem& atom, double eps2, const VelocityFrame& f) {
  const complexd I(0.0, 1.0);
  const double ra = 0.5 * eps2 * atom.d_ba;  // half Rabi couplings
  const double rd = 0.5 * eps2 * atom.d_bd;
  const double da = f.omega2 - atom.omega_ab;   // pump detuning from b->a
  const double dd = f.omega2 - atom.omega_db(); // pump detuning from b->d

  BlochSystem s;
  s.A.setZero();
  s.c0.setZero();
  Mat8& A = s.A;

  A(I_AA, I_AA) = -atom.gamma_aa;
  A(I_AA, I_BA) = I * ra;
  A(I_AA, I_AB) = -I * ra;

  A(I_DD, I_DD) = -atom.gamma_dd;
  A(I_DD, I_BD) = I * rd;
  A(I_DD, I_DB) = -I * rd;

  A(I_AB, I_AB) = complexd(-atom.gamma_ba, da);
  A(I_AB, I_AA) = -2.0 * I * ra;
  A(I_AB, I_DD) = -I * ra;
  A(I_AB, I_AD) = -I * rd;
  s.c0(I_AB) = I * ra;

  A(I_BA, I_BA) = complexd(-atom.gamma_ba, -da);
  A(I_BA, I_AA) = 2.0 * I * ra;
  A(I_BA, I_DD) = I * ra;
  A(I_BA, I_DA) = I * rd;
  s.c0(I_BA) = -I * ra;

  A(I_DB, I_DB) = complexd(-atom.gamma_bd, dd);
  A(I_DB, I_AA) = -I * rd;
  A(I_DB, I_DD) = -2.0 * I * rd;
  A(I_DB, I_DA) = -I * ra;
  s.c0(I_DB) = I * rd;

  A(I_BD, I_BD) = complexd(-atom.gamma_bd, -dd);
  A(I_BD, I_AA) = I * rd;
  A(I_BD, I_DD) = 2.0 * I * rd;
  A(I_BD, I_AD) = I * ra;
  s.c0(I_BD) = -I * rd;

  A(I_AD, I_AD) = complexd(-atom.gamma_ad, atom.omega_da);
  A(I_AD, I_BD) = I * ra;
  A(I_AD, I_AB) = -I * rd;

  A(I_DA, I_DA) = complexd(-atom.gamma_ad, -atom.omega_da);
  A(I_DA, I_DB) = -I * ra;
  A(I_DA, I_BA) = I * rd;
  return s;
}

inline Vec8 reduced_state(const DensityMatrix& s) {
  Vec8 y;
  y(I_AA) = s.aa();
  y(I_DD) = s.dd();
  y(I_AB) = s.ab();
  y(I_BA) = s.ba();
  y(I_DB) = s.db();
  y(I_BD) = s.bd();
  y(I_AD) = s.ad();
  y(I_DA) = s.da();
  return y;
}

inline DensityMatrix full_state(const Vec8& y) {
  Eigen::Matrix3cd m;
  m(0, 0) = 1.0 - y(I_AA) - y(I_DD);
  m(1, 1) = y(I_AA);
  m(2, 2) = y(I_DD);
  m(1, 0) = y(I_AB);
  m(0, 1) = y(I_BA);
  m(2, 0) = y(I_DB);
  m(0, 2) = y(I_BD);
  m(1, 2) = y(I_AD);
  m(2, 1) = y(I_DA);
  return DensityMatrix(m);
}

// Max-norm of the stationary equations evaluated at y.
inline double stationary_residual(const BlochSystem& sys, const Vec8& y) {
  return (sys.A * y + sys.c0).cwiseAbs().maxCoeff();
}

// Scale-free residual used for consistency checks: absolute residuals are
// tiny in a.u. regardless of correctness, so normalize by the equation scale.
inline double scaled_residual(const BlochSystem& sys, const Vec8& y) {
  double scale = 0.0;
  for (int i = 0; i < 8; ++i) {
    double row = std::abs(sys.c0(i));
    for (int j = 0; j < 8; ++j) row += std::abs(sys.A(i, j));
    scale = std::max(scale, row);
  }
  if (scale == 0.0) return 0.0;
  return stationary_residual(sys, y) / scale;
}

// Driving vector of the linearized equations: the terms proportional to
// eps1/2 e^{-i beat t}, evaluated on the pump-only steady state, with unit
// probe amplitude.
inline Vec8 response_drive(const AtomicSystem& atom, const DensityMatrix& s0) {
  const complexd I(0.0, 1.0);
  const double ha = 0.5 * atom.d_ba;
  const double hd = 0.5 * atom.d_bd;
  Vec8 b;
  b.setZero();
  b(I_AA) = I * ha * s0.ba();
  b(I_DD) = I * hd * s0.bd();
  b(I_AB) = I * ha * (s0.bb() - s0.aa()) - I * hd * s0.ad();
  b(I_DB) = I * hd * (s0.bb() - s0.dd()) - I * ha * s0.da();
  b(I_AD) = I * ha * s0.bd();
  b(I_DA) = I * hd * s0.ba();
  return b;
}

// Driving vector of the discarded eps1* terms.  Only used by tests to verify
// the conjugation symmetry s'_ij(w) = conj(s'_ji(-w)) across the two
// subsystems.
inline Vec8 response_drive_conjugate(const AtomicSystem& atom, const DensityMatrix& s0) {
  const complexd I(0.0, 1.0);
  const double ha = 0.5 * atom.d_ba;
  const double hd = 0.5 * atom.d_bd;
  Vec8 b;
  b.setZero();
  b(I_AA) = -I * ha * s0.ab();
  b(I_DD) = -I * hd * s0.db();
  b(I_BA) = -I * ha * (s0.bb() - s0.aa()) + I * hd * s0.da();
  b(I_BD) = -I * hd * (s0.bb() - s0.dd()) + I * ha * s0.ad();
  b(I_AD) = -I * hd * s0.ab();
  b(I_DA) = -I * ha * s0.db();
  return b;
}

// Solve (A + i Omega) s = -b for the response amplitudes.
inline Vec8 solve_response(const Mat8& A, const Vec8& b, double omega) {
  Mat8 M = A;
  const complexd shift(0.0, omega);
  for (int i = 0; i < 8; ++i) M(i, i) += shift;
  Vec8 s = M.partialPivLu().solve(-b);
  if (!s.allFinite())
    throw numerical_error("linear response solve produced non-finite values (singular system)");
  return s;
}

}  // namespace detail

// Stationary pump-dressed density matrix for one velocity class.
inline DensityMatrix steady_state(const AtomicSystem& atom, double eps2,
                                  const VelocityFrame& frame) {
  atom.validate();
  if (!(eps2 >= 0.0)) throw std::invalid_argument("steady_state: eps2 must be >= 0");
  if (!(atom.gamma_aa > 0.0 && atom.gamma_dd > 0.0 && atom.gamma_ba > 0.0 &&
        atom.gamma_bd > 0.0 && atom.gamma_ad > 0.0)) {
    throw numerical_error(
        "steady_state: singular stationary system (all relaxation rates must be > 0 "
        "for a unique steady state)");
  }
  const detail::BlochSystem sys = detail::assemble(atom, eps2, frame);
  const Vec8 y = sys.A.partialPivLu().solve(-sys.c0);
  if (!y.allFinite()) throw numerical_error("steady_state: solver returned non-finite values");

  const double res = detail::stationary_residual(sys, y);
  if (res > 1e-12) {
    std::ostringstream msg;
    msg << "steady_state: stationary residual " << res << " exceeds 1e-12";
    throw numerical_error(msg.str());
  }
  DensityMatrix s = detail::full_state(y);
  if (!s.is_physical(1e-10))
    throw numerical_error("steady_state: solution violates hermiticity/trace bounds");
  return s;
}

// Probe tone added on top of the pump for time integration: a monochromatic
// component of amplitude eps1 at Fourier offset omega from the probe carrier.
struct ProbeTone {
  double eps1 = 0.0;
  double omega = 0.0;
};

// Fastest rate appearing in the rotating-frame equations for this drive.
inline double fastest_rate(const AtomicSystem& atom, double eps2, const VelocityFrame& frame,
                           const ProbeTone& probe = {}) {
  const double beat = frame.omega1 - frame.omega2 + probe.omega;
  return std::max({atom.gamma_aa, atom.gamma_dd, atom.gamma_ba, atom.gamma_bd, atom.gamma_ad,
                   std::abs(frame.omega2 - atom.omega_ab),
                   std::abs(frame.omega2 - atom.omega_db()), atom.omega_da,
                   0.5 * eps2 * atom.d_ba, 0.5 * eps2 * atom.d_bd,
                   0.5 * probe.eps1 * atom.d_ba, std::abs(beat)});
}

inline double suggested_dt(const AtomicSystem& atom, double eps2, const VelocityFrame& frame,
                           const ProbeTone& probe = {}) {
  return 0.05 / fastest_rate(atom, eps2, frame, probe);
}

// Integrate the full equations of motion with an explicit fourth-order
// Runge-Kutta scheme.  Serves as the independent oracle for steady_state and
// linear_response; for autonomous linear systems the RK4 fixed point is the
// exact steady state, so no truncation bias survives the transient.
// t_start fixes the probe-tone phase origin so trajectories can be continued
// across calls.
inline DensityMatrix time_evolve(const AtomicSystem& atom, double eps2,
                                 const VelocityFrame& frame, const ProbeTone& probe,
                                 const DensityMatrix& sigma0, double t_final, double dt,
                                 double t_start = 0.0) {
  atom.validate();
  if (!(t_final >= 0.0) || !(dt > 0.0))
    throw std::invalid_argument("time_evolve: need t_final >= 0 and dt > 0");

  const double beat = frame.omega1 - frame.omega2 + probe.omega;
  const double fmax = fastest_rate(atom, eps2, frame, probe);
  if (dt * fmax > 0.1)
    throw std::invalid_argument("time_evolve: dt too large for the fastest rate in the frame");

  const complexd I(0.0, 1.0);
  const double dba = atom.d_ba, dbd = atom.d_bd;
  const double w2a = frame.omega2 - atom.omega_ab;
  const double w2d = frame.omega2 - atom.omega_db();

  auto rhs = [&](const Eigen::Matrix3cd& s, double t) {
    const complexd u = 0.5 * eps2 + 0.5 * probe.eps1 * std::exp(complexd(0.0, -beat * t));
    const complexd uc = std::conj(u);
    const complexd s_bb = s(0, 0), s_aa = s(1, 1), s_dd = s(2, 2);
    const complexd s_ab = s(1, 0), s_ba = s(0, 1);
    const complexd s_db = s(2, 0), s_bd = s(0, 2);
    const complexd s_ad = s(1, 2), s_da = s(2, 1);

    const complexd pump_a = I * dba * (u * s_ba - uc * s_ab);
    const complexd pump_d = I * dbd * (u * s_bd - uc * s_db);

    Eigen::Matrix3cd ds;
    ds(1, 1) = -atom.gamma_aa * s_aa + pump_a;
    ds(2, 2) = -atom.gamma_dd * s_dd + pump_d;
    ds(0, 0) = atom.gamma_aa * s_aa + atom.gamma_dd * s_dd - pump_a - pump_d;
    ds(1, 0) = complexd(-atom.gamma_ba, w2a) * s_ab + I * u * (dba * (s_bb - s_aa) - dbd * s_ad);
    ds(0, 1) = complexd(-atom.gamma_ba, -w2a) * s_ba - I * uc * (dba * (s_bb - s_aa) - dbd * s_da);
    ds(2, 0) = complexd(-atom.gamma_bd, w2d) * s_db + I * u * (dbd * (s_bb - s_dd) - dba * s_da);
    ds(0, 2) = complexd(-atom.gamma_bd, -w2d) * s_bd - I * uc * (dbd * (s_bb - s_dd) - dba * s_ad);
    ds(1, 2) = complexd(-atom.gamma_ad, atom.omega_da) * s_ad + I * (u * dba * s_bd - uc * dbd * s_ab);
    ds(2, 1) = complexd(-atom.gamma_ad, -atom.omega_da) * s_da - I * (uc * dba * s_db - u * dbd * s_ba);
    return ds;
  };

  Eigen::Matrix3cd s = sigma0.matrix();
  const auto n_steps = static_cast<long long>(std::ceil(t_final / dt - 1e-12));
  const double h = n_steps > 0 ? t_final / static_cast<double>(n_steps) : dt;
  double t = t_start;
  for (long long step = 0; step < n_steps; ++step) {
    const Eigen::Matrix3cd k1 = rhs(s, t);
    const Eigen::Matrix3cd k2 = rhs(s + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::Matrix3cd k3 = rhs(s + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::Matrix3cd k4 = rhs(s + h * k3, t + h);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return DensityMatrix(s);
}

// First-order response at Fourier argument omega, per unit probe amplitude.
// sigma0 must be the steady state of the same pump/frame.
inline LinearResponse linear_response(const AtomicSystem& atom, const DensityMatrix& sigma0,
                                      double eps2, const VelocityFrame& frame, double omega,
                                      double probe_normalization = 1.0) {
  const detail::BlochSystem sys = detail::assemble(atom, eps2, frame);
  const Vec8 y0 = detail::reduced_state(sigma0);
  const double mismatch = detail::scaled_residual(sys, y0);
  if (mismatch > 1e-8) {
    std::ostringstream msg;
    msg << "linear_response: sigma0 is not the steady state of this drive "
        << "(scaled residual " << mismatch << ")";
    throw numerical_error(msg.str());
  }
  const Vec8 b = detail::response_drive(atom, sigma0) * probe_normalization;
  Vec8 s = detail::solve_response(sys.A, b, omega);
  if (probe_normalization != 1.0) s /= probe_normalization;

  LinearResponse r;
  r.omega = omega;
  r.aa = s(detail::I_AA);
  r.dd = s(detail::I_DD);
  r.bb = -r.aa - r.dd;
  r.ab = s(detail::I_AB);
  r.ba = s(detail::I_BA);
  r.db = s(detail::I_DB);
  r.bd = s(detail::I_BD);
  r.ad = s(detail::I_AD);
  r.da = s(detail::I_DA);
  return r;
}

}  // namespace vslow
