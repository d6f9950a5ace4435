#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "vslow/bloch.hpp"
#include "vslow/detail/numerics.hpp"
#include "vslow/detail/parallel.hpp"
#include "vslow/errors.hpp"
#include "vslow/system.hpp"
#include "vslow/twolevel.hpp"

// Single-velocity susceptibility, Gaussian velocity average, group index and
// peak counting.  In atomic units eps0 = 1/(4 pi), so the susceptibility
// prefactor 2 N / eps0 is written 8 pi N; the factor of 2 compensates the 1/2
// folded into the field definitions.

namespace vslow {

struct FrequencyGrid {
  double omega_min = 0.0;
  double omega_max = 0.0;
  int n = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("FrequencyGrid: need at least one point");
    if (n == 1) {
      if (omega_min != omega_max)
        throw std::invalid_argument("FrequencyGrid: single-point grid needs min == max");
    } else if (!(omega_min < omega_max)) {
      throw std::invalid_argument("FrequencyGrid: omega_min must be < omega_max");
    }
  }
  double spacing() const { return n > 1 ? (omega_max - omega_min) / (n - 1) : 0.0; }
  double point(int i) const { return omega_min + spacing() * i; }
};

struct SusceptibilitySpectrum {
  enum class Kind { single_velocity, doppler_averaged };

  std::vector<double> omega;
  std::vector<complexd> chi;
  Kind kind = Kind::doppler_averaged;

  double spacing() const {
    return omega.size() > 1 ? (omega.back() - omega.front()) / double(omega.size() - 1) : 0.0;
  }

  void validate() const {
    if (omega.size() != chi.size())
      throw std::invalid_argument("SusceptibilitySpectrum: grid/value size mismatch");
    const double h = spacing();
    for (std::size_t i = 0; i + 1 < omega.size(); ++i) {
      const double step = omega[i + 1] - omega[i];
      if (!(step > 0.0) || std::abs(step - h) > 1e-12 * std::max(std::abs(h), 1e-300))
        throw std::invalid_argument("SusceptibilitySpectrum: grid not uniformly increasing");
    }
    for (const complexd& c : chi)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw numerical_error("SusceptibilitySpectrum: non-finite value");
  }
};

struct GroupIndexSpectrum {
  std::vector<double> omega;
  std::vector<double> n_g;
};

// Velocity-quadrature controls, all in units of the Doppler width D.
struct QuadratureConfig {
  double v_max = 4.0;        // integration cut-off |v|/D
  double node_factor = 1.0;  // multiplies the default node density
  double tol = 1e-4;         // relative convergence target of the average
  int max_refinements = 2;   // density doublings tried past the certification pair
};

inline complexd chi_prefactor_times(const AtomicSystem& atom, double density, complexd s_ab,
                                    complexd s_db) {
  return 8.0 * pi * density * (atom.d_ba * s_ab + atom.d_bd * s_db);
}

// chi(omega, w1, w2) for one velocity class, velocities expressed as v/D.
inline complexd chi_single_velocity(const AtomicSystem& atom, const DriveConfig& drive,
                                    const MediumConfig& medium, double v_scaled, double omega) {
  const VelocityFrame frame = atom_frame(drive, medium.doppler_k1d * v_scaled);
  const DensityMatrix s0 = steady_state(atom, drive.eps2, frame);
  const detail::BlochSystem sys = detail::assemble(atom, drive.eps2, frame);
  const Vec8 b = detail::response_drive(atom, s0);
  const double Omega = omega + frame.omega1 - frame.omega2;
  const Vec8 s = detail::solve_response(sys.A, b, Omega);
  return chi_prefactor_times(atom, medium.density, s(detail::I_AB), s(detail::I_DB));
}

namespace detail {

// Narrowest rate scale that sets the velocity-space feature width.
inline double velocity_feature_rate(const AtomicSystem& atom) {
  return std::min(std::min(atom.gamma_aa, atom.gamma_dd),
                  2.0 * std::min(atom.gamma_ba, atom.gamma_bd));
}

struct VelocityNodes {
  std::vector<double> x;              // v/D in [-v_max, v_max]
  std::vector<double> weight_fine;    // Simpson x Gaussian/sqrt(pi)
  std::vector<double> weight_coarse;  // same at half density (even indices)
};

// Composite Simpson nodes over [-v_max, v_max].  The fine grid doubles the
// base density so every evaluation also yields the half-density sum used to
// certify convergence.  `level` doubles the base density again per step.
inline VelocityNodes make_velocity_nodes(double feature_rate, double k1d,
                                         const QuadratureConfig& quad, int level) {
  const double dx0 = feature_rate / (10.0 * quad.node_factor * k1d);
  long n1 = static_cast<long>(std::ceil(2.0 * quad.v_max / dx0));
  n1 += n1 % 2;
  if (n1 < 16) n1 = 16;
  n1 <<= level;
  const long n2 = 2 * n1;

  VelocityNodes nodes;
  nodes.x.resize(n2 + 1);
  nodes.weight_fine.assign(n2 + 1, 0.0);
  nodes.weight_coarse.assign(n2 + 1, 0.0);
  const double h2 = 2.0 * quad.v_max / double(n2);
  const double h1 = 2.0 * h2;
  const double norm = 1.0 / std::sqrt(pi);
  for (long j = 0; j <= n2; ++j) {
    const double x = -quad.v_max + h2 * double(j);
    nodes.x[j] = x;
    const double g = norm * std::exp(-x * x);
    const double wf = (j == 0 || j == n2) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    nodes.weight_fine[j] = wf * (h2 / 3.0) * g;
    if (j % 2 == 0) {
      const long j1 = j / 2;
      const double wc = (j1 == 0 || j1 == n1) ? 1.0 : (j1 % 2 ? 4.0 : 2.0);
      nodes.weight_coarse[j] = wc * (h1 / 3.0) * g;
    }
  }
  return nodes;
}

// chi(Omega) of one velocity class as a partial-fraction expansion over the
// eigenmodes of the response matrix: chi = sum_j c_j / (lambda_j + i Omega).
// One eigendecomposition per node replaces one LU factorization per
// (node, frequency) pair.  Nodes whose expansion fails a cross-check against
// the direct solve fall back to LU.
template <int N>
struct PoleExpansion {
  std::array<complexd, N> pole;
  std::array<complexd, N> coeff;
  bool valid = false;

  complexd eval(double Omega) const {
    const complexd shift(0.0, Omega);
    complexd acc = 0.0;
    for (int j = 0; j < N; ++j) acc += coeff[j] / (pole[j] + shift);
    return acc;
  }
};

struct DressedNode {
  double beat = 0.0;  // omega1 - omega2 in the atom frame
  Mat8 A;
  Vec8 b;
  double density_prefactor = 0.0;  // 8 pi N folded with the dipoles below
  double d_ba = 0.0, d_bd = 0.0;
  PoleExpansion<8> pe;

  complexd chi_direct(double Omega) const {
    const Vec8 s = solve_response(A, b, Omega);
    return density_prefactor * (d_ba * s(I_AB) + d_bd * s(I_DB));
  }
  complexd chi(double Omega) const { return pe.valid ? pe.eval(Omega) : chi_direct(Omega); }
};

inline DressedNode dress_node(const AtomicSystem& atom, const DriveConfig& drive,
                              double density, double k1v, double omega_check) {
  const VelocityFrame frame = atom_frame(drive, k1v);
  const DensityMatrix s0 = steady_state(atom, drive.eps2, frame);
  DressedNode node;
  node.beat = frame.omega1 - frame.omega2;
  node.A = assemble(atom, drive.eps2, frame).A;
  node.b = response_drive(atom, s0);
  node.density_prefactor = 8.0 * pi * density;
  node.d_ba = atom.d_ba;
  node.d_bd = atom.d_bd;

  Eigen::ComplexEigenSolver<Mat8> es(node.A);
  if (es.info() == Eigen::Success) {
    const Mat8& V = es.eigenvectors();
    const Vec8 beta = V.partialPivLu().solve(node.b);
    for (int j = 0; j < 8; ++j) {
      node.pe.pole[j] = es.eigenvalues()(j);
      node.pe.coeff[j] = -node.density_prefactor *
                         (node.d_ba * V(I_AB, j) + node.d_bd * V(I_DB, j)) * beta(j);
    }
    node.pe.valid = true;
    for (const double w : {omega_check, omega_check + velocity_feature_rate(atom)}) {
      const double Omega = w + node.beat;
      const complexd direct = node.chi_direct(Omega);
      const double scale = std::max(std::abs(direct), 1e-300);
      if (std::abs(node.pe.eval(Omega) - direct) > 1e-9 * scale) {
        node.pe.valid = false;
        break;
      }
    }
  }
  return node;
}

// Shared driver: Gaussian velocity average of chi over a frequency grid with
// half-density certification and global density refinement.  `build(x)`
// dresses one velocity node, `node.chi(Omega)` evaluates it.
template <typename Node, typename BuildFn>
SusceptibilitySpectrum scan_doppler_average(const FrequencyGrid& grid,
                                            const QuadratureConfig& quad, double feature_rate,
                                            double k1d, unsigned threads, BuildFn&& build,
                                            const char* what) {
  grid.validate();
  if (!(k1d > 0.0))
    throw std::invalid_argument(std::string(what) + ": doppler_k1d must be > 0");
  if (!(feature_rate > 0.0))
    throw std::invalid_argument(std::string(what) + ": relaxation rates must be > 0");
  if (!(quad.v_max > 0.0) || !(quad.node_factor > 0.0) || !(quad.tol > 0.0))
    throw std::invalid_argument(std::string(what) + ": invalid quadrature controls");

  SusceptibilitySpectrum out;
  out.kind = SusceptibilitySpectrum::Kind::doppler_averaged;
  out.omega.resize(grid.n);
  out.chi.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) out.omega[i] = grid.point(i);

  double worst_rel = 0.0;
  for (int level = 0; level <= quad.max_refinements; ++level) {
    const VelocityNodes nodes = make_velocity_nodes(feature_rate, k1d, quad, level);
    const std::size_t n_nodes = nodes.x.size();

    std::vector<Node> table(n_nodes);
    parallel_for_index(n_nodes, threads, [&](std::size_t j) { table[j] = build(nodes.x[j]); });

    std::vector<char> converged(grid.n, 0);
    std::vector<double> rel_err(grid.n, 0.0);
    parallel_for_index(static_cast<std::size_t>(grid.n), threads, [&](std::size_t i) {
      const double omega = out.omega[i];
      std::vector<complexd> fine(n_nodes);
      std::vector<complexd> coarse((n_nodes + 1) / 2);
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const complexd chi = table[j].chi(omega + table[j].beat);
        fine[j] = chi * nodes.weight_fine[j];
        if (j % 2 == 0) coarse[j / 2] = chi * nodes.weight_coarse[j];
      }
      const complexd i_fine = pairwise_sum(fine);
      const complexd i_coarse = pairwise_sum(coarse);
      out.chi[i] = i_fine;
      const double err = std::abs(i_fine - i_coarse);
      const double scale = std::abs(i_fine);
      rel_err[i] = scale > 0.0 ? err / scale : 0.0;
      converged[i] = (err <= quad.tol * scale + 1e-300) ? 1 : 0;
    });

    worst_rel = *std::max_element(rel_err.begin(), rel_err.end());
    if (std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; })) {
      out.validate();
      return out;
    }
  }
  std::ostringstream msg;
  msg << what << ": velocity average did not reach tolerance " << quad.tol << " (achieved "
      << worst_rel << " after " << quad.max_refinements << " refinements)";
  throw numerical_error(msg.str());
}

}  // namespace detail

// Doppler-averaged susceptibility over a frequency grid.  Velocity nodes are
// dressed once and shared by all frequencies; each frequency is reduced with
// a fixed-order pairwise sum, so the output is byte-identical for any thread
// count.
inline SusceptibilitySpectrum compute_chi_spectrum(const AtomicSystem& atom,
                                                   const DriveConfig& drive,
                                                   const MediumConfig& medium,
                                                   const FrequencyGrid& grid,
                                                   const QuadratureConfig& quad = {},
                                                   unsigned threads = 0) {
  atom.validate();
  drive.validate();
  const double omega_check = grid.n > 0 ? grid.point(grid.n / 2) : 0.0;
  return detail::scan_doppler_average<detail::DressedNode>(
      grid, quad, detail::velocity_feature_rate(atom), medium.doppler_k1d, threads,
      [&](double x) {
        return detail::dress_node(atom, drive, medium.density, medium.doppler_k1d * x,
                                  omega_check);
      },
      "compute_chi_spectrum");
}

// Single-frequency convenience wrapper.
inline complexd chi_doppler_averaged(const AtomicSystem& atom, const DriveConfig& drive,
                                     const MediumConfig& medium, double omega,
                                     const QuadratureConfig& quad = {}) {
  FrequencyGrid grid{omega, omega, 1};
  return compute_chi_spectrum(atom, drive, medium, grid, quad, 1).chi.front();
}

namespace detail {

struct TwoLevelNode {
  double beat = 0.0;
  Eigen::Matrix3cd A;
  Eigen::Vector3cd b;
  double prefactor = 0.0;  // 8 pi N d
  PoleExpansion<3> pe;

  complexd chi_direct(double Omega) const {
    Eigen::Matrix3cd M = A;
    for (int i = 0; i < 3; ++i) M(i, i) += complexd(0.0, Omega);
    const Eigen::Vector3cd s = M.partialPivLu().solve(-b);
    if (!s.allFinite()) throw numerical_error("two-level response solve is singular");
    return prefactor * s(1);
  }
  complexd chi(double Omega) const { return pe.valid ? pe.eval(Omega) : chi_direct(Omega); }
};

inline TwoLevelNode dress_node_two_level(const twolevel::TwoLevelAtom& atom,
                                         const DriveConfig& drive, double density, double k1v,
                                         double omega_check) {
  const complexd I(0.0, 1.0);
  const VelocityFrame frame = atom_frame(drive, k1v);
  const auto sys = twolevel::detail2::assemble(atom, drive.eps2, frame);
  const Eigen::Vector3cd y0 = twolevel::steady_state(atom, drive.eps2, frame);
  TwoLevelNode node;
  node.beat = frame.omega1 - frame.omega2;
  node.A = sys.A;
  const double h = 0.5 * atom.dipole;
  node.b(0) = I * h * y0(2);
  node.b(1) = I * h * (1.0 - 2.0 * y0(0));
  node.b(2) = 0.0;
  node.prefactor = 8.0 * pi * density * atom.dipole;

  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(node.A);
  if (es.info() == Eigen::Success) {
    const Eigen::Matrix3cd& V = es.eigenvectors();
    const Eigen::Vector3cd beta = V.partialPivLu().solve(node.b);
    for (int j = 0; j < 3; ++j) {
      node.pe.pole[j] = es.eigenvalues()(j);
      node.pe.coeff[j] = -node.prefactor * V(1, j) * beta(j);
    }
    node.pe.valid = true;
    for (const double w : {omega_check, omega_check + atom.gamma_ee}) {
      const double Omega = w + node.beat;
      const complexd direct = node.chi_direct(Omega);
      const double scale = std::max(std::abs(direct), 1e-300);
      if (std::abs(node.pe.eval(Omega) - direct) > 1e-9 * scale) {
        node.pe.valid = false;
        break;
      }
    }
  }
  return node;
}

}  // namespace detail

// Doppler-averaged susceptibility of the reference two-level model on the
// same quadrature rule as the V-system scan.
inline SusceptibilitySpectrum compute_chi_spectrum_two_level(const twolevel::TwoLevelAtom& atom,
                                                             const DriveConfig& drive,
                                                             const MediumConfig& medium,
                                                             const FrequencyGrid& grid,
                                                             const QuadratureConfig& quad = {},
                                                             unsigned threads = 0) {
  const double feature_rate = std::min(atom.gamma_ee, 2.0 * atom.gamma_be);
  const double omega_check = grid.n > 0 ? grid.point(grid.n / 2) : 0.0;
  return detail::scan_doppler_average<detail::TwoLevelNode>(
      grid, quad, feature_rate, medium.doppler_k1d, threads,
      [&](double x) {
        return detail::dress_node_two_level(atom, drive, medium.density,
                                            medium.doppler_k1d * x, omega_check);
      },
      "compute_chi_spectrum_two_level");
}

// n_g = 1 + (omega1/2) d Re chi / d omega.  Central differences inside,
// one-sided second-order stencils at the ends.  If max_spacing > 0 the grid
// must resolve at least that spacing.
inline GroupIndexSpectrum group_index(const SusceptibilitySpectrum& spec, double omega1,
                                      double max_spacing = 0.0) {
  spec.validate();
  const std::size_t n = spec.omega.size();
  if (n < 3) throw std::invalid_argument("group_index: need at least 3 grid points");
  const double h = spec.spacing();
  if (max_spacing > 0.0 && h > max_spacing) {
    std::ostringstream msg;
    msg << "group_index: grid spacing " << h << " too coarse, need <= " << max_spacing;
    throw std::invalid_argument(msg.str());
  }

  GroupIndexSpectrum out;
  out.omega = spec.omega;
  out.n_g.resize(n);
  const double f = omega1 / 2.0;
  auto re = [&](std::size_t i) { return spec.chi[i].real(); };
  out.n_g[0] = 1.0 + f * (-3.0 * re(0) + 4.0 * re(1) - re(2)) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out.n_g[i] = 1.0 + f * (re(i + 1) - re(i - 1)) / (2.0 * h);
  out.n_g[n - 1] = 1.0 + f * (3.0 * re(n - 1) - 4.0 * re(n - 2) + re(n - 3)) / (2.0 * h);
  return out;
}

// Number of interior local maxima that rise above both neighboring valley
// minima by at least `prominence` times the global value range.
inline int count_local_maxima(std::span<const double> y, double prominence) {
  if (y.empty()) throw std::invalid_argument("count_local_maxima: empty spectrum");
  if (!(prominence > 0.0))
    throw std::invalid_argument("count_local_maxima: prominence must be > 0");
  const std::size_t n = y.size();
  if (n < 3) return 0;
  const double range =
      *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
  if (range <= 0.0) return 0;
  const double bar = prominence * range;

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (y[i] > y[i - 1] && y[i] > y[i + 1]) maxima.push_back(i);

  int count = 0;
  for (std::size_t m = 0; m < maxima.size(); ++m) {
    const std::size_t lo = (m == 0) ? 0 : maxima[m - 1];
    const std::size_t hi = (m + 1 < maxima.size()) ? maxima[m + 1] : n - 1;
    const double left_min = *std::min_element(y.begin() + lo, y.begin() + maxima[m]);
    const double right_min = *std::min_element(y.begin() + maxima[m] + 1, y.begin() + hi + 1);
    if (y[maxima[m]] - left_min >= bar && y[maxima[m]] - right_min >= bar) ++count;
  }
  return count;
}

inline int count_local_maxima(const GroupIndexSpectrum& spec, double prominence) {
  return count_local_maxima(std::span<const double>(spec.n_g.data(), spec.n_g.size()),
                            prominence);
}

}  // namespace vslow
