#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace vslow::detail {

// In-place LU solve with partial pivoting for tiny dense complex systems.
// A is row-major N x N, b length N; the solution overwrites b.  Returns
// false when a pivot vanishes.  This is the hot path of the velocity scans,
// where Eigen's general pivoted LU spends more time in dispatch than in
// arithmetic.
template <int N>
bool lu_solve_inplace(std::complex<double>* a, std::complex<double>* b) {
  using C = std::complex<double>;
  for (int k = 0; k < N; ++k) {
    int piv = k;
    double best = std::abs(a[k * N + k].real()) + std::abs(a[k * N + k].imag());
    for (int i = k + 1; i < N; ++i) {
      const double m = std::abs(a[i * N + k].real()) + std::abs(a[i * N + k].imag());
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best == 0.0) return false;
    if (piv != k) {
      for (int j = k; j < N; ++j) std::swap(a[k * N + j], a[piv * N + j]);
      std::swap(b[k], b[piv]);
    }
    const C inv_pivot = 1.0 / a[k * N + k];
    for (int i = k + 1; i < N; ++i) {
      const C f = a[i * N + k] * inv_pivot;
      if (f == C(0.0, 0.0)) continue;
      a[i * N + k] = f;
      for (int j = k + 1; j < N; ++j) a[i * N + j] -= f * a[k * N + j];
      b[i] -= f * b[k];
    }
  }
  for (int i = N - 1; i >= 0; --i) {
    C s = b[i];
    for (int j = i + 1; j < N; ++j) s -= a[i * N + j] * b[j];
    b[i] = s / a[i * N + i];
  }
  return true;
}

}  // namespace vslow::detail
