#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace vslow::detail {

// Pairwise tree reduction.  The summation order is a pure function of the
// element count, so parallel producers that fill the buffer by index and
// reduce with this give bit-identical results to a serial run.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  const std::size_t n = v.size();
  if (n == 0) return T{};
  if (n <= 8) {
    T acc = v[0];
    for (std::size_t i = 1; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

// Catmull-Rom cubic on a uniform grid x_i = x0 + i*h, clamped at the ends.
// Values may be real or complex; the interpolant is linear in them.
template <typename T>
T cubic_interp_uniform(double x0, double h, std::span<const T> y, double x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
  if (n < 2) throw std::invalid_argument("cubic_interp_uniform: need at least 2 points");
  double s = (x - x0) / h;
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(s);
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  const double t = s - static_cast<double>(i);
  const T p1 = y[i];
  const T p2 = y[i + 1];
  const T p0 = y[i > 0 ? i - 1 : 0];
  const T p3 = y[i + 2 < n ? i + 2 : n - 1];
  const T m1 = (p2 - p0) * 0.5;
  const T m2 = (p3 - p1) * 0.5;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return p1 * (2.0 * t3 - 3.0 * t2 + 1.0) + m1 * (t3 - 2.0 * t2 + t) +
         p2 * (-2.0 * t3 + 3.0 * t2) + m2 * (t3 - t2);
}

struct PeakEstimate {
  double position = 0.0;
  double value = 0.0;
};

// Quadratic refinement of a discrete maximum at index i of samples y on a
// uniform grid.  Degenerate (flat) neighborhoods return the grid point.
inline PeakEstimate refine_peak_quadratic(double x0, double h, std::span<const double> y,
                                          std::size_t i) {
  PeakEstimate p;
  p.position = x0 + h * static_cast<double>(i);
  p.value = y[i];
  if (i == 0 || i + 1 >= y.size()) return p;
  const double den = y[i - 1] - 2.0 * y[i] + y[i + 1];
  if (den == 0.0) return p;
  const double delta = 0.5 * (y[i - 1] - y[i + 1]) / den;
  p.position += delta * h;
  p.value = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta;
  return p;
}

}  // namespace vslow::detail
