#pragma once

#include "regkit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <string>

namespace regkit {

template <class T>
struct QuadratureResult {
  T value{};
  double error_estimate = 0.0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes at odd Kronrod indices 1, 3, 5 and the center.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }

template <class T>
struct Panel {
  double lo, hi;
  T value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class T, class F>
Panel<T> kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  return Panel<T>{lo, hi, kronrod * half, magnitude(T((kronrod - gauss) * half))};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature of f over [lo, hi]
/// to an absolute tolerance. The interval is first split into panels no
/// longer than `max_panel`; the panel with the largest error estimate is
/// bisected until the summed estimate meets the tolerance.
template <class T, class F>
QuadratureResult<T> integrate_adaptive(F f, double lo, double hi, double abs_tol,
                                       double max_panel = 0.0, int max_intervals = 200000) {
  QuadratureResult<T> out;
  if (!(hi > lo)) return out;
  int initial = 1;
  if (max_panel > 0.0)
    initial = static_cast<int>(std::min(1.0e6, std::ceil((hi - lo) / max_panel)));
  std::priority_queue<detail::Panel<T>> heap;
  double total_error = 0.0;
  const double width = (hi - lo) / initial;
  for (int k = 0; k < initial; ++k) {
    const double a = lo + k * width;
    const double b = (k + 1 == initial) ? hi : lo + (k + 1) * width;
    auto p = detail::kronrod15<T>(f, a, b);
    total_error += p.error;
    heap.push(p);
  }
  int count = initial;
  while (total_error > abs_tol) {
    if (count >= max_intervals)
      throw ConvergenceError("adaptive quadrature exceeded its interval budget (error estimate " +
                             std::to_string(total_error) + ")");
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval cannot be split further in floating point; keep its estimate.
      heap.push(worst);
      break;
    }
    auto left = detail::kronrod15<T>(f, worst.lo, mid);
    auto right = detail::kronrod15<T>(f, mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  double err = 0.0;
  T value{};
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error_estimate = err;
  out.intervals = count;
  return out;
}

}  // namespace regkit
