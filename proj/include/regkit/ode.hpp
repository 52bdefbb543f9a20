#pragma once

#include "regkit/errors.hpp"

#include <cmath>
#include <string>

namespace regkit {

/// Classical fourth-order Runge–Kutta on [t0, t_end] with a uniform step
/// no larger than `step`. `rhs(t, y)` returns ẏ; `observe(k, t, y)` is called
/// at every step including k = 0. Returns the terminal state.
template <class State, class Rhs, class Observer>
State rk4_integrate(Rhs&& rhs, State y, double t0, double t_end, double step, Observer&& observe) {
  if (!(step > 0.0)) throw PreconditionError("integration step must be positive");
  if (!(t_end >= t0)) throw PreconditionError("integration end time precedes start time");
  const long n = static_cast<long>(std::ceil((t_end - t0) / step - 1e-12));
  const double h = n > 0 ? (t_end - t0) / static_cast<double>(n) : 0.0;
  observe(0L, t0, y);
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = rhs(t + h, State(y + h * k3));
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    observe(k + 1, (k + 1 == n) ? t_end : t0 + static_cast<double>(k + 1) * h, y);
  }
  return y;
}

}  // namespace regkit
