#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace regkit {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sums the terms in descending order of magnitude with compensation.
inline double spectral_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(),
            [](double x, double y) { return std::abs(x) > std::abs(y); });
  CompensatedSum acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

}  // namespace regkit

namespace regkit {

/// Bisection on log(a) for a monotone predicate: `above(lo)` is false,
/// `above(hi)` is true. Returns the geometric midpoint of the final bracket,
/// whose relative width is at most rel_tol.
template <class Predicate>
double bisect_log(double lo, double hi, double rel_tol, Predicate above) {
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  const double width = std::log1p(rel_tol);
  for (int it = 0; it < 400 && log_hi - log_lo > width; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (above(std::exp(mid)))
      log_hi = mid;
    else
      log_lo = mid;
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

}  // namespace regkit
