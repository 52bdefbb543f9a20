#include "regkit/schedule.hpp"

#include "regkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regkit {

Schedule Schedule::constant(double a_const) {
  if (!(a_const > 0.0) || !std::isfinite(a_const))
    throw PreconditionError("constant schedule needs a > 0");
  Schedule s;
  s.kind_ = Kind::Constant;
  s.a_const_ = a_const;
  return s;
}

Schedule Schedule::power(double c0, double c1, double b) {
  if (!(c0 > 0.0) || !(c1 > 0.0))
    throw PreconditionError("power schedule needs c0 > 0 and c1 > 0");
  if (!(b > 0.5 && b < 1.0))
    throw PreconditionError("power schedule exponent b must lie in (1/2, 1), got " +
                            std::to_string(b));
  Schedule s;
  s.kind_ = Kind::Power;
  s.c0_ = c0;
  s.c1_ = c1;
  s.b_ = b;
  return s;
}

Schedule Schedule::tau_power(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("τ-power schedule exponent γ must lie in (0, 1)");
  Schedule s;
  s.kind_ = Kind::TauPower;
  s.gamma_ = gamma;
  return s;
}

double Schedule::value(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return a_const_;
    case Kind::Power:
      return c0_ * std::pow(c1_ + t, -b_);
    case Kind::TauPower:
      return std::pow(t, -gamma_);
  }
  return 0.0;
}

double Schedule::derivative(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Power:
      return -b_ * c0_ * std::pow(c1_ + t, -b_ - 1.0);
    case Kind::TauPower:
      return -gamma_ * std::pow(t, -gamma_ - 1.0);
  }
  return 0.0;
}

double Schedule::second_derivative(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Power:
      return b_ * (b_ + 1.0) * c0_ * std::pow(c1_ + t, -b_ - 2.0);
    case Kind::TauPower:
      return gamma_ * (gamma_ + 1.0) * std::pow(t, -gamma_ - 2.0);
  }
  return 0.0;
}

double Schedule::integral(double s, double t) const {
  switch (kind_) {
    case Kind::Constant:
      return a_const_ * (t - s);
    case Kind::Power: {
      const double e = 1.0 - b_;
      return c0_ / e * (std::pow(c1_ + t, e) - std::pow(c1_ + s, e));
    }
    case Kind::TauPower: {
      const double e = 1.0 - gamma_;
      return (std::pow(t, e) - std::pow(s, e)) / e;
    }
  }
  return 0.0;
}

double Schedule::inverse(double a) const {
  if (!(a > 0.0)) throw PreconditionError("schedule inverse needs a > 0");
  switch (kind_) {
    case Kind::Constant:
      throw PreconditionError("a constant schedule cannot be inverted");
    case Kind::Power: {
      if (a > value(0.0))
        throw PreconditionError("requested a = " + std::to_string(a) +
                                " exceeds a(0) = " + std::to_string(value(0.0)));
      return std::max(0.0, std::pow(c0_ / a, 1.0 / b_) - c1_);
    }
    case Kind::TauPower:
      return std::pow(a, -1.0 / gamma_);
  }
  return 0.0;
}

}  // namespace regkit
