#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace swinglab {

using Complex = std::complex<double>;
/// Complex per-unit admittance (G + jB).
using Admittance = std::complex<double>;

/// Complex per-unit quantity (voltage or current). Stored rectangular; the
/// angle accessor is normalized to (-pi, pi].
class Phasor {
 public:
  constexpr Phasor() = default;
  constexpr Phasor(double re, double im) : value_(re, im) {}
  constexpr explicit Phasor(Complex value) : value_(value) {}

  static Phasor from_polar(double magnitude, double angle) {
    return Phasor(std::polar(magnitude, angle));
  }

  constexpr double re() const { return value_.real(); }
  constexpr double im() const { return value_.imag(); }
  double magnitude() const { return std::abs(value_); }

  double angle() const {
    const double a = std::arg(value_);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
  }

  constexpr Complex value() const { return value_; }
  constexpr operator Complex() const { return value_; }  // NOLINT(google-explicit-constructor)

  friend constexpr bool operator==(const Phasor&, const Phasor&) = default;

 private:
  Complex value_{0.0, 0.0};
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

}  // namespace swinglab
