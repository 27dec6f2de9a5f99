#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "selberg/errors.hpp"

namespace selberg {

namespace detail {

// B_{2k} / (2k (2k-1)), k = 1..12
inline constexpr std::array<double, 12> kStirlingCoeffs = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

}  // namespace detail

/// log Gamma(z) for complex z away from the poles 0, -1, -2, ...
///
/// Stirling series with 12 Bernoulli terms after shifting z upward until
/// |z| >= 16 and Re z >= 0.5. The branch is continuous in z only up to
/// multiples of 2*pi*i; callers that exponentiate are unaffected.
inline std::complex<double> lgamma(std::complex<double> z) {
  using std::complex;
  complex<double> shift_log{};
  int guard = 0;
  while (z.real() < 0.5 || std::abs(z) < 16.0) {
    if (std::abs(z) < 1e-14 || (std::abs(z.imag()) < 1e-14 && z.real() <= 0 &&
                                std::abs(z.real() - std::round(z.real())) < 1e-14))
      throw SingularityError("log-gamma evaluated at a pole");
    shift_log += std::log(z);
    z += 1.0;
    if (++guard > 100000) throw SingularityError("log-gamma shift did not terminate");
  }
  const complex<double> inv = 1.0 / z;
  const complex<double> inv2 = inv * inv;
  complex<double> series{};
  complex<double> pw = inv;
  for (double c : detail::kStirlingCoeffs) {
    series += c * pw;
    pw *= inv2;
  }
  constexpr double half_log_2pi = 0.91893853320467274178032973640562;
  return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift_log;
}

inline std::complex<double> gamma(std::complex<double> z) { return std::exp(lgamma(z)); }

}  // namespace selberg
