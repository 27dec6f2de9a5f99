#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "selberg/errors.hpp"

namespace selberg {

/// Knobs for the Euler-Maclaurin evaluator.
///
/// em_terms = 0 lets the evaluator pick the smallest direct-sum length whose
/// remainder bound meets the target; a fixed em_terms that cannot meet the
/// target raises PrecisionError.
struct EvalParams {
  int em_terms = 0;
  int bernoulli_order = 40;       // even; highest Bernoulli index used
  double target_abs_err = 1e-10;  // applies up to t = 1e3
  double high_t_abs_err = 1e-8;   // floor on the target above t = 1e3
  double t_max = 5e3;

  double target_at(double t) const {
    return std::abs(t) > 1e3 ? std::max(target_abs_err, high_t_abs_err) : target_abs_err;
  }

  /// Same parameters with a tighter target and longer direct sum, for re-verification.
  EvalParams doubled() const {
    EvalParams p = *this;
    p.em_terms = em_terms > 0 ? 2 * em_terms : 0;
    p.target_abs_err = target_abs_err / 100.0;
    p.high_t_abs_err = high_t_abs_err / 100.0;
    return p;
  }

  void validate() const {
    if (bernoulli_order <= 0 || bernoulli_order % 2 != 0 || bernoulli_order > 80)
      throw DomainError("bernoulli_order must be an even integer in [2, 80]");
    if (!(target_abs_err > 0) || !(high_t_abs_err > 0)) throw DomainError("target errors must be positive");
    if (em_terms < 0) throw DomainError("em_terms must be non-negative");
  }
};

struct EvalResult {
  std::complex<double> value;
  double error_bound = 0.0;
};

namespace detail {

/// B_{2k} / (2k)! for k = 1..40, from B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}.
inline const std::array<double, 41>& bernoulli_over_factorial() {
  static const std::array<double, 41> table = [] {
    std::array<double, 41> t{};
    const double two_pi = 2.0 * std::numbers::pi;
    for (int k = 1; k <= 40; ++k) {
      double z;
      if (k == 1) {
        z = std::numbers::pi * std::numbers::pi / 6.0;
      } else if (k == 2) {
        z = std::pow(std::numbers::pi, 4) / 90.0;
      } else {
        // direct sum plus integral tail; the neglected part is < 1e-20 relative for k >= 3
        z = 0.0;
        const int terms = 2000;
        for (int n = terms; n >= 1; --n) z += std::pow(double(n), -2.0 * k);
        z += std::pow(double(terms) + 0.5, 1.0 - 2.0 * k) / (2.0 * k - 1.0);
      }
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      t[k] = sign * 2.0 * z / std::pow(two_pi, 2.0 * k);
    }
    return t;
  }();
  return table;
}

/// log of the remainder bound 4 |(s)_B| / (2 pi)^B * (N+a)^{-(sigma+B-1)} / (sigma+B-1).
inline double log_em_remainder_bound(std::complex<double> s, double a, int n_terms, int b_order) {
  const double sigma = s.real();
  const double e = sigma + b_order - 1.0;
  if (e <= 0) return std::numeric_limits<double>::infinity();
  double log_poch = 0.0;
  for (int j = 0; j < b_order; ++j) log_poch += std::log(std::abs(s + double(j)));
  return std::log(4.0) + log_poch - b_order * std::log(2.0 * std::numbers::pi) -
         e * std::log(n_terms + a) - std::log(e);
}

}  // namespace detail

namespace detail {

/// ((N+a)^{1-s} - 1) / (s - 1), continuous through s = 1.
inline std::complex<double> regular_pole_part(std::complex<double> s, double log_na) {
  const std::complex<double> z = (1.0 - s) * log_na;
  if (std::abs(z) < 1e-3) {
    const std::complex<double> expm1_over_z = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0;
    return -log_na * expm1_over_z;
  }
  return (std::exp(z) - 1.0) / (s - 1.0);
}

}  // namespace detail

/// Hurwitz zeta(s, a), a in (0, 1], by Euler-Maclaurin summation.
///
/// With subtract_pole set, returns zeta(s, a) - 1/(s - 1), which is entire;
/// character sums use it to pass through s = 1 where the poles cancel.
inline EvalResult hurwitz_zeta(std::complex<double> s, double a, const EvalParams& params = {},
                               bool subtract_pole = false) {
  params.validate();
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hurwitz parameter a must lie in (0, 1]");
  if (std::abs(s.imag()) > params.t_max)
    throw RangeError("|Im s| = " + std::to_string(std::abs(s.imag())) + " exceeds the evaluation ceiling");
  if (!subtract_pole && std::abs(s - 1.0) < 1e-6) throw PoleError("evaluation within 1e-6 of the pole at s = 1");

  const int b_order = params.bernoulli_order;
  const double target = params.target_at(s.imag());
  const double log_target = std::log(target);

  int n = params.em_terms;
  if (n == 0) {
    n = std::max(8, int(std::ceil((std::abs(s) + b_order) / (2.0 * std::numbers::pi))));
    while (detail::log_em_remainder_bound(s, a, n, b_order) > log_target) {
      n = int(std::ceil(n * 1.25));
      if (n > 10'000'000) throw PrecisionError("Euler-Maclaurin length selection did not converge");
    }
  }
  const double log_bound = detail::log_em_remainder_bound(s, a, n, b_order);
  if (log_bound > log_target)
    throw PrecisionError("Euler-Maclaurin remainder bound " + std::to_string(std::exp(log_bound)) +
                         " exceeds target " + std::to_string(target) + "; raise em_terms");

  using C = std::complex<double>;
  C sum{};
  for (int k = n - 1; k >= 0; --k) sum += std::exp(-s * std::log(k + a));

  const double na = n + a;
  const double log_na = std::log(na);
  const C na_pow = std::exp(-s * log_na);  // (N+a)^{-s}
  if (subtract_pole)
    sum += detail::regular_pole_part(s, log_na);
  else
    sum += na_pow * na / (s - 1.0);
  sum += 0.5 * na_pow;

  const auto& bf = detail::bernoulli_over_factorial();
  // term_k = B_{2k}/(2k)! (s)_{2k-1} (N+a)^{-s-2k+1}
  C poch = s;               // (s)_{2k-1}
  C pw = na_pow / na;       // (N+a)^{-s-2k+1}
  const double inv_na2 = 1.0 / (na * na);
  for (int k = 1; 2 * k <= b_order; ++k) {
    sum += bf[k] * poch * pw;
    poch *= (s + double(2 * k - 1)) * (s + double(2 * k));
    pw *= inv_na2;
  }
  return {sum, std::exp(log_bound)};
}

}  // namespace selberg
