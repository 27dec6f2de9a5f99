#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selberg/alpha_point.hpp"
#include "selberg/apoints.hpp"
#include "selberg/arith.hpp"
#include "selberg/errors.hpp"
#include "selberg/lfun.hpp"
#include "selberg/primes.hpp"

namespace selberg {

enum class Theorem { t1, t2, t3 };

inline std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::t1: return "T1";
    case Theorem::t2: return "T2";
    case Theorem::t3: return "T3";
  }
  return "?";
}

inline Theorem parse_theorem(const std::string& s) {
  if (s == "t1" || s == "T1") return Theorem::t1;
  if (s == "t2" || s == "T2") return Theorem::t2;
  if (s == "t3" || s == "T3") return Theorem::t3;
  throw ParseError("unknown theorem tag '" + s + "' (expected t1, t2 or t3)");
}

/// Default epsilon per theorem; T3 has none.
inline double default_epsilon(Theorem t) { return t == Theorem::t2 ? 0.25 : 0.1; }

struct ExplicitFormulaReport {
  Theorem theorem = Theorem::t1;
  double x = 0.0;
  double T = 0.0;
  cplx lhs{};
  cplx main_term{};
  cplx residual{};
  double reference_scale = 0.0;
  int points_used = 0;      // beta >= 0, 0 < gamma <= T
  int points_excluded = 0;  // boundary-flagged points with 0 < gamma <= T
};

namespace detail {

constexpr double kIntegerTolerance = 1e-12;

inline bool is_integer(double x) { return std::abs(x - std::round(x)) <= kIntegerTolerance; }

/// ||x||: distance to the nearest integer.
inline double dist_to_integer(double x) { return std::abs(x - std::round(x)); }

/// Distance from x >= 1 to the nearest prime power p^k, k >= 1.
inline double dist_to_prime_power(double x) {
  const double f = std::floor(x);
  double best = std::numeric_limits<double>::infinity();
  for (double n = std::max(2.0, f + 1.0);; n += 1.0)
    if (prime_power_base(std::uint64_t(n))) {
      best = n - x;
      break;
    }
  for (double n = f; n >= 2.0; n -= 1.0)
    if (prime_power_base(std::uint64_t(n))) {
      best = std::min(best, x - n);
      break;
    }
  return std::abs(best) <= kIntegerTolerance ? 0.0 : best;
}

/// min{a, 1/d} with 1/0 = infinity.
inline double min_recip(double a, double d) { return d > 0.0 ? std::min(a, 1.0 / d) : a; }

struct Neumaier {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double t = sum + v;
    c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace detail

/// Points entering the theorem sums: kind non-trivial, beta >= 0, 0 < gamma <= T.
inline std::vector<AlphaPoint> theorem_points(std::span<const AlphaPoint> points, double T) {
  std::vector<AlphaPoint> out;
  for (const auto& p : points)
    if (p.kind == PointKind::non_trivial && p.beta >= 0.0 && p.gamma > 0.0 && p.gamma <= T) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const AlphaPoint& a, const AlphaPoint& b) { return a.gamma < b.gamma; });
  return out;
}

/// Sum of x^{sign rho} in the given order, with compensated summation per component.
inline cplx lhs_power_sum(std::span<const AlphaPoint> points, double x, int sign) {
  if (!(x > 1.0)) throw DomainError("explicit formulae need x > 1");
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  const double lx = std::log(x);
  detail::Neumaier re, im;
  for (const auto& p : points) {
    const cplx v = std::exp(double(sign) * p.rho() * lx);
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

/// Uncompensated reference for lhs_power_sum.
inline cplx lhs_power_sum_naive(std::span<const AlphaPoint> points, double x, int sign) {
  cplx s{};
  for (const auto& p : points) s += std::exp(double(sign) * p.rho() * std::log(x));
  return s;
}

/// Lambda(x; L, alpha) for real x: the coefficient at integer x, zero elsewhere.
inline cplx lambda_at(const SelbergDescriptor& L, cplx alpha, double x) {
  if (!detail::is_integer(x) || x < 1.0) return {};
  const auto n = std::size_t(std::llround(x));
  return lambda_alpha(L, alpha, n)(n);
}

/// -(T/2pi) Lambda(x; L, alpha).
inline cplx main_term_t1(const SelbergDescriptor& L, cplx alpha, double x, double T) {
  if (alpha == cplx(1.0)) throw DomainError("alpha = 1 is excluded from the explicit formulae");
  if (!(x > 1.0)) throw DomainError("explicit formulae need x > 1");
  return -(T / (2.0 * std::numbers::pi)) * lambda_at(L, alpha, x);
}

/// -(T/(2 pi x)) conj(Lambda(x; L, 0)).
inline cplx main_term_t2_t3(const SelbergDescriptor& L, double x, double T) {
  if (!(x > 1.0)) throw DomainError("explicit formulae need x > 1");
  return -(T / (2.0 * std::numbers::pi * x)) * std::conj(lambda_at(L, 0.0, x));
}

/// Sum of the theorem's error expressions at (x, T, eps); sigma = sigma(L, alpha).
/// For T3, <x> is the distance to the nearest prime power, or ||x|| when
/// prime_power_bracket is false.
inline double reference_scale(Theorem theorem, const SelbergDescriptor& L, double x, double T, double eps,
                              double sigma, bool prime_power_bracket = true) {
  if (!(x > 1.0) || !(T > 1.0)) throw DomainError("reference scale needs x, T > 1");
  const double lx = std::log(x), lT = std::log(T);
  const bool integral = detail::is_integer(x);
  const double near = integral ? 0.0 : detail::min_recip(T / x, detail::dist_to_integer(x));
  switch (theorem) {
    case Theorem::t1: {
      if (!(eps > 0.0)) throw DomainError("T1 needs eps > 0");
      const double xs = std::pow(x, sigma + eps);
      return xs * (1.0 + near) + xs * lT * (1.0 + 1.0 / lx) +
             (lT * (1.0 + 1.0 / lx) + std::min(T, 1.0 / lx)) / (x * x);
    }
    case Theorem::t2: {
      if (!(eps > 0.0 && eps < 0.5)) throw DomainError("T2 needs eps in (0, 1/2)");
      const double xe = std::pow(x, eps);
      return xe * (1.0 + near) + xe + 1.0 / (std::pow(x, sigma + 1.0) * lx) +
             xe * lT * (1.0 / lx + std::log(1.0 / eps));
    }
    case Theorem::t3: {
      const int m = L.is_zeta() ? 1 : 7;
      const double bracket =
          prime_power_bracket ? detail::dist_to_prime_power(x) : (integral ? 0.0 : detail::dist_to_integer(x));
      const double llx = std::log(std::log(3.0 * x));
      return lx * detail::min_recip(T / x, bracket) + std::pow(lT, 2 * m) * std::log(3.0 * x) +
             (1.0 + lx) * std::log(2.0 * x) * llx + 1.0 / (std::pow(x, sigma + 1.0) * lx) +
             lT * (1.0 / lx + lx + llx);
    }
  }
  return 0.0;
}

struct ExplicitParams {
  std::optional<double> eps;        // default_epsilon(theorem) when unset
  bool prime_power_bracket = true;  // T3 <x> reading
  double abscissa_margin = 0.0;     // added to the empirical sigma(L, alpha) for alpha != 0
  SweepParams sweep{};
};

struct FormulaCheck {
  std::vector<ExplicitFormulaReport> reports;
  std::optional<double> slope;  // least-squares slope of log|residual| against log T
  AbscissaEstimate abscissa;
};

inline void require_theorem_applies(Theorem theorem, const SelbergDescriptor& L, cplx alpha) {
  if (alpha == cplx(1.0)) throw DomainError("alpha = 1 is excluded from the explicit formulae");
  if (L.kind() == DescriptorKind::unit) throw DomainError("the explicit formulae exclude L = 1");
  if (theorem == Theorem::t2 && L.degree() < 2) throw DomainError("T2 requires degree >= 2");
  if (theorem == Theorem::t3 && L.degree() != 1) throw DomainError("T3 requires degree 1");
}

/// Least-squares slope of y against x; nullopt with fewer than two distinct x.
inline std::optional<double> fit_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (xs[i] - mx) * (xs[i] - mx), sxy += (xs[i] - mx) * (ys[i] - my);
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

/// Reports for each T from a point list covering (0, max T].
inline FormulaCheck run_formula_check(Theorem theorem, const SelbergDescriptor& L, cplx alpha, double x,
                                      std::span<const double> T_list, std::span<const AlphaPoint> points,
                                      const ExplicitParams& params = {}) {
  require_theorem_applies(theorem, L, alpha);
  if (!(x > 1.0)) throw DomainError("explicit formulae need x > 1");
  const double eps = params.eps ? *params.eps : default_epsilon(theorem);
  FormulaCheck out;
  out.abscissa = alpha == cplx{} ? estimate_abscissa({}, alpha, 0.0)
                                 : estimate_abscissa(points, alpha, params.abscissa_margin);
  const int sign = theorem == Theorem::t1 ? 1 : -1;
  std::vector<double> lts, lrs;
  for (double T : T_list) {
    if (!(T > 1.0)) throw DomainError("explicit formulae need T > 1");
    ExplicitFormulaReport r;
    r.theorem = theorem;
    r.x = x;
    r.T = T;
    const auto used = theorem_points(points, T);
    r.points_used = int(used.size());
    r.points_excluded = int(std::count_if(points.begin(), points.end(), [&](const AlphaPoint& p) {
      return p.gamma > 0.0 && p.gamma <= T && !(p.kind == PointKind::non_trivial && p.beta >= 0.0);
    }));
    r.lhs = lhs_power_sum(used, x, sign);
    r.main_term = theorem == Theorem::t1 ? main_term_t1(L, alpha, x, T) : main_term_t2_t3(L, x, T);
    r.residual = r.lhs - r.main_term;
    r.reference_scale = reference_scale(theorem, L, x, T, eps, out.abscissa.sigma, params.prime_power_bracket);
    if (std::abs(r.residual) > 0.0) {
      lts.push_back(std::log(T));
      lrs.push_back(std::log(std::abs(r.residual)));
    }
    out.reports.push_back(r);
  }
  out.slope = fit_slope(lts, lrs);
  return out;
}

/// As above, sweeping (0, max T] first.
inline FormulaCheck run_formula_check(Theorem theorem, const SelbergDescriptor& L, cplx alpha, double x,
                                      std::span<const double> T_list, const ExplicitParams& params = {}) {
  require_theorem_applies(theorem, L, alpha);
  if (T_list.empty()) return {};
  const double t_max = *std::max_element(T_list.begin(), T_list.end());
  const auto sw = sweep(L, alpha, t_max, params.sweep);
  return run_formula_check(theorem, L, alpha, x, T_list, sw.points, params);
}

}  // namespace selberg
