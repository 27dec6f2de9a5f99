#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "selberg/alpha_point.hpp"
#include "selberg/errors.hpp"
#include "selberg/primes.hpp"

namespace selberg {

/// Finite prefix a(1..N) of a Dirichlet-series coefficient sequence.
///
/// Indexing is 1-based to match the arithmetic; every index in 1..N holds a
/// value. Reads past N throw LengthError.
class ArithmeticFunction {
 public:
  ArithmeticFunction() = default;
  explicit ArithmeticFunction(std::size_t n) : values_(n, cplx{}) {}
  explicit ArithmeticFunction(std::vector<cplx> values) : values_(std::move(values)) {}

  template <class F>
  static ArithmeticFunction generate(std::size_t n, F&& fn) {
    ArithmeticFunction out(n);
    for (std::size_t k = 1; k <= n; ++k) out.values_[k - 1] = cplx(fn(k));
    return out;
  }

  static ArithmeticFunction identity(std::size_t n) {
    ArithmeticFunction out(n);
    if (n > 0) out.values_[0] = 1.0;
    return out;
  }

  static ArithmeticFunction ones(std::size_t n) {
    return ArithmeticFunction(std::vector<cplx>(n, cplx(1.0)));
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  cplx operator()(std::size_t n) const {
    if (n == 0 || n > values_.size())
      throw LengthError("arithmetic function index " + std::to_string(n) + " outside 1.." +
                        std::to_string(values_.size()));
    return values_[n - 1];
  }
  cplx& at(std::size_t n) {
    if (n == 0 || n > values_.size())
      throw LengthError("arithmetic function index " + std::to_string(n) + " outside 1.." +
                        std::to_string(values_.size()));
    return values_[n - 1];
  }

  std::span<const cplx> values() const { return values_; }

  /// Copy of the first n values.
  ArithmeticFunction prefix(std::size_t n) const {
    require_length(n);
    return ArithmeticFunction(std::vector<cplx>(values_.begin(), values_.begin() + n));
  }

  /// f_0: identical to f except f_0(1) = 0.
  ArithmeticFunction without_first() const {
    ArithmeticFunction out = *this;
    if (!out.values_.empty()) out.values_[0] = 0.0;
    return out;
  }

  /// Pointwise f(n) * log n.
  ArithmeticFunction times_log() const {
    ArithmeticFunction out = *this;
    for (std::size_t n = 1; n <= out.size(); ++n) out.values_[n - 1] *= std::log(double(n));
    return out;
  }

  ArithmeticFunction& operator+=(const ArithmeticFunction& o) {
    require_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ArithmeticFunction& operator-=(const ArithmeticFunction& o) {
    require_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  ArithmeticFunction& operator*=(cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
  }
  friend ArithmeticFunction operator+(ArithmeticFunction a, const ArithmeticFunction& b) { return a += b; }
  friend ArithmeticFunction operator-(ArithmeticFunction a, const ArithmeticFunction& b) { return a -= b; }
  friend ArithmeticFunction operator*(cplx c, ArithmeticFunction a) { return a *= c; }

  void require_length(std::size_t n) const {
    if (n > values_.size())
      throw LengthError("requested length " + std::to_string(n) + " exceeds available " +
                        std::to_string(values_.size()));
  }

 private:
  void require_same(const ArithmeticFunction& o) const {
    if (o.size() != size()) throw LengthError("arithmetic functions of different lengths");
  }

  std::vector<cplx> values_;
};

/// Dirichlet convolution (f*g)(n) = sum_{d|n} f(d) g(n/d) for n <= n_out.
inline ArithmeticFunction convolve(const ArithmeticFunction& f, const ArithmeticFunction& g,
                                   std::size_t n_out) {
  f.require_length(n_out);
  g.require_length(n_out);
  std::vector<cplx> out(n_out, cplx{});
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t d = 1; d <= n_out; ++d) {
    const cplx fd = fv[d - 1];
    if (fd == cplx{}) continue;
    for (std::size_t m = 1, n = d; n <= n_out; ++m, n += d) out[n - 1] += fd * gv[m - 1];
  }
  return ArithmeticFunction(std::move(out));
}

inline ArithmeticFunction convolve(const ArithmeticFunction& f, const ArithmeticFunction& g) {
  return convolve(f, g, std::min(f.size(), g.size()));
}

/// f^{*k}; k = 0 gives the identity epsilon.
inline ArithmeticFunction convolve_power(const ArithmeticFunction& f, unsigned k, std::size_t n) {
  f.require_length(n);
  ArithmeticFunction acc = ArithmeticFunction::identity(n);
  for (unsigned i = 0; i < k; ++i) acc = convolve(acc, f, n);
  return acc;
}

/// Dirichlet coefficients of 1/(L(s) - alpha) where L has coefficients f.
///
/// g(n) = sum_k (-1)^k f_0^{*k}(n) / (1 - alpha)^{k+1}. Since f_0 vanishes at 1,
/// f_0^{*k}(n) = 0 once 2^k > n, so the k-sum stops at floor(log2 N) and is exact.
inline ArithmeticFunction invert_shifted(const ArithmeticFunction& f, cplx alpha, std::size_t n) {
  if (alpha == cplx(1.0)) throw DomainError("alpha = 1 excluded: no ordinary Dirichlet series for 1/(L - 1)");
  f.require_length(n);
  if (n == 0) return ArithmeticFunction{};
  if (std::abs(f(1) - cplx(1.0)) > 1e-12) throw NormalizationError("coefficient f(1) must equal 1");

  const cplx inv = 1.0 / (1.0 - alpha);
  const ArithmeticFunction f0 = f.prefix(n).without_first();

  ArithmeticFunction power = ArithmeticFunction::identity(n);  // f_0^{*k}
  ArithmeticFunction g(n);
  cplx weight = inv;  // (-1)^k / (1 - alpha)^{k+1}
  for (std::size_t k = 0; (std::size_t{1} << k) <= n; ++k) {
    g += weight * power;
    power = convolve(power, f0, n);
    weight *= -inv;
  }
  return g;
}

/// Sieve von Mangoldt: log p at prime powers p^k, 0 elsewhere.
inline ArithmeticFunction von_mangoldt(std::size_t n) {
  if (n == 0) throw LengthError("von_mangoldt needs N >= 1");
  const auto spf = smallest_prime_factors(n);
  ArithmeticFunction out(n);
  for (std::size_t k = 2; k <= n; ++k) {
    const std::size_t p = spf[k];
    std::size_t m = k;
    while (m % p == 0) m /= p;
    if (m == 1) out.at(k) = std::log(double(p));
  }
  return out;
}

/// Sieve Moebius function.
inline ArithmeticFunction mobius(std::size_t n) {
  const auto spf = smallest_prime_factors(n);
  ArithmeticFunction out(n);
  if (n >= 1) out.at(1) = 1.0;
  for (std::size_t k = 2; k <= n; ++k) {
    const std::size_t p = spf[k];
    const std::size_t m = k / p;
    out.at(k) = (m % p == 0) ? cplx{} : -out(m);
  }
  return out;
}

enum class LambdaPath { automatic, inversion };

/// f(1) = 1 and f(n) = f(p) f(n/p) for the least prime p | n, for all n <= len (to 1e-12 relative).
inline bool is_completely_multiplicative(const ArithmeticFunction& f, std::size_t len) {
  if (std::abs(f(1) - cplx(1.0)) > 1e-12) return false;
  const auto spf = smallest_prime_factors(len);
  for (std::size_t k = 2; k <= len; ++k) {
    const std::size_t p = spf[k];
    if (p == k) continue;
    const cplx want = f(p) * f(k / p);
    if (std::abs(f(k) - want) > 1e-12 * std::max(1.0, std::abs(want))) return false;
  }
  return true;
}

/// Lambda(n; L, alpha), the coefficients of -L'/(L - alpha), from the
/// coefficients f of L: (f log) * invert_shifted(f, alpha). At alpha = 0 the
/// automatic path returns f(n) Lambda(n) without going through the inversion
/// when f is completely multiplicative (the only case where the two agree).
inline ArithmeticFunction lambda_alpha(const ArithmeticFunction& f, cplx alpha, std::size_t n,
                                       LambdaPath path = LambdaPath::automatic) {
  if (alpha == cplx(1.0)) throw DomainError("alpha = 1 excluded: Lambda(n; L, 1) is not defined");
  f.require_length(n);
  if (alpha == cplx{} && path == LambdaPath::automatic && is_completely_multiplicative(f, n)) {
    ArithmeticFunction vm = von_mangoldt(std::max<std::size_t>(n, 1));
    ArithmeticFunction out(n);
    for (std::size_t k = 1; k <= n; ++k) out.at(k) = f(k) * vm(k);
    return out;
  }
  const ArithmeticFunction g = invert_shifted(f, alpha, n);
  return convolve(f.prefix(n).times_log(), g, n);
}

enum class AbscissaSource { exact_for_alpha_zero, empirical_from_points };

struct AbscissaEstimate {
  cplx alpha{};
  double sigma = 1.0;
  double margin = 0.0;
  AbscissaSource source = AbscissaSource::exact_for_alpha_zero;
};

/// sigma(L, alpha): 1 at alpha = 0, else 1 + sup beta (observed) + margin, clamped at 1.
/// Empirical for alpha != 0: only the supplied points are consulted.
inline AbscissaEstimate estimate_abscissa(std::span<const AlphaPoint> points, cplx alpha, double margin) {
  if (margin < 0) throw DomainError("abscissa margin must be non-negative");
  if (alpha == cplx{}) return {alpha, 1.0, margin, AbscissaSource::exact_for_alpha_zero};
  if (points.empty()) throw InsufficientDataError("no alpha-points supplied for the abscissa estimate");
  double sup_beta = 0.0;
  for (const auto& p : points) sup_beta = std::max(sup_beta, p.beta);
  return {alpha, 1.0 + sup_beta + margin, margin, AbscissaSource::empirical_from_points};
}

}  // namespace selberg
