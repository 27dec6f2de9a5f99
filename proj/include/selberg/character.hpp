#pragma once

#include <complex>
#include <concepts>
#include <type_traits>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "selberg/errors.hpp"
#include "selberg/primes.hpp"

namespace selberg {

/// A Dirichlet character modulo q, tabulated on residues 0..q-1.
///
/// Characters mod q are enumerated by a mixed-radix index over generators of
/// the cyclic factors of (Z/qZ)*: a primitive root for each odd prime power,
/// 3 for 4, and the pair (-1, 5) for 2^e with e >= 3. Index 0 is principal.
class Character {
 public:
  Character(std::uint64_t modulus, std::uint64_t index) : q_(modulus), index_(index) {
    if (q_ == 0) throw DomainError("character modulus must be positive");
    build();
  }

  std::uint64_t modulus() const { return q_; }
  std::uint64_t index() const { return index_; }
  std::uint64_t group_order() const { return order_; }

  template <std::integral I>
  std::complex<double> operator()(I n) const {
    if constexpr (std::is_signed_v<I>) {
      const auto q = static_cast<std::int64_t>(q_);
      return table_[static_cast<std::uint64_t>(((std::int64_t(n) % q) + q) % q)];
    } else {
      return table_[std::uint64_t(n) % q_];
    }
  }

  bool is_primitive() const { return conductor_ == q_; }
  std::uint64_t conductor() const { return conductor_; }
  bool is_even() const { return parity_ == 0; }
  int parity() const { return parity_; }  // 0 even, 1 odd
  bool is_real() const {
    for (const auto& v : table_)
      if (std::abs(v.imag()) > 1e-12) return false;
    return true;
  }

  /// tau(chi) = sum_{r=1}^{q} chi(r) e(r/q)
  std::complex<double> gauss_sum() const {
    std::complex<double> s{};
    for (std::uint64_t r = 1; r <= q_; ++r)
      s += (*this)(r) * std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(q_));
    return s;
  }

  /// Root number tau(chi) / (i^a sqrt(q)) of the completed functional equation.
  std::complex<double> root_number() const {
    const std::complex<double> ia = parity_ == 0 ? std::complex<double>(1.0) : std::complex<double>(0.0, 1.0);
    return gauss_sum() / (ia * std::sqrt(double(q_)));
  }

  const std::vector<std::complex<double>>& table() const { return table_; }

 private:
  struct Component {
    std::uint64_t modulus;   // prime power p^e
    std::uint64_t generator; // generator of the cyclic factor
    std::uint64_t order;
    bool minus_one;          // the <-1> factor of (Z/2^e)^*, e >= 3
  };

  static std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
      if (e & 1) r = r * b % m;
      b = b * b % m;
      e >>= 1;
    }
    return r;
  }

  static std::uint64_t primitive_root(std::uint64_t pe, std::uint64_t p) {
    const std::uint64_t phi = euler_phi(pe);
    std::vector<std::uint64_t> factors;
    std::uint64_t m = phi;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
      if (m % d) continue;
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
    if (m > 1) factors.push_back(m);
    for (std::uint64_t g = 2; g < pe; ++g) {
      if (g % p == 0) continue;
      bool ok = true;
      for (auto f : factors)
        if (powmod(g, phi / f, pe) == 1) { ok = false; break; }
      if (ok) return g;
    }
    return 1;  // pe = 2
  }

  void build() {
    std::vector<Component> comps;
    std::uint64_t m = q_;
    for (std::uint64_t p = 2; p * p <= m || m > 1; ++p) {
      if (p * p > m) p = m;
      if (m % p) continue;
      std::uint64_t pe = 1;
      int e = 0;
      while (m % p == 0) { m /= p; pe *= p; ++e; }
      if (p == 2) {
        if (e == 2) comps.push_back({4, 3, 2, false});
        if (e >= 3) {
          comps.push_back({pe, pe - 1, 2, true});
          comps.push_back({pe, 5, pe / 4, false});
        }
      } else {
        comps.push_back({pe, primitive_root(pe, p), euler_phi(pe), false});
      }
    }
    order_ = euler_phi(q_);
    if (index_ >= order_)
      throw DomainError("character index " + std::to_string(index_) + " out of range for modulus " +
                        std::to_string(q_) + " (group order " + std::to_string(order_) + ")");

    // exponents of the index in mixed radix
    std::vector<std::uint64_t> exps;
    std::uint64_t rest = index_;
    for (const auto& c : comps) {
      exps.push_back(rest % c.order);
      rest /= c.order;
    }

    // per-component discrete logs; for 2^e (e >= 3) write n = (-1)^a 5^b
    table_.assign(q_, {0.0, 0.0});
    std::vector<std::vector<std::int64_t>> dlog(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const auto& c = comps[i];
      dlog[i].assign(c.modulus, -1);
      if (c.minus_one) {
        std::uint64_t x = 1;
        for (std::uint64_t b = 0; b < c.modulus / 4; ++b) {
          dlog[i][x] = 0;
          dlog[i][c.modulus - x] = 1;
          x = x * 5 % c.modulus;
        }
      } else if (c.modulus == comps[i].modulus && i > 0 && comps[i - 1].minus_one) {
        std::uint64_t x = 1;
        for (std::uint64_t b = 0; b < c.order; ++b) {
          dlog[i][x] = std::int64_t(b);
          dlog[i][c.modulus - x] = std::int64_t(b);
          x = x * 5 % c.modulus;
        }
      } else {
        std::uint64_t x = 1;
        for (std::uint64_t b = 0; b < c.order; ++b) {
          dlog[i][x] = std::int64_t(b);
          x = x * c.generator % c.modulus;
        }
      }
    }
    for (std::uint64_t n = 0; n < q_; ++n) {
      if (std::gcd(n, q_) != 1) continue;
      double phase = 0.0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto l = dlog[i][n % comps[i].modulus];
        phase += double(exps[i]) * double(l) / double(comps[i].order);
      }
      phase -= std::floor(phase);
      table_[n] = std::polar(1.0, 2.0 * std::numbers::pi * phase);
      if (std::abs(table_[n].imag()) < 1e-15) table_[n].imag(0.0);
      if (std::abs(table_[n].real()) < 1e-15) table_[n].real(0.0);
    }
    if (q_ == 1) table_[0] = 1.0;

    parity_ = (q_ > 2 && std::abs((*this)(q_ - 1) + 1.0) < 1e-9) ? 1 : 0;

    conductor_ = q_;
    for (std::uint64_t d = 1; d < q_; ++d) {
      if (q_ % d) continue;
      bool induced = true;
      for (std::uint64_t n = 1; n < q_ && induced; n += d)
        if (std::gcd(n, q_) == 1 && std::abs(table_[n] - 1.0) > 1e-9) induced = false;
      if (induced) { conductor_ = d; break; }
    }
  }

  std::uint64_t q_;
  std::uint64_t index_;
  std::uint64_t order_ = 1;
  std::uint64_t conductor_ = 1;
  int parity_ = 0;
  std::vector<std::complex<double>> table_;
};

}  // namespace selberg
