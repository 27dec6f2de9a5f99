#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "selberg/lfun.hpp"
#include "selberg/primes.hpp"

using namespace selberg;
using std::numbers::pi;

namespace {

constexpr double kZeta2 = 1.64493406684822643647;        // pi^2/6
constexpr double kZetaPrime2 = -0.93754825431584375370;  // mpmath reference

// sum_{n<=N} n^-2 plus the Euler-Maclaurin tail 1/N - 1/(2N^2) + 1/(6N^3)
double zeta2_direct() {
  const int n_max = 100000;
  double s = 0.0;
  for (int n = n_max; n >= 1; --n) s += 1.0 / (double(n) * n);
  const double N = n_max;
  return s + 1.0 / N - 1.0 / (2 * N * N) + 1.0 / (6 * N * N * N);
}

// -sum log n / n^2 with integral tail (log N + 1)/N minus half the last term
double zeta_prime2_direct() {
  const int n_max = 1000000;
  double s = 0.0;
  for (int n = n_max; n >= 2; --n) s += std::log(double(n)) / (double(n) * n);
  const double N = n_max;
  s += (std::log(N) + 1.0) / N - 0.5 * std::log(N) / (N * N);
  return -s;
}

// Leibniz series for L(1, chi_-4), averaging consecutive partial sums
double leibniz() {
  double s = 0.0, prev = 0.0;
  const int n_max = 2000000;
  for (int k = 0; k <= n_max; ++k) {
    prev = s;
    s += (k % 2 ? -1.0 : 1.0) / (2.0 * k + 1.0);
  }
  return 0.5 * (s + prev);
}

}  // namespace

TEST(LogGamma, RealAndSpecialValues) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 150.0})
    EXPECT_NEAR(lgamma(cplx(x)).real(), std::lgamma(x), 1e-13 * std::max(1.0, std::abs(std::lgamma(x))));
  EXPECT_NEAR(std::abs(gamma(cplx(0.5)) - std::sqrt(pi)), 0.0, 1e-14);
  EXPECT_NEAR(gamma(cplx(-0.5)).real(), -2.0 * std::sqrt(pi), 1e-13);
  EXPECT_THROW(lgamma(cplx(-2.0)), SingularityError);
}

TEST(LogGamma, ReflectionAndRecurrence) {
  for (cplx z : {cplx(0.3, 0.7), cplx(0.25, 40.0), cplx(-1.3, 5.0), cplx(0.75, -300.0)}) {
    const cplx refl = gamma(z) * gamma(1.0 - z) * std::sin(pi * z) / pi;
    if (std::abs(z.imag()) < 50) {
      EXPECT_LT(std::abs(refl - 1.0), 1e-12) << z;
    }
    const cplx rec = std::exp(lgamma(z + 1.0) - lgamma(z)) / z;
    EXPECT_LT(std::abs(rec - 1.0), 1e-12) << z;
  }
}

TEST(Hurwitz, ZetaAtTwo) {
  const auto r = hurwitz_zeta(2.0, 1.0);
  EXPECT_NEAR(r.value.real(), zeta2_direct(), 1e-10);
  EXPECT_NEAR(r.value.real(), kZeta2, 1e-10);
  EXPECT_LE(r.error_bound, 1e-10);
}

TEST(Hurwitz, HalfShiftIdentity) {
  // zeta(s, 1/2) = (2^s - 1) zeta(s)
  EXPECT_NEAR(hurwitz_zeta(2.0, 0.5).value.real(), 3.0 * zeta2_direct(), 1e-10);
  const cplx s(0.3, 17.0);
  const cplx lhs = hurwitz_zeta(s, 0.5).value;
  const cplx rhs = (std::pow(cplx(2.0), s) - 1.0) * hurwitz_zeta(s, 1.0).value;
  EXPECT_LT(std::abs(lhs - rhs), 1e-9);
}

TEST(Hurwitz, ZetaAtZero) { EXPECT_NEAR(hurwitz_zeta(0.0, 1.0).value.real(), -0.5, 1e-12); }

TEST(Hurwitz, Errors) {
  EXPECT_THROW(hurwitz_zeta(1.0, 1.0), PoleError);
  EXPECT_THROW(hurwitz_zeta(cplx(1.0 + 5e-7, 0.0), 1.0), PoleError);
  EXPECT_THROW(hurwitz_zeta(cplx(0.5, 6000.0), 1.0), RangeError);
  EvalParams fixed;
  fixed.em_terms = 5;
  EXPECT_THROW(hurwitz_zeta(cplx(0.5, 200.0), 1.0, fixed), PrecisionError);
  EXPECT_THROW(hurwitz_zeta(2.0, 0.0), DomainError);
}

TEST(Hurwitz, DeterministicAndHighT) {
  const cplx s(0.5, 4900.0);
  const auto a = hurwitz_zeta(s, 1.0), b = hurwitz_zeta(s, 1.0);
  EXPECT_EQ(a.value, b.value);
  EXPECT_LE(a.error_bound, 1e-8);
}

TEST(Character, ChiMinusFour) {
  const Character chi(4, 1);
  EXPECT_EQ(chi(1u), cplx(1.0));
  EXPECT_EQ(chi(3u), cplx(-1.0));
  EXPECT_EQ(chi(2u), cplx(0.0));
  EXPECT_TRUE(chi.is_primitive());
  EXPECT_FALSE(chi.is_even());
  EXPECT_LT(std::abs(chi.root_number() - 1.0), 1e-12);
  EXPECT_FALSE(Character(4, 0).is_primitive());
}

TEST(Character, MultiplicativeAndOrthogonal) {
  for (std::uint64_t q = 2; q <= 40; ++q) {
    const auto phi = euler_phi(q);
    int primitive = 0;
    for (std::uint64_t idx = 0; idx < phi; ++idx) {
      const Character chi(q, idx);
      if (chi.is_primitive()) ++primitive;
      cplx total{};
      for (std::uint64_t a = 0; a < q; ++a) {
        total += chi(a);
        EXPECT_EQ(std::abs(chi(a)) > 0.5, std::gcd(a, q) == 1);
        for (std::uint64_t b = 0; b < q; ++b) ASSERT_LT(std::abs(chi(a * b) - chi(a) * chi(b)), 1e-12);
      }
      EXPECT_LT(std::abs(total - (idx == 0 ? cplx(double(phi)) : cplx{})), 1e-9) << q << "," << idx;
      for (std::uint64_t other = 0; other < idx; ++other) {
        const Character psi(q, other);
        bool same = true;
        for (std::uint64_t a = 0; a < q; ++a) same = same && std::abs(chi(a) - psi(a)) < 1e-12;
        EXPECT_FALSE(same) << "duplicate character " << q << ":" << idx << "," << other;
      }
      if (chi.is_primitive()) {
        EXPECT_NEAR(std::abs(chi.root_number()), 1.0, 1e-10);
      }
    }
    // number of primitive characters mod q is the Dirichlet inverse of phi convolved with 1
    std::int64_t expect = 0;
    for (std::uint64_t d = 1; d <= q; ++d) {
      if (q % d) continue;
      std::uint64_t m = q / d;
      int mu = 1;
      for (std::uint64_t p = 2; p <= m; ++p) {
        if (m % p) continue;
        m /= p;
        if (m % p == 0) { mu = 0; break; }
        mu = -mu;
      }
      expect += mu * std::int64_t(euler_phi(d));
    }
    EXPECT_EQ(primitive, expect) << q;
  }
}

TEST(Evaluate, ReferenceValues) {
  const auto zeta = SelbergDescriptor::zeta();
  const auto chi4 = SelbergDescriptor::dirichlet(4, 1);
  EXPECT_NEAR(evaluate(zeta, 2.0).real(), pi * pi / 6.0, 1e-10);
  EXPECT_NEAR(evaluate(chi4, 1.0).real(), leibniz(), 1e-10);
  EXPECT_NEAR(evaluate(chi4, 1.0).real(), pi / 4.0, 1e-10);
  EXPECT_NEAR(std::abs(evaluate(chi4, cplx(1.0, 1e-7)) - pi / 4.0), 0.0, 1e-6);
  const auto prod = SelbergDescriptor::product({zeta, chi4});
  EXPECT_NEAR(std::abs(evaluate(prod, 2.0) - evaluate(zeta, 2.0) * evaluate(chi4, 2.0)), 0.0, 1e-14);
  EXPECT_NEAR(evaluate(prod, 2.0).real(), 1.50670300992298503088, 2e-10);
  EXPECT_DOUBLE_EQ(prod.degree(), 2.0);
  EXPECT_THROW(evaluate(zeta, 1.0), PoleError);
}

TEST(Evaluate, ConjugationSymmetry) {
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1), SelbergDescriptor::dirichlet(8, 2)}) {
    ASSERT_TRUE(L.real_coefficients());
    for (cplx s : {cplx(0.5, 14.1), cplx(-0.3, 77.0), cplx(1.7, 3.0), cplx(0.8, 250.0)})
      EXPECT_LT(std::abs(evaluate(L, std::conj(s)) - std::conj(evaluate(L, s))), 1e-10) << L.label() << s;
  }
}

TEST(Evaluate, EulerProductAtSigmaThree) {
  const auto zeta = SelbergDescriptor::zeta();
  for (cplx s : {cplx(3.0, 0.0), cplx(3.0, 10.0), cplx(3.0, 123.4)}) {
    cplx prod = 1.0;
    for (auto p : primes_up_to(100000)) prod /= 1.0 - std::exp(-s * std::log(double(p)));
    EXPECT_LT(std::abs(evaluate(zeta, s) - prod), 1e-6);
  }
}

TEST(FunctionalEquation, ResidualGrid) {
  EvalParams params;
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)})
    for (double sigma : {-0.5, 0.0, 0.25, 0.5})
      for (double t : {10.0, 25.3, 50.0, 77.7})
        EXPECT_LE(functional_equation_residual(L, {sigma, t}, params), 1e-7) << L.label() << " " << sigma << " " << t;
}

TEST(FunctionalEquation, OtherCharactersShiftsAndProducts) {
  std::vector<SelbergDescriptor> ls = {SelbergDescriptor::dirichlet(5, 1), SelbergDescriptor::dirichlet(5, 2),
                                       SelbergDescriptor::dirichlet(8, 3), SelbergDescriptor::dirichlet(7, 1),
                                       SelbergDescriptor::dirichlet(4, 1, 2.5)};
  ls.push_back(SelbergDescriptor::product({SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)}));
  for (const auto& L : ls)
    for (cplx s : {cplx(-0.25, 12.0), cplx(0.3, 33.3), cplx(0.9, 60.0)}) {
      const double scale = std::max(1.0, std::abs(evaluate(L, s)));
      EXPECT_LE(functional_equation_residual(L, s) / scale, 1e-8) << L.label() << " " << s;
    }
}

TEST(HFactor, UnitModulusOnCriticalLine) {
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1), SelbergDescriptor::dirichlet(5, 1)})
    for (double t : {1.0, 14.0, 100.0, 1234.5})
      EXPECT_NEAR(std::abs(h_factor(L, {0.5, t})), 1.0, 1e-10);
}

TEST(HFactor, FunctionalEquationAtTwo) {
  const auto zeta = SelbergDescriptor::zeta();
  const cplx s = 2.0;
  EXPECT_LT(std::abs(evaluate(zeta, s) - h_factor(zeta, s) * std::conj(evaluate(zeta, 1.0 - std::conj(s)))), 1e-8);
}

TEST(HFactor, StirlingMainTerm) {
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)}) {
    const cplx s(-0.1, 50.0);
    const cplx h = h_factor(L, s);
    EXPECT_LE(std::abs(h - h_factor_stirling(L, s)) / std::abs(h), 3.0 / s.imag()) << L.label();
  }
}

TEST(HFactor, TwoSidedBoundAgainstStirling) {
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)})
    for (double t = 20.0; t <= 500.0; t += 12.5)
      for (double sigma : {-0.5, -0.25, 0.0}) {
        const double ratio = std::abs(h_factor(L, {sigma, t})) / std::abs(h_factor_stirling(L, {sigma, t}));
        EXPECT_GE(ratio, 0.5);
        EXPECT_LE(ratio, 2.0);
      }
}

TEST(HLogDerivative, MainTerm) {
  const auto zeta = SelbergDescriptor::zeta();
  const auto chi4 = SelbergDescriptor::dirichlet(4, 1);
  EXPECT_NEAR(zeta.lambda() * zeta.Q() * zeta.Q(), 1.0 / (2.0 * pi), 1e-15);
  EXPECT_NEAR(h_log_derivative_asymptotic(zeta, {0.5, 2.0 * pi}), 0.0, 1e-14);
  EXPECT_NEAR(h_log_derivative_asymptotic(zeta, {0.5, 2.0 * pi * std::exp(1.0)}), 1.0, 1e-14);
  const auto prod = SelbergDescriptor::product({zeta, chi4});
  const cplx s(0.3, 40.0);
  EXPECT_NEAR(h_log_derivative_asymptotic(prod, s),
              h_log_derivative_asymptotic(zeta, s) + h_log_derivative_asymptotic(chi4, s), 1e-12);
  EXPECT_THROW(h_log_derivative_asymptotic(zeta, {0.5, 1.0}), DomainError);
}

TEST(HLogDerivative, ExactMinusMainIsOrderOneOverT) {
  // -H'/H by a Cauchy integral of log H around s
  for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)}) {
    const cplx s(0.25, 100.0);
    const double r = 1e-2;
    const int k = 32;
    const cplx center = log_h_factor(L, s);
    cplx d{};
    for (int j = 0; j < k; ++j) {
      const cplx e = std::polar(1.0, 2 * pi * j / k);
      cplx v = log_h_factor(L, s + r * e) - center;
      v.imag(std::remainder(v.imag(), 2 * pi));
      d += v / e;
    }
    d /= double(k) * r;
    const double c = std::abs(-d - h_log_derivative_asymptotic(L, s)) * s.imag();
    EXPECT_LE(c, 10.0) << L.label();
  }
}

TEST(Derivative, ZetaPrimeAtTwo) {
  const auto zeta = SelbergDescriptor::zeta();
  const auto d = evaluate_derivative_with_error(zeta, 2.0);
  EXPECT_NEAR(d.value.real(), zeta_prime2_direct(), 1e-8);
  EXPECT_NEAR(d.value.real(), kZetaPrime2, 1e-8);
  EXPECT_LT(d.error_estimate, 1e-6);
}

TEST(Derivative, UnitAndReflection) {
  const auto one = SelbergDescriptor::unit();
  EXPECT_LT(std::abs(evaluate_derivative(one, {0.3, 7.0})), 1e-12);
  const auto zeta = SelbergDescriptor::zeta();
  const cplx s(0.4, 21.0);
  EXPECT_LT(std::abs(evaluate_derivative(zeta, std::conj(s)) - std::conj(evaluate_derivative(zeta, s))), 1e-9);
  EXPECT_THROW(evaluate_derivative(zeta, {1.005, 0.0}), GeometryError);
}

TEST(Derivative, MatchesDifferentiatedSeriesRightOfOne) {
  const auto chi4 = SelbergDescriptor::dirichlet(4, 1);
  const auto zeta = SelbergDescriptor::zeta();
  for (const auto* L : {&zeta, &chi4}) {
    const cplx s(2.5, 9.0);
    const auto f = L->coefficients(2000000);
    cplx series{};
    for (std::size_t n = f.size(); n >= 2; --n) series -= f(n) * std::log(double(n)) * std::exp(-s * std::log(double(n)));
    EXPECT_LT(std::abs(evaluate_derivative(*L, s) - series), 1e-8) << L->label();
  }
}

TEST(Derivative, AgreesWithCentralDifferences) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> sig(-0.5, 1.5), tt(5.0, 400.0);
  EvalParams tight;
  tight.target_abs_err = 1e-13;
  for (int i = 0; i < 20; ++i) {
    const cplx s(sig(rng), tt(rng));
    for (const auto& L : {SelbergDescriptor::zeta(), SelbergDescriptor::dirichlet(4, 1)}) {
      const double h = 1e-5;
      const cplx fd = (evaluate(L, s + h, tight) - evaluate(L, s - h, tight)) / (2 * h);
      EXPECT_LT(std::abs(fd - evaluate_derivative(L, s, tight)), 1e-6) << L.label() << s;
    }
  }
}

TEST(Descriptor, Invariants) {
  const auto chi = SelbergDescriptor::dirichlet(5, 1, 1.5);
  EXPECT_NEAR(std::abs(chi.omega()), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(chi.degree(), 1.0);
  for (const auto& g : chi.gamma_factors()) EXPECT_GE(g.mu.real(), 0.0);
  EXPECT_THROW(SelbergDescriptor::dirichlet(4, 0), DomainError);
  EXPECT_THROW(SelbergDescriptor::dirichlet(9, 3), DomainError);  // induced from mod 3
  EXPECT_EQ(SelbergDescriptor::dirichlet(4, 1).spec(), "dirichlet:4,1");
}

TEST(Descriptor, ProductLambdaAtZeroIsSumOfFactors) {
  const auto z = SelbergDescriptor::zeta();
  const auto chi = SelbergDescriptor::dirichlet(4, 1);
  const auto prod = SelbergDescriptor::product({z, chi});
  const std::size_t n = 300;
  const auto a = lambda_alpha(prod, 0.0, n);
  const auto b = lambda_alpha(prod, 0.0, n, LambdaPath::inversion);
  const auto lz = lambda_alpha(z, 0.0, n);
  const auto lc = lambda_alpha(chi, 0.0, n);
  for (std::size_t k = 1; k <= n; ++k) {
    EXPECT_NEAR(std::abs(a(k) - b(k)), 0.0, 1e-10) << k;
    EXPECT_NEAR(std::abs(a(k) - lz(k) - lc(k)), 0.0, 1e-10) << k;
  }
  // f(9) Lambda(9) = log 3, but -L'/L has 2 log 3 at n = 9
  EXPECT_NEAR(a(9).real(), 2 * std::log(3.0), 1e-12);
}
