#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "selberg/explicit.hpp"

using namespace selberg;

namespace {

constexpr double kPi = std::numbers::pi;

AlphaPoint point(double beta, double gamma) {
  AlphaPoint p;
  p.beta = beta;
  p.gamma = gamma;
  p.kind = beta >= 0 ? PointKind::non_trivial : PointKind::boundary_flagged;
  return p;
}

const SweepResult& zeta_zeros_200() {
  static const SweepResult r = sweep(SelbergDescriptor::zeta(), 0.0, 200.0);
  return r;
}

}  // namespace

TEST(Explicit, LhsBasics) {
  EXPECT_EQ(lhs_power_sum({}, 2.0, 1), cplx{});
  const std::vector<AlphaPoint> one{point(0.5, 14.1347)};
  const cplx v = lhs_power_sum(one, 2.0, 1);
  EXPECT_NEAR(std::abs(v), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::remainder(std::arg(v) - 14.1347 * std::log(2.0), 2 * kPi), 0.0, 1e-12);
  EXPECT_THROW(lhs_power_sum(one, 1.0, 1), DomainError);
  EXPECT_THROW(lhs_power_sum(one, 0.5, -1), DomainError);
  EXPECT_THROW(lhs_power_sum(one, 2.0, 0), DomainError);
}

TEST(Explicit, CompensatedMatchesNaive) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> b(0.0, 1.0), g(0.0, 1e4);
  std::vector<AlphaPoint> pts;
  for (int i = 0; i < 10000; ++i) pts.push_back(point(b(rng), g(rng)));
  std::sort(pts.begin(), pts.end(), [](auto& p, auto& q) { return p.gamma < q.gamma; });
  for (double x : {1.5, 2.0, 7.3}) {
    const cplx a = lhs_power_sum(pts, x, 1), n = lhs_power_sum_naive(pts, x, 1);
    EXPECT_LT(std::abs(a - n), 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST(Explicit, ScalingIdentityPerPoint) {
  for (const auto& p : zeta_zeros_200().points)
    for (double x : {2.0, 3.5}) {
      const std::vector<AlphaPoint> one{p};
      EXPECT_LT(std::abs(lhs_power_sum(one, x, -1) * lhs_power_sum(one, x, 1) - 1.0), 1e-12);
    }
}

TEST(Explicit, MainTermT1) {
  const auto z = SelbergDescriptor::zeta();
  EXPECT_NEAR(main_term_t1(z, 0.0, 2.0, 500.0).real(), -500.0 / (2 * kPi) * std::log(2.0), 1e-10);
  EXPECT_NEAR(main_term_t1(z, 0.0, 2.0, 500.0).real(), -55.157, 2e-3);  // quoted value is truncated
  EXPECT_EQ(main_term_t1(z, 0.0, 2.5, 500.0), cplx{});
  EXPECT_NEAR(main_term_t1(z, 2.0, 4.0, 100.0).real(), 100.0 / (2 * kPi) * 3 * std::log(2.0), 1e-10);
  EXPECT_THROW(main_term_t1(z, 1.0, 2.0, 100.0), DomainError);
  EXPECT_THROW(main_term_t1(z, 0.0, 1.0, 100.0), DomainError);
}

TEST(Explicit, MainTermT2T3) {
  const auto z = SelbergDescriptor::zeta();
  const double T = 300.0;
  EXPECT_NEAR(main_term_t2_t3(z, 3.0, T).real(), -T / (6 * kPi) * std::log(3.0), 1e-10);
  EXPECT_EQ(main_term_t2_t3(z, 6.0, T), cplx{});
  const auto prod = SelbergDescriptor::product({z, SelbergDescriptor::dirichlet(4, 1)});
  EXPECT_NEAR(main_term_t2_t3(prod, 2.0, T).real(), -T / (4 * kPi) * std::log(2.0), 1e-10);
  // -L'/L of the product has 2 log 3 at n = 9 (chi(9) = 1)
  EXPECT_NEAR(main_term_t2_t3(prod, 9.0, T).real(), -T / (18 * kPi) * 2 * std::log(3.0), 1e-10);
  // conjugation of a complex coefficient
  const auto chi5 = SelbergDescriptor::dirichlet(5, 1);
  const cplx c = lambda_alpha(chi5, 0.0, 2)(2);
  EXPECT_GT(std::abs(c.imag()), 0.1);
  EXPECT_NEAR(std::abs(main_term_t2_t3(chi5, 2.0, T) + T / (4 * kPi) * std::conj(c)), 0.0, 1e-10);
}

TEST(Explicit, NearestPrimePower) {
  EXPECT_DOUBLE_EQ(detail::dist_to_prime_power(2.5), 0.5);
  EXPECT_NEAR(detail::dist_to_prime_power(6.2), 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(detail::dist_to_prime_power(10.0), 1.0);
  EXPECT_DOUBLE_EQ(detail::dist_to_prime_power(8.0), 0.0);
  EXPECT_NEAR(detail::dist_to_prime_power(1.3), 0.7, 1e-12);
}

TEST(Explicit, ReferenceScaleAssembly) {
  const auto z = SelbergDescriptor::zeta();
  const double T = 1000.0, eps = 0.1, sigma = 1.0;
  {
    const double x = 2.0, xs = std::pow(x, sigma + eps), lT = std::log(T), lx = std::log(x);
    const double want = xs * (1 + lT * (1 + 1 / lx)) + (lT * (1 + 1 / lx) + std::min(T, 1 / lx)) / (x * x);
    EXPECT_NEAR(reference_scale(Theorem::t1, z, x, T, eps, sigma), want, 1e-10 * want);
  }
  {
    // x = 2.5: the indicator term contributes x^{sigma+eps} min{T/2.5, 2}
    const double x = 2.5, xs = std::pow(x, sigma + eps), lT = std::log(T), lx = std::log(x);
    const double base = xs * (1 + lT * (1 + 1 / lx)) + (lT * (1 + 1 / lx) + std::min(T, 1 / lx)) / (x * x);
    EXPECT_NEAR(reference_scale(Theorem::t1, z, x, T, eps, sigma) - base, xs * 2.0, 1e-9);
  }
  {
    const double s3 = reference_scale(Theorem::t3, z, 2.0, T, 0.0, sigma);
    const double sq = std::pow(std::log(T), 2) * std::log(6.0);
    EXPECT_GT(s3, sq);
    const double lx = std::log(2.0), llx = std::log(std::log(6.0));
    const double want = lx * (T / 2) + sq + (1 + lx) * std::log(4.0) * llx + 1 / (4.0 * lx) +
                        std::log(T) * (1 / lx + lx + llx);
    EXPECT_NEAR(s3, want, 1e-9 * want);
    // m = 7 away from zeta
    EXPECT_GT(reference_scale(Theorem::t3, SelbergDescriptor::dirichlet(4, 1), 2.0, T, 0.0, sigma), 1e8);
  }
  // <x> reading: at x = 10 the prime-power bracket is 1, the integer bracket 0
  EXPECT_LT(reference_scale(Theorem::t3, z, 10.0, T, 0.0, sigma, true),
            reference_scale(Theorem::t3, z, 10.0, T, 0.0, sigma, false));
  EXPECT_THROW(reference_scale(Theorem::t2, z, 2.0, T, 0.5, sigma), DomainError);
  EXPECT_THROW(reference_scale(Theorem::t2, z, 2.0, T, 0.0, sigma), DomainError);
  EXPECT_THROW(reference_scale(Theorem::t1, z, 2.0, T, 0.0, sigma), DomainError);
}

TEST(Explicit, PreconditionsAndDegrees) {
  const auto z = SelbergDescriptor::zeta();
  const auto prod = SelbergDescriptor::product({z, SelbergDescriptor::dirichlet(4, 1)});
  const std::vector<double> Ts{50.0};
  const auto& pts = zeta_zeros_200().points;
  EXPECT_THROW(run_formula_check(Theorem::t2, z, 0.0, 2.0, Ts, pts), DomainError);
  EXPECT_THROW(run_formula_check(Theorem::t3, prod, 0.0, 2.0, Ts, pts), DomainError);
  EXPECT_THROW(run_formula_check(Theorem::t1, z, 1.0, 2.0, Ts, pts), DomainError);
  EXPECT_THROW(run_formula_check(Theorem::t1, z, 0.0, 1.0, Ts, pts), DomainError);
  EXPECT_THROW(run_formula_check(Theorem::t1, z, 2.0, 2.0, Ts, std::span<const AlphaPoint>{}), InsufficientDataError);
  EXPECT_EQ(parse_theorem("t3"), Theorem::t3);
  EXPECT_THROW(parse_theorem("t4"), ParseError);
}

TEST(Explicit, ZetaTheorem1AtTwo) {
  const auto z = SelbergDescriptor::zeta();
  const std::vector<double> Ts{100.0, 200.0};
  const auto c = run_formula_check(Theorem::t1, z, 0.0, 2.0, Ts, zeta_zeros_200().points);
  ASSERT_EQ(c.reports.size(), 2u);
  for (const auto& r : c.reports) {
    EXPECT_EQ(r.residual, r.lhs - r.main_term);
    EXPECT_LT(std::abs(r.residual), 20 * r.reference_scale);
    EXPECT_LT(std::abs(r.residual) / std::abs(r.main_term), 0.2);
  }
  EXPECT_EQ(c.reports[0].points_used, 29);
  EXPECT_EQ(c.reports[1].points_used, 79);
  ASSERT_TRUE(c.slope.has_value());
}

TEST(Explicit, ReportsArePureInT) {
  const auto z = SelbergDescriptor::zeta();
  const auto& all = zeta_zeros_200().points;
  std::vector<AlphaPoint> first(all.begin(), all.begin() + 29);  // gamma <= 100
  const std::vector<double> Ts{100.0};
  const auto a = run_formula_check(Theorem::t1, z, 0.0, 3.0, Ts, first).reports[0];
  const auto b = run_formula_check(Theorem::t1, z, 0.0, 3.0, Ts, all).reports[0];
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.points_used, b.points_used);
}

TEST(Explicit, ConjugateAlphaMirrorsLowerHalfPlane) {
  // for real coefficients, L(s) = conj(alpha) at conj(rho) whenever L(rho) = alpha
  const auto z = SelbergDescriptor::zeta();
  const auto up = sweep_window(z, {0.0, 1.0}, 0.05, 80.0);
  const auto down = sweep_window(z, {0.0, -1.0}, -80.0, -0.05);
  ASSERT_EQ(up.points.size(), down.points.size());
  std::vector<AlphaPoint> mirrored;
  for (const auto& p : down.points) mirrored.push_back(point(p.beta, -p.gamma));
  std::sort(mirrored.begin(), mirrored.end(), [](auto& p, auto& q) { return p.gamma < q.gamma; });
  for (int sign : {1, -1}) {
    const cplx a = lhs_power_sum(theorem_points(up.points, 80.0), 2.0, sign);
    const cplx b = lhs_power_sum(theorem_points(mirrored, 80.0), 2.0, sign);
    EXPECT_LT(std::abs(a - b), 1e-10);
  }
  EXPECT_LT(std::abs(main_term_t1(z, {0.0, 1.0}, 4.0, 80.0) - std::conj(main_term_t1(z, {0.0, -1.0}, 4.0, 80.0))),
            1e-12);
}

TEST(Explicit, BoundaryFlaggedPointsExcluded) {
  const std::vector<AlphaPoint> pts{point(0.5, 10.0), point(-0.2, 12.0), point(0.7, 30.0)};
  const std::vector<double> Ts{20.0};
  const auto c = run_formula_check(Theorem::t1, SelbergDescriptor::zeta(), 2.0, 2.0, Ts, pts);
  EXPECT_EQ(c.reports[0].points_used, 1);
  EXPECT_EQ(c.reports[0].points_excluded, 1);
}
