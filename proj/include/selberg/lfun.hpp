#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "selberg/arith.hpp"
#include "selberg/character.hpp"
#include "selberg/errors.hpp"
#include "selberg/gamma.hpp"
#include "selberg/hurwitz.hpp"

namespace selberg {

struct GammaFactor {
  double lambda = 0.5;  // > 0
  cplx mu{};            // Re mu >= 0
};

enum class DescriptorKind { unit, zeta, dirichlet, product };

/// Functional-equation datum of a degree-1 Selberg-class function, or of a
/// product of such. Derived invariants (degree, lambda, mu) are recomputed
/// from the gamma factors on every call.
///
/// Normalizations: zeta uses Q = pi^{-1/2}, one factor (1/2, 0), omega = 1.
/// L(s + i theta, chi) for primitive chi mod q of parity a uses
/// Q = sqrt(q/pi), one factor (1/2, (a + i theta)/2) and
/// omega = tau(chi) / (i^a sqrt q) * Q^{-2 i theta}.
class SelbergDescriptor {
 public:
  static SelbergDescriptor unit() {
    SelbergDescriptor d;
    d.kind_ = DescriptorKind::unit;
    d.label_ = "unit";
    d.q_ = 1.0;
    return d;
  }

  static SelbergDescriptor zeta() {
    SelbergDescriptor d;
    d.kind_ = DescriptorKind::zeta;
    d.label_ = "zeta[Q=pi^-1/2,lambda=1/2,mu=0,omega=1]";
    d.q_ = 1.0 / std::sqrt(std::numbers::pi);
    d.gamma_ = {{0.5, 0.0}};
    d.omega_ = 1.0;
    d.polar_order_ = 1;
    return d;
  }

  static SelbergDescriptor dirichlet(std::uint64_t modulus, std::uint64_t index, double theta = 0.0) {
    auto chi = std::make_shared<const Character>(modulus, index);
    if (modulus == 1) throw DomainError("the character mod 1 gives zeta; use the zeta descriptor");
    if (!chi->is_primitive())
      throw DomainError("character " + std::to_string(index) + " mod " + std::to_string(modulus) +
                        " is not primitive (conductor " + std::to_string(chi->conductor()) + ")");
    SelbergDescriptor d;
    d.kind_ = DescriptorKind::dirichlet;
    d.chi_ = chi;
    d.theta_ = theta;
    d.q_ = std::sqrt(double(modulus) / std::numbers::pi);
    d.gamma_ = {{0.5, cplx(chi->parity(), theta) / 2.0}};
    d.omega_ = chi->root_number() * std::exp(cplx(0.0, -2.0 * theta * std::log(d.q_)));
    d.polar_order_ = 0;
    d.label_ = "dirichlet:" + std::to_string(modulus) + "," + std::to_string(index);
    if (theta != 0.0) d.label_ += "," + format_double(theta);
    return d;
  }

  static SelbergDescriptor product(std::vector<SelbergDescriptor> factors) {
    if (factors.size() < 2) throw DomainError("a product descriptor needs at least two factors");
    SelbergDescriptor d;
    d.kind_ = DescriptorKind::product;
    d.q_ = 1.0;
    d.omega_ = 1.0;
    d.label_ = "product:";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& f = factors[i];
      if (f.kind_ == DescriptorKind::product || f.kind_ == DescriptorKind::unit)
        throw DomainError("product factors must be degree-1 descriptors");
      d.q_ *= f.q_;
      d.omega_ *= f.omega_;
      d.gamma_.insert(d.gamma_.end(), f.gamma_.begin(), f.gamma_.end());
      d.polar_order_ += f.polar_order_;
      d.label_ += (i ? ";" : "") + f.spec();
    }
    d.factors_ = std::move(factors);
    return d;
  }

  DescriptorKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double Q() const { return q_; }
  const std::vector<GammaFactor>& gamma_factors() const { return gamma_; }
  cplx omega() const { return omega_; }
  double theta() const { return theta_; }
  int polar_order() const { return polar_order_; }
  const std::vector<SelbergDescriptor>& factors() const { return factors_; }
  const Character* character() const { return chi_.get(); }
  bool is_zeta() const { return kind_ == DescriptorKind::zeta; }

  /// Canonical spec string accepted by the descriptor parser.
  std::string spec() const {
    switch (kind_) {
      case DescriptorKind::unit: return "unit";
      case DescriptorKind::zeta: return "zeta";
      case DescriptorKind::dirichlet: {
        std::string s = "dirichlet:" + std::to_string(chi_->modulus()) + "," + std::to_string(chi_->index());
        if (theta_ != 0.0) s += "," + format_double(theta_);
        return s;
      }
      case DescriptorKind::product: {
        std::string s = "product:";
        for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? ";" : "") + factors_[i].spec();
        return s;
      }
    }
    return "";
  }

  /// d_L = 2 sum lambda_j
  double degree() const {
    double d = 0.0;
    for (const auto& g : gamma_) d += 2.0 * g.lambda;
    return d;
  }
  /// lambda = prod lambda_j^{2 lambda_j}
  double lambda() const {
    double l = 1.0;
    for (const auto& g : gamma_) l *= std::pow(g.lambda, 2.0 * g.lambda);
    return l;
  }
  /// mu = 2 sum (1 - 2 mu_j)
  cplx mu() const {
    cplx m{};
    for (const auto& g : gamma_) m += 2.0 * (1.0 - 2.0 * g.mu);
    return m;
  }

  bool real_coefficients() const {
    switch (kind_) {
      case DescriptorKind::unit:
      case DescriptorKind::zeta: return true;
      case DescriptorKind::dirichlet: return theta_ == 0.0 && chi_->is_real();
      case DescriptorKind::product:
        for (const auto& f : factors_)
          if (!f.real_coefficients()) return false;
        return true;
    }
    return false;
  }

  /// Dirichlet coefficients f(1..n). Products convolve their factors.
  ArithmeticFunction coefficients(std::size_t n) const {
    switch (kind_) {
      case DescriptorKind::unit: return ArithmeticFunction::identity(n);
      case DescriptorKind::zeta: return ArithmeticFunction::ones(n);
      case DescriptorKind::dirichlet:
        return ArithmeticFunction::generate(n, [&](std::size_t k) {
          return (*chi_)(std::uint64_t(k)) * std::exp(cplx(0.0, -theta_ * std::log(double(k))));
        });
      case DescriptorKind::product: {
        ArithmeticFunction acc = factors_.front().coefficients(n);
        for (std::size_t i = 1; i < factors_.size(); ++i) acc = convolve(acc, factors_[i].coefficients(n), n);
        return acc;
      }
    }
    return {};
  }

  /// Points where the function has a pole (s = 1 for every zeta factor).
  bool has_pole_near(cplx s, double radius) const { return polar_order_ > 0 && std::abs(s - 1.0) <= radius; }

  static std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  SelbergDescriptor() = default;

  DescriptorKind kind_ = DescriptorKind::unit;
  std::string label_;
  double q_ = 1.0;
  std::vector<GammaFactor> gamma_;
  cplx omega_{1.0, 0.0};
  double theta_ = 0.0;
  int polar_order_ = 0;
  std::shared_ptr<const Character> chi_;
  std::vector<SelbergDescriptor> factors_;
};

/// L(s) with an error bound of at most degree * target_abs_err.
inline EvalResult evaluate_with_error(const SelbergDescriptor& L, cplx s, const EvalParams& params = {}) {
  switch (L.kind()) {
    case DescriptorKind::unit: return {1.0, 0.0};
    case DescriptorKind::zeta: return hurwitz_zeta(s, 1.0, params);
    case DescriptorKind::dirichlet: {
      const Character& chi = *L.character();
      const std::uint64_t q = chi.modulus();
      const cplx w = s + cplx(0.0, L.theta());
      // each Hurwitz call carries its own bound; scale the per-call target so the sum meets it
      EvalParams p = params;
      p.target_abs_err = params.target_abs_err / double(q);
      p.high_t_abs_err = params.high_t_abs_err / double(q);
      const cplx scale = std::exp(-w * std::log(double(q)));
      cplx sum{};
      double err = 0.0;
      for (std::uint64_t r = 1; r <= q; ++r) {
        const cplx c = chi(r);
        if (c == cplx{}) continue;
        // sum chi(r) = 0, so the 1/(w - 1) parts cancel and may be dropped
        const auto h = hurwitz_zeta(w, double(r) / double(q), p, /*subtract_pole=*/true);
        sum += c * h.value;
        err += h.error_bound;
      }
      return {scale * sum, std::abs(scale) * err};
    }
    case DescriptorKind::product: {
      cplx value = 1.0;
      std::vector<EvalResult> parts;
      for (const auto& f : L.factors()) parts.push_back(evaluate_with_error(f, s, params));
      for (const auto& r : parts) value *= r.value;
      double err = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        double others = 1.0;
        for (std::size_t j = 0; j < parts.size(); ++j)
          if (j != i) others *= std::abs(parts[j].value) + parts[j].error_bound;
        err += others * parts[i].error_bound;
      }
      return {value, err};
    }
  }
  return {};
}

inline cplx evaluate(const SelbergDescriptor& L, cplx s, const EvalParams& params = {}) {
  return evaluate_with_error(L, s, params).value;
}

struct DerivativeResult {
  cplx value;
  double error_estimate = 0.0;
};

/// L'(s) by the trapezoidal Cauchy integral on |z - s| = radius with `nodes`
/// equispaced points. The error estimate compares against the half-node rule.
inline DerivativeResult evaluate_derivative_with_error(const SelbergDescriptor& L, cplx s,
                                                       const EvalParams& params = {}, double radius = 1e-2,
                                                       int nodes = 32) {
  if (nodes < 4 || nodes % 2 != 0) throw DomainError("Cauchy derivative needs an even node count >= 4");
  if (L.has_pole_near(s, radius + 1e-6)) throw GeometryError("Cauchy circle intersects the pole at s = 1");
  // values enter divided by the radius, so tighten the evaluation target to match
  EvalParams p = params;
  p.target_abs_err *= std::min(1.0, radius);
  p.high_t_abs_err *= std::min(1.0, radius);
  cplx full{}, half{};
  for (int k = 0; k < nodes; ++k) {
    const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / nodes);
    const cplx term = evaluate(L, s + radius * e, p) / e;
    full += term;
    if (k % 2 == 0) half += term;
  }
  full /= double(nodes) * radius;
  half /= double(nodes / 2) * radius;
  return {full, std::abs(full - half)};
}

inline cplx evaluate_derivative(const SelbergDescriptor& L, cplx s, const EvalParams& params = {}) {
  return evaluate_derivative_with_error(L, s, params).value;
}

/// log H_L(s) up to multiples of 2 pi i.
inline cplx log_h_factor(const SelbergDescriptor& L, cplx s) {
  cplx acc = std::log(L.omega()) + (1.0 - 2.0 * s) * std::log(L.Q());
  for (const auto& g : L.gamma_factors())
    acc += lgamma(g.lambda * (1.0 - s) + std::conj(g.mu)) - lgamma(g.lambda * s + g.mu);
  return acc;
}

/// H_L(s) = omega Q^{1-2s} prod Gamma(lambda_j (1-s) + conj mu_j) / Gamma(lambda_j s + mu_j)
inline cplx h_factor(const SelbergDescriptor& L, cplx s) { return std::exp(log_h_factor(L, s)); }

/// Leading Stirling behaviour of H_L(sigma + it), t > 0:
/// (lambda Q^2 t^d)^{1/2 - sigma} exp(-it log(lambda Q^2 (t/e)^d)) e^{i pi (mu - d)/4} omega.
inline cplx h_factor_stirling(const SelbergDescriptor& L, cplx s) {
  const double sigma = s.real(), t = s.imag();
  if (t <= 0) throw DomainError("Stirling main term needs Im s > 0");
  const double d = L.degree();
  const double lq2 = L.lambda() * L.Q() * L.Q();
  const double log_amp = (0.5 - sigma) * (std::log(lq2) + d * std::log(t));
  const double phase = -t * (std::log(lq2) + d * (std::log(t) - 1.0));
  const cplx rot = std::exp(cplx(0.0, std::numbers::pi / 4.0) * (L.mu() - d));
  return std::exp(cplx(log_amp, phase)) * rot * L.omega();
}

/// log(lambda Q^2 t^{d_L}), the main term of -H'/H at height t = Im s.
///
/// This is the t-derivative of the Stirling phase t log(lambda Q^2 (t/e)^{d_L});
/// the exact -H'/H differs from it by O(1/t).
inline double h_log_derivative_asymptotic(const SelbergDescriptor& L, cplx s) {
  const double t = s.imag();
  if (t < 2.0) throw DomainError("asymptotic -H'/H needs Im s >= 2");
  return std::log(L.lambda() * L.Q() * L.Q()) + L.degree() * std::log(t);
}

/// |L(s) - H_L(s) conj(L(1 - conj s))|
inline double functional_equation_residual(const SelbergDescriptor& L, cplx s, const EvalParams& params = {}) {
  const cplx lhs = evaluate(L, s, params);
  const cplx rhs = h_factor(L, s) * std::conj(evaluate(L, 1.0 - std::conj(s), params));
  return std::abs(lhs - rhs);
}

/// lambda_alpha for a descriptor's own coefficients.
inline ArithmeticFunction lambda_alpha(const SelbergDescriptor& L, cplx alpha, std::size_t n,
                                       LambdaPath path = LambdaPath::automatic) {
  if (alpha == cplx(1.0)) throw DomainError("alpha = 1 excluded: Lambda(n; L, 1) is not defined");
  return lambda_alpha(L.coefficients(n), alpha, n, path);
}

}  // namespace selberg
