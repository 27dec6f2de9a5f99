#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "selberg/dist.hpp"
#include "selberg/errors.hpp"
#include "selberg/lfun.hpp"
#include "selberg/primes.hpp"

namespace selberg {

using PrimePhases = std::map<std::uint64_t, double>;  // p -> theta_p; absent primes use 0

namespace detail {

inline cplx unit_phase(double theta) { return std::polar(1.0, 2.0 * std::numbers::pi * theta); }

inline double phase_of(const PrimePhases& thetas, std::uint64_t p) {
  const auto it = thetas.find(p);
  return it == thetas.end() ? 0.0 : it->second;
}

}  // namespace detail

/// prod_{p <= y} (1 - e(theta_p) p^{-s})^{-1}, accumulated as a sum of logarithms.
inline cplx zeta_truncated(cplx s, double y, const PrimePhases& thetas = {}) {
  if (!(s.real() > 0.0)) throw DomainError("truncated Euler product needs Re s > 0");
  if (y < 2.0) return 1.0;
  cplx log_sum{};
  for (auto p : primes_up_to(std::size_t(std::floor(y)))) {
    const cplx factor = 1.0 - detail::unit_phase(detail::phase_of(thetas, p)) * std::exp(-s * std::log(double(p)));
    if (std::abs(factor) < 1e-14) throw SingularityError("Euler factor vanishes at p = " + std::to_string(p));
    log_sum -= std::log(factor);
  }
  return std::exp(log_sum);
}

/// Same product multiplied out directly; reference for the log-space form.
inline cplx zeta_truncated_direct(cplx s, double y, const PrimePhases& thetas = {}) {
  cplx prod = 1.0;
  if (y < 2.0) return prod;
  for (auto p : primes_up_to(std::size_t(std::floor(y))))
    prod /= 1.0 - detail::unit_phase(detail::phase_of(thetas, p)) * std::exp(-s * std::log(double(p)));
  return prod;
}

struct MeanSquare {
  double value = 0.0;
  double error_estimate = 0.0;  // |S_h - S_2h| / 15
  double step = 0.0;
};

/// (1/(T - t_start)) int_{t_start}^T |zeta(sigma + it) - zeta_y(sigma + it)|^2 dt by composite
/// Simpson. t_start = 0 is the plain mean over [0, T]; a positive t_start drops the stretch
/// next to the pole, which does not affect the T -> infinity limit.
inline MeanSquare bohr_mean_square(double sigma, double y, double T, double step = 0.05, double t_start = 0.0,
                                   const EvalParams& params = {}, unsigned threads = 0) {
  if (!(t_start >= 0.0)) throw DomainError("mean square window must start at t >= 0");
  if (!(T > t_start)) throw DomainError("mean square needs a non-empty window");
  if (!(step > 0.0 && step <= 0.05)) throw DomainError("quadrature step must lie in (0, 0.05]");
  if (!(sigma >= 0.6)) throw DomainError("sigma must stay at least 0.1 to the right of 1/2");
  const auto zeta = SelbergDescriptor::zeta();
  // even number of intervals, and divisible by 4 so the coarse rule is Simpson as well
  const double len = T - t_start;
  int n = int(std::ceil(len / step));
  n += (4 - n % 4) % 4;
  const double h = len / n;
  std::vector<double> f(std::size_t(n) + 1);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nt = std::max(1u, std::min<unsigned>(threads ? threads : hw, unsigned(f.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(nt);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < f.size();) {
          const cplx s(sigma, t_start + h * double(i));
          f[i] = std::norm(evaluate(zeta, s, params) - zeta_truncated(s, y));
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  auto simpson = [&](int stride) {
    const double hh = h * stride;
    double s = f.front() + f.back();
    for (int i = stride, j = 1; i < n; i += stride, ++j) s += (j % 2 ? 4.0 : 2.0) * f[std::size_t(i)];
    return s * hh / 3.0;
  };
  const double fine = simpson(1), coarse = simpson(2);
  return {fine / len, std::abs(fine - coarse) / 15.0 / len, h};
}

/// Closed disk or closed rectangle strictly inside 1/2 < sigma < 1.
class CompactSet {
 public:
  enum class Kind { disk, rectangle };
  static constexpr double kMargin = 1e-3;

  static CompactSet disk(cplx center, double radius) {
    if (!(radius > 0.0)) throw GeometryError("disk radius must be positive");
    CompactSet k(Kind::disk);
    k.center_ = center;
    k.radius_ = radius;
    k.check(center.real() - radius, center.real() + radius);
    return k;
  }

  static CompactSet rectangle(cplx lower_left, cplx upper_right) {
    if (!(upper_right.real() > lower_left.real() && upper_right.imag() > lower_left.imag()))
      throw GeometryError("rectangle corners must be ordered");
    CompactSet k(Kind::rectangle);
    k.lo_ = lower_left;
    k.hi_ = upper_right;
    k.check(lower_left.real(), upper_right.real());
    return k;
  }

  Kind kind() const { return kind_; }
  cplx center() const { return kind_ == Kind::disk ? center_ : 0.5 * (lo_ + hi_); }
  double radius() const { return radius_; }
  cplx lower_left() const { return lo_; }
  cplx upper_right() const { return hi_; }

  double t_min() const { return kind_ == Kind::disk ? center_.imag() - radius_ : lo_.imag(); }
  double t_max() const { return kind_ == Kind::disk ? center_.imag() + radius_ : hi_.imag(); }

  bool contains(cplx s, double slack = 1e-12) const {
    if (kind_ == Kind::disk) return std::abs(s - center_) <= radius_ + slack;
    return s.real() >= lo_.real() - slack && s.real() <= hi_.real() + slack && s.imag() >= lo_.imag() - slack &&
           s.imag() <= hi_.imag() + slack;
  }

  /// Interior grid at the given pitch plus the boundary at a quarter of it.
  std::vector<cplx> sample(double pitch) const {
    if (!(pitch > 0.0)) throw DomainError("sampling pitch must be positive");
    std::vector<cplx> pts;
    if (kind_ == Kind::disk) {
      for (double x = -radius_; x <= radius_ + 1e-12; x += pitch)
        for (double y = -radius_; y <= radius_ + 1e-12; y += pitch)
          if (x * x + y * y <= radius_ * radius_) pts.push_back(center_ + cplx(x, y));
      const double circ = 2.0 * std::numbers::pi * radius_;
      const int nb = std::max(8, int(std::ceil(4.0 * circ / pitch)));
      for (int i = 0; i < nb; ++i) pts.push_back(center_ + std::polar(radius_, 2.0 * std::numbers::pi * i / nb));
    } else {
      const double w = hi_.real() - lo_.real(), h = hi_.imag() - lo_.imag();
      const int nx = std::max(1, int(std::ceil(w / pitch))), ny = std::max(1, int(std::ceil(h / pitch)));
      for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) pts.emplace_back(lo_.real() + w * i / nx, lo_.imag() + h * j / ny);
      const int bx = 4 * nx, by = 4 * ny;
      for (int i = 0; i < bx; ++i) {
        const double x = lo_.real() + w * i / bx;
        pts.emplace_back(x, lo_.imag());
        pts.emplace_back(x + w / bx, hi_.imag());
      }
      for (int j = 0; j < by; ++j) {
        const double y = lo_.imag() + h * j / by;
        pts.emplace_back(hi_.real(), y);
        pts.emplace_back(lo_.real(), y + h / by);
      }
    }
    return pts;
  }

 private:
  explicit CompactSet(Kind k) : kind_(k) {}

  void check(double s_lo, double s_hi) const {
    if (!(s_lo >= 0.5 + kMargin && s_hi <= 1.0 - kMargin))
      throw GeometryError("compact set must lie in 1/2 < sigma < 1 with margin 1e-3");
  }

  Kind kind_;
  cplx center_{};
  double radius_ = 0.0;
  cplx lo_{}, hi_{};
};

/// Target function for the approximation statistics.
class TargetFunction {
 public:
  TargetFunction(std::string label, std::function<cplx(cplx)> f) : label_(std::move(label)), f_(std::move(f)) {}

  static TargetFunction constant(cplx c) {
    if (c == cplx{}) throw DomainError("constant target must be non-zero");
    return {"const:" + SelbergDescriptor::format_double(c.real()) + "," + SelbergDescriptor::format_double(c.imag()),
            [c](cplx) { return c; }};
  }

  /// exp(c0 + c1 s + c2 s^2 + ...): never zero.
  static TargetFunction exp_poly(std::vector<cplx> coeffs) {
    std::string label = "exp-poly:";
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      label += (i ? ";" : "") + SelbergDescriptor::format_double(coeffs[i].real()) + "," +
               SelbergDescriptor::format_double(coeffs[i].imag());
    return {label, [coeffs](cplx s) {
              cplx acc{};
              for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
              return std::exp(acc);
            }};
  }

  /// s -> zeta(s + delta).
  static TargetFunction zeta_shift(cplx delta, EvalParams params = {}) {
    const auto z = SelbergDescriptor::zeta();
    return {"zeta-shift:" + SelbergDescriptor::format_double(delta.real()) + "," +
                SelbergDescriptor::format_double(delta.imag()),
            [z, delta, params](cplx s) { return evaluate(z, s + delta, params); }};
  }

  cplx operator()(cplx s) const { return f_(s); }
  const std::string& label() const { return label_; }

  /// Minimum modulus over the sampling grid of K.
  double min_modulus(const CompactSet& K, double pitch = 0.01) const {
    double m = std::numeric_limits<double>::infinity();
    for (cplx s : K.sample(pitch)) m = std::min(m, std::abs(f_(s)));
    return m;
  }

  /// Throws DomainError when f gets within 1e-6 of zero on the grid.
  void require_non_vanishing(const CompactSet& K, double pitch = 0.01) const {
    if (!(min_modulus(K, pitch) >= 1e-6)) throw DomainError("target function " + label_ + " vanishes on K");
  }

 private:
  std::string label_;
  std::function<cplx(cplx)> f_;
};

struct HitReport {
  double rate = 0.0;
  std::size_t hits = 0;
  std::size_t N = 0;
  double pitch = 0.0;
  std::vector<double> sup_distance;  // per k: grid max of |zeta(s + i gamma_k) - f(s)|
};

/// Fraction of k <= N with max_{s in K} |zeta(s + i gamma_{n_k}) - f(s)| < eps (grid sup).
inline HitReport hit_rate(std::span<const SubsequenceEntry> subseq, const CompactSet& K, const TargetFunction& f,
                          double eps, std::size_t N, double pitch = 0.01, const EvalParams& params = {},
                          unsigned threads = 0) {
  if (N == 0 || N > subseq.size()) throw RangeError("hit rate length out of range");
  if (!(pitch > 0.0 && pitch <= 0.01)) throw DomainError("grid pitch must lie in (0, 0.01]");
  f.require_non_vanishing(K, pitch);
  for (std::size_t k = 0; k < N; ++k)
    if (subseq[k].gamma + K.t_max() > params.t_max || subseq[k].gamma + K.t_min() < -params.t_max)
      throw RangeError("shifted compact set exceeds the evaluation ceiling");
  const auto zeta = SelbergDescriptor::zeta();
  const auto grid = K.sample(pitch);
  std::vector<cplx> target(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) target[i] = f(grid[i]);

  HitReport r;
  r.N = N;
  r.pitch = pitch;
  r.sup_distance.assign(N, 0.0);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nt = std::max(1u, std::min<unsigned>(threads ? threads : hw, unsigned(N)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(nt);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k; (k = next.fetch_add(1)) < N;) {
          const cplx shift(0.0, subseq[k].gamma);
          double sup = 0.0;
          for (std::size_t i = 0; i < grid.size(); ++i)
            sup = std::max(sup, std::abs(evaluate(zeta, grid[i] + shift, params) - target[i]));
          r.sup_distance[k] = sup;
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  for (double d : r.sup_distance)
    if (d < eps) ++r.hits;
  r.rate = double(r.hits) / double(N);
  return r;
}

struct JointWeyl {
  std::vector<int> c;  // exponent per prime, primes ascending
  cplx value{};
};

/// (1/N) sum_k e(gamma_{n_k} sum_p c_p log p / 2pi) for all non-zero integer vectors c
/// over primes <= p_max with |c_p| <= c_max, one representative per +-c pair.
inline std::vector<JointWeyl> joint_weyl_sums(std::span<const SubsequenceEntry> subseq, std::size_t N,
                                              std::uint64_t p_max = 7, int c_max = 2) {
  if (N == 0 || N > subseq.size()) throw RangeError("joint Weyl length out of range");
  const auto primes = primes_up_to(p_max);
  const std::size_t d = primes.size();
  std::vector<JointWeyl> out;
  std::vector<int> c(d, -c_max);
  for (;;) {
    // keep vectors whose first non-zero entry is positive
    auto first = std::find_if(c.begin(), c.end(), [](int v) { return v != 0; });
    if (first != c.end() && *first > 0) {
      double freq = 0.0;
      for (std::size_t j = 0; j < d; ++j) freq += c[j] * std::log(double(primes[j]));
      double re = 0.0, im = 0.0;
      for (std::size_t k = 0; k < N; ++k) {
        const double ph = std::fmod(subseq[k].gamma * freq, 2.0 * std::numbers::pi);
        re += std::cos(ph);
        im += std::sin(ph);
      }
      out.push_back({c, cplx(re, im) / double(N)});
    }
    std::size_t j = 0;
    while (j < d && c[j] == c_max) c[j++] = -c_max;
    if (j == d) break;
    ++c[j];
  }
  return out;
}

}  // namespace selberg
