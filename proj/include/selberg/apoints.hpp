#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "selberg/alpha_point.hpp"
#include "selberg/arith.hpp"
#include "selberg/errors.hpp"
#include "selberg/lfun.hpp"

namespace selberg {

/// Rectangle [sigma_lo, sigma_hi] x [t_lo, t_hi] searched for alpha-points.
struct SearchWindow {
  double t_lo = 0.05;
  double t_hi = 0.05;
  double sigma_lo = -0.5;
  double sigma_hi = 2.0;
  double dt = 0.05;          // base sampling step along every edge
  double tolerance = 1e-9;   // residual bound for refined points
};

struct SweepParams {
  EvalParams eval{};
  double dt = 0.05;
  double tolerance = 1e-9;
  double sigma_lo = -0.5;
  std::optional<double> sigma_hi;  // default: right_edge_for(L, alpha)
  double chunk_length = 20.0;      // t-extent of independently processed sub-windows
  unsigned threads = 0;            // 0 = hardware concurrency
  int max_edge_shifts = 5;
  double merge_radius = 1e-6;
  double edge_clearance = 1e-4;
  double boundary_modulus = 1e-7;  // |L - alpha| below this on an edge counts as a hit
  int max_phase_depth = 40;

  SearchWindow window(double t_lo, double t_hi, double sigma_hi_value) const {
    return {t_lo, t_hi, sigma_lo, sigma_hi_value, dt, tolerance};
  }
};

namespace detail {

/// Smallest sigma >= 1.01 with zeta(sigma)^d - 1 <= bound; for sigma beyond it
/// |L(s) - 1| <= zeta(sigma)^d - 1 < |1 - alpha|, so L(s) != alpha.
inline double dominance_abscissa(double degree, double bound) {
  auto zeta_real = [](double sigma) {
    return hurwitz_zeta(sigma, 1.0).value.real();
  };
  double lo = 1.01, hi = 1.01;
  while (std::pow(zeta_real(hi), degree) - 1.0 > bound) {
    lo = hi;
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (hi > 200) return hi;
  }
  if (hi == 1.01) return hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(zeta_real(mid), degree) - 1.0 > bound ? lo : hi) = mid;
  }
  return hi;
}

struct PhaseAccum {
  double phase = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
};

}  // namespace detail

/// Right search edge: 2 (= sigma(L, 0) + 1) at alpha = 0; otherwise the larger of 2
/// and the dominance abscissa beyond which L(s) = alpha is impossible, plus 1/4.
inline double right_edge_for(const SelbergDescriptor& L, cplx alpha) {
  if (alpha == cplx{}) return 2.0;
  const double gap = std::abs(1.0 - alpha);
  if (gap == 0.0) return std::max(2.0, detail::dominance_abscissa(L.degree(), 1e-3) + 0.25);
  return std::max(2.0, detail::dominance_abscissa(L.degree(), gap) + 0.25);
}

/// Root-finding machinery for F(s) = L(s) - alpha.
class AlphaPointFinder {
 public:
  AlphaPointFinder(SelbergDescriptor L, cplx alpha, SweepParams params = {})
      : L_(std::move(L)), alpha_(alpha), params_(std::move(params)) {}

  const SelbergDescriptor& descriptor() const { return L_; }
  cplx alpha() const { return alpha_; }
  const SweepParams& params() const { return params_; }

  cplx F(cplx s) const { return evaluate(L_, s, params_.eval) - alpha_; }

  cplx dF(cplx s) const { return evaluate_derivative_with_error(L_, s, params_.eval, 1e-3, 8).value; }

  /// Net change of arg F along the straight segment a -> b, with adaptive
  /// bisection until consecutive samples differ in phase by less than pi/2.
  detail::PhaseAccum segment_phase(cplx a, cplx b, double base_step) const {
    detail::PhaseAccum acc;
    const double len = std::abs(b - a);
    if (len == 0.0) return acc;
    const int steps = std::max(1, int(std::ceil(len / base_step - 1e-9)));
    cplx za = a;
    cplx fa = checked(za, acc);
    for (int k = 1; k <= steps; ++k) {
      const cplx zb = (k == steps) ? b : a + (b - a) * (double(k) / steps);
      const cplx fb = checked(zb, acc);
      bisect(za, fa, zb, fb, 0, acc);
      za = zb;
      fa = fb;
    }
    return acc;
  }

  /// Winding number of F around 0 along the boundary of [s0, s1] x [t0, t1].
  /// Throws BoundaryError if F nearly vanishes on the boundary.
  int winding(double s0, double s1, double t0, double t1) const {
    if (t1 <= t0 || s1 <= s0) return 0;
    const double h = params_.dt;
    double total = 0.0;
    total += segment_phase({s0, t0}, {s1, t0}, h).phase;
    total += segment_phase({s1, t0}, {s1, t1}, h).phase;
    total += segment_phase({s1, t1}, {s0, t1}, h).phase;
    total += segment_phase({s0, t1}, {s0, t0}, h).phase;
    return to_count(total);
  }

  int to_count(double total_phase) const {
    const double w = total_phase / (2.0 * std::numbers::pi);
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-3) throw ResolutionError("winding number " + std::to_string(w) + " not near an integer");
    return int(r);
  }

  /// Damped Newton from seed; the iterate must stay in box (if given).
  AlphaPoint refine(cplx seed, double tolerance, std::optional<std::array<double, 4>> box = std::nullopt) const {
    auto inside = [&](cplx z) {
      if (!box) return true;
      const auto& b = *box;
      const double slack = 1e-9;
      return z.real() >= b[0] - slack && z.real() <= b[1] + slack && z.imag() >= b[2] - slack &&
             z.imag() <= b[3] + slack;
    };
    if (!inside(seed)) throw RefinementError("seed outside the isolating box");
    cplx z = seed;
    cplx fz = F(z);
    int it = 0;
    const double goal = tolerance * 1e-3;
    for (; it < 80 && std::abs(fz) > goal; ++it) {
      const cplx d = dF(z);
      if (d == cplx{} || !std::isfinite(std::abs(d))) throw RefinementError("vanishing derivative during refinement");
      cplx step = fz / d;
      if (std::abs(step) > kMaxStep) step *= kMaxStep / std::abs(step);
      double best = std::abs(fz);
      bool improved = false;
      for (int halve = 0; halve < 40; ++halve) {
        const cplx cand = z - step;
        if (inside(cand) && !has_pole(cand)) {
          const cplx fc = F(cand);
          if (std::abs(fc) < best) {
            z = cand;
            fz = fc;
            improved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    const double res = std::abs(fz);
    if (!(res <= tolerance)) throw RefinementError("refinement stalled at residual " + std::to_string(res));
    AlphaPoint p;
    p.alpha = alpha_;
    p.beta = z.real();
    p.gamma = z.imag();
    p.residual = res;
    p.iterations = it;
    p.kind = p.beta >= 0.0 ? PointKind::non_trivial : PointKind::boundary_flagged;
    return p;
  }

  /// All alpha-points in a rectangle known to contain `count` of them, by
  /// Newton from interior seeds and quadrisection when that fails.
  std::vector<AlphaPoint> isolate(double s0, double s1, double t0, double t1, int count, int depth = 0) const {
    std::vector<AlphaPoint> out;
    if (count <= 0) return out;
    const std::array<double, 4> box{s0, s1, t0, t1};
    if (count == 1) {
      const double tm = 0.5 * (t0 + t1);
      for (double frac : {0.5, 0.25, 0.75, 0.1, 0.9}) {
        const cplx seed(s0 + frac * (s1 - s0), tm);
        try {
          out.push_back(refine(seed, params_.tolerance, box));
          return out;
        } catch (const RefinementError&) {
        }
      }
    }
    if (depth > 30) throw ResolutionError("alpha-point isolation did not converge near t = " + std::to_string(t0));
    // quadrisect; interior cut lines move by a seventh of the half-width on boundary hits
    double sm = 0.5 * (s0 + s1), tm = 0.5 * (t0 + t1);
    for (int attempt = 0;; ++attempt) {
      try {
        int c[4] = {winding(s0, sm, t0, tm), winding(sm, s1, t0, tm), winding(s0, sm, tm, t1), winding(sm, s1, tm, t1)};
        if (c[0] + c[1] + c[2] + c[3] != count)
          throw ResolutionError("sub-rectangle counts do not add up near t = " + std::to_string(t0));
        const double sub[4][4] = {{s0, sm, t0, tm}, {sm, s1, t0, tm}, {s0, sm, tm, t1}, {sm, s1, tm, t1}};
        for (int i = 0; i < 4; ++i) {
          auto part = isolate(sub[i][0], sub[i][1], sub[i][2], sub[i][3], c[i], depth + 1);
          out.insert(out.end(), part.begin(), part.end());
        }
        return out;
      } catch (const BoundaryError&) {
        if (attempt >= params_.max_edge_shifts) throw;
        sm += (s1 - s0) / 14.0 / (attempt + 1);
        tm += (t1 - t0) / 14.0 / (attempt + 1);
      }
    }
  }

  bool has_pole(cplx s) const { return L_.has_pole_near(s, 1e-6); }

 private:
  static constexpr double kMaxStep = 0.5;  // Newton steps are clipped to this length

  cplx checked(cplx z, detail::PhaseAccum& acc) const {
    const cplx f = F(z);
    const double m = std::abs(f);
    acc.min_abs = std::min(acc.min_abs, m);
    if (!(m > params_.boundary_modulus))
      throw BoundaryError("L(s) - alpha nearly vanishes on a contour at s = " + std::to_string(z.real()) + " + " +
                          std::to_string(z.imag()) + "i");
    return f;
  }

  void bisect(cplx a, cplx fa, cplx b, cplx fb, int depth, detail::PhaseAccum& acc) const {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < std::numbers::pi / 2.0) {
      acc.phase += d;
      return;
    }
    if (depth >= params_.max_phase_depth)
      throw ResolutionError("phase tracking did not stabilise near s = " + std::to_string(a.real()) + " + " +
                            std::to_string(a.imag()) + "i");
    const cplx m = 0.5 * (a + b);
    const cplx fm = checked(m, acc);
    bisect(a, fa, m, fm, depth + 1, acc);
    bisect(m, fm, b, fb, depth + 1, acc);
  }

  SelbergDescriptor L_;
  cplx alpha_;
  SweepParams params_;
};

/// Winding number of L(s) - alpha around the window boundary.
///
/// If L(s) = alpha (nearly) on the boundary, the horizontal edges move up by
/// dt/7 and the vertical edges outward by dt/7, at most max_edge_shifts times.
inline int count_in_rectangle(const SelbergDescriptor& L, cplx alpha, const SearchWindow& window,
                              const EvalParams& eval = {}) {
  if (window.t_hi <= window.t_lo) return 0;
  SweepParams p;
  p.eval = eval;
  p.dt = window.dt;
  p.tolerance = window.tolerance;
  const AlphaPointFinder finder(L, alpha, p);
  SearchWindow w = window;
  for (int attempt = 0;; ++attempt) {
    try {
      return finder.winding(w.sigma_lo, w.sigma_hi, w.t_lo, w.t_hi);
    } catch (const BoundaryError&) {
      if (attempt >= p.max_edge_shifts) throw;
      const double shift = window.dt / 7.0;
      w.t_lo += shift;
      w.t_hi += shift;
      w.sigma_lo -= shift;
      w.sigma_hi += shift;
    }
  }
}

/// Free-standing Newton refinement of one alpha-point.
inline AlphaPoint refine(const SelbergDescriptor& L, cplx alpha, cplx seed, double tolerance,
                         std::optional<std::array<double, 4>> box = std::nullopt, const EvalParams& eval = {}) {
  SweepParams p;
  p.eval = eval;
  return AlphaPointFinder(L, alpha, p).refine(seed, tolerance, box);
}

struct SweepResult {
  std::vector<AlphaPoint> points;  // sorted by gamma
  double t_lo = 0.0;               // actual window after edge shifts
  double t_hi = 0.0;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  int total_count = 0;             // winding number of the full window

  std::size_t non_trivial_count() const {
    return std::size_t(std::count_if(points.begin(), points.end(),
                                     [](const AlphaPoint& p) { return p.kind == PointKind::non_trivial; }));
  }
};

namespace detail {

struct Cut {
  double t = 0.0;
  double phase = 0.0;  // arg change along sigma_lo -> sigma_hi at height t
};

class SweepEngine {
 public:
  SweepEngine(const AlphaPointFinder& finder, double s0, double s1) : f_(finder), s0_(s0), s1_(s1) {}

  /// Horizontal cut at nominal height t; moves up by dt/7 while it passes too close to an alpha-point.
  Cut make_cut(double t, const std::vector<double>& avoid = {}) const {
    const auto& p = f_.params();
    for (int j = 0; j <= p.max_edge_shifts; ++j) {
      const double tt = t + j * p.dt / 7.0;
      bool near = false;
      for (double g : avoid) near = near || std::abs(g - tt) < p.edge_clearance;
      if (near) continue;
      try {
        const auto acc = f_.segment_phase({s0_, tt}, {s1_, tt}, p.dt);
        if (acc.min_abs < 1e3 * p.boundary_modulus && j < p.max_edge_shifts) continue;
        return {tt, acc.phase};
      } catch (const BoundaryError&) {
        if (j == p.max_edge_shifts) throw;
      }
    }
    throw BoundaryError("no admissible horizontal cut near t = " + std::to_string(t));
  }

  double vertical(double sigma, double t0, double t1) const {
    return f_.segment_phase({sigma, t0}, {sigma, t1}, f_.params().dt).phase;
  }

  int count_between(const Cut& lo, const Cut& hi, double right, double left) const {
    return f_.to_count(lo.phase + right - hi.phase - left);
  }

  /// Points strictly between two cuts, recursing on grid midpoints.
  void solve(const Cut& lo, const Cut& hi, int count, std::vector<AlphaPoint>& out) const {
    if (count <= 0) return;
    const double dt = f_.params().dt;
    if (count == 1 || hi.t - lo.t < 2.5 * dt) {
      auto pts = f_.isolate(s0_, s1_, lo.t, hi.t, count);
      out.insert(out.end(), pts.begin(), pts.end());
      return;
    }
    const double mid_nominal = lo.t + std::floor((hi.t - lo.t) / (2.0 * dt)) * dt;
    const Cut mid = make_cut(mid_nominal);
    if (mid.t >= hi.t) {
      auto pts = f_.isolate(s0_, s1_, lo.t, hi.t, count);
      out.insert(out.end(), pts.begin(), pts.end());
      return;
    }
    const int c_lo = count_between(lo, mid, vertical(s1_, lo.t, mid.t), vertical(s0_, lo.t, mid.t));
    const int c_hi = count - c_lo;
    if (c_lo < 0 || c_hi < 0) throw ResolutionError("negative sub-window count near t = " + std::to_string(mid.t));
    solve(lo, mid, c_lo, out);
    solve(mid, hi, c_hi, out);
  }

 private:
  const AlphaPointFinder& f_;
  double s0_, s1_;
};

}  // namespace detail

/// All alpha-points with t_lo < gamma <= t_hi (up to edge shifts) and
/// sigma_lo <= beta <= sigma_hi, refined and sorted by ordinate.
///
/// The window is cut into fixed chunks processed concurrently; the chunk grid
/// does not depend on the thread count, so the output does not either.
inline SweepResult sweep_window(const SelbergDescriptor& L, cplx alpha, double t_lo, double t_hi,
                                const SweepParams& params = {}) {
  SweepParams p = params;
  const double s1 = p.sigma_hi ? *p.sigma_hi : right_edge_for(L, alpha);
  const double s0 = p.sigma_lo;
  SweepResult result;
  result.sigma_lo = s0;
  result.sigma_hi = s1;
  result.t_lo = t_lo;
  result.t_hi = t_hi;
  if (t_hi <= t_lo) return result;
  if (t_hi > p.eval.t_max) throw RangeError("sweep height exceeds the evaluation ceiling");

  const AlphaPointFinder finder(L, alpha, p);
  const detail::SweepEngine engine(finder, s0, s1);

  // chunk boundaries on the dt grid
  std::vector<double> nominal{t_lo};
  const double step = std::max(p.dt, std::round(p.chunk_length / p.dt) * p.dt);
  for (double t = t_lo + step; t < t_hi - 0.5 * p.dt; t += step) nominal.push_back(t);
  nominal.push_back(t_hi);
  const std::size_t n_chunks = nominal.size() - 1;

  std::vector<std::vector<double>> avoid(nominal.size());
  for (int round = 0;; ++round) {
    std::vector<detail::Cut> cuts(nominal.size());
    std::vector<std::vector<AlphaPoint>> found(n_chunks);
    std::vector<int> counts(n_chunks, 0);
    std::vector<std::exception_ptr> errors(n_chunks + nominal.size());

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = std::max(1u, std::min<unsigned>(p.threads ? p.threads : hw, unsigned(nominal.size())));
    auto run_parallel = [&](std::size_t n, auto&& job) {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < n;) job(i);
        });
      for (auto& th : pool) th.join();
    };

    run_parallel(nominal.size(), [&](std::size_t i) {
      try {
        cuts[i] = engine.make_cut(nominal[i], avoid[i]);
      } catch (...) {
        errors[n_chunks + i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < nominal.size(); ++i)
      if (errors[n_chunks + i]) std::rethrow_exception(errors[n_chunks + i]);

    run_parallel(n_chunks, [&](std::size_t i) {
      try {
        const auto& lo = cuts[i];
        const auto& hi = cuts[i + 1];
        const int c = engine.count_between(lo, hi, engine.vertical(s1, lo.t, hi.t), engine.vertical(s0, lo.t, hi.t));
        if (c < 0) throw ResolutionError("negative count in chunk starting at t = " + std::to_string(lo.t));
        counts[i] = c;
        engine.solve(lo, hi, c, found[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < n_chunks; ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);

    // a located ordinate too close to a chunk edge moves that edge and reruns
    bool moved = false;
    for (std::size_t i = 0; i < n_chunks; ++i)
      for (const auto& pt : found[i])
        for (std::size_t e : {i, i + 1})
          if (std::abs(pt.gamma - cuts[e].t) < p.edge_clearance) {
            avoid[e].push_back(pt.gamma);
            moved = true;
          }
    if (moved && round < p.max_edge_shifts) continue;

    std::vector<AlphaPoint> all;
    int total = 0;
    for (std::size_t i = 0; i < n_chunks; ++i) {
      total += counts[i];
      if (int(found[i].size()) != counts[i])
        throw ResolutionError("chunk at t = " + std::to_string(cuts[i].t) + " isolated " +
                              std::to_string(found[i].size()) + " of " + std::to_string(counts[i]) + " points");
      all.insert(all.end(), found[i].begin(), found[i].end());
    }
    std::sort(all.begin(), all.end(), [](const AlphaPoint& a, const AlphaPoint& b) {
      return a.gamma < b.gamma || (a.gamma == b.gamma && a.beta < b.beta);
    });
    std::vector<AlphaPoint> merged;
    for (const auto& pt : all) {
      bool dup = false;
      for (auto it = merged.rbegin(); it != merged.rend() && pt.gamma - it->gamma < p.merge_radius; ++it)
        dup = dup || std::abs(pt.rho() - it->rho()) < p.merge_radius;
      if (!dup) merged.push_back(pt);
    }
    if (int(merged.size()) != total)
      throw ResolutionError("duplicate merging left " + std::to_string(merged.size()) + " points for a winding total of " +
                            std::to_string(total));
    result.points = std::move(merged);
    result.total_count = total;
    result.t_lo = cuts.front().t;
    result.t_hi = cuts.back().t;
    return result;
  }
}

/// Sweep (0, T]: starts at t = dt.
inline SweepResult sweep(const SelbergDescriptor& L, cplx alpha, double T, const SweepParams& params = {}) {
  if (T <= params.dt) {
    SweepResult r;
    r.t_lo = r.t_hi = params.dt;
    r.sigma_lo = params.sigma_lo;
    r.sigma_hi = params.sigma_hi ? *params.sigma_hi : right_edge_for(L, alpha);
    return r;
  }
  return sweep_window(L, alpha, params.dt, T, params);
}

/// Post-hoc check: every point re-evaluated with doubled precision parameters.
inline bool reverify(const SelbergDescriptor& L, std::span<const AlphaPoint> points, double tolerance,
                     const EvalParams& eval = {}) {
  const EvalParams tight = eval.doubled();
  for (const auto& p : points)
    if (!(std::abs(evaluate(L, p.rho(), tight) - p.alpha) <= tolerance)) return false;
  return true;
}

struct CountCheck {
  double T = 0.0;
  int found = 0;           // alpha-points with T < gamma <= 2T
  double main_term = 0.0;  // (d/2pi) T log(4T/e) + (T/2pi) log(lambda Q^2)
  double deviation = 0.0;  // found - main_term
  double reference_scale = 0.0;  // log T
};

inline double rvm_main_term(const SelbergDescriptor& L, double T) {
  const double two_pi = 2.0 * std::numbers::pi;
  return L.degree() / two_pi * T * std::log(4.0 * T / std::numbers::e) +
         T / two_pi * std::log(L.lambda() * L.Q() * L.Q());
}

/// Compare the number of located points in (T, 2T] with the counting main term.
/// `points` must cover (0, 2T].
inline CountCheck rvm_count_check(const SelbergDescriptor& L, std::span<const AlphaPoint> points, double T) {
  CountCheck c;
  c.T = T;
  for (const auto& p : points)
    if (p.gamma > T && p.gamma <= 2.0 * T) ++c.found;
  c.main_term = rvm_main_term(L, T);
  c.deviation = c.found - c.main_term;
  c.reference_scale = std::log(T);
  return c;
}

inline CountCheck rvm_count_check(const SelbergDescriptor& L, cplx alpha, double T, const SweepParams& params = {}) {
  const auto r = sweep(L, alpha, 2.0 * T, params);
  return rvm_count_check(L, r.points, T);
}

}  // namespace selberg
