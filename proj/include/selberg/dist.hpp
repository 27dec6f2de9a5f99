#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selberg/alpha_point.hpp"
#include "selberg/errors.hpp"

namespace selberg {

/// Ordinates of the given points, sorted; throws if not strictly increasing.
inline std::vector<double> ordinates_of(std::span<const AlphaPoint> points) {
  std::vector<double> g;
  g.reserve(points.size());
  for (const auto& p : points) g.push_back(p.gamma);
  std::sort(g.begin(), g.end());
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw DomainError("ordinates must be strictly increasing");
  return g;
}

inline double fractional_part(double v) { return v - std::floor(v); }

struct WeylSum {
  cplx value{};
  bool degenerate = false;  // a = 0: every phase is 1
  double abs() const { return std::abs(value); }
};

/// (1/N) sum_{k <= N} e(a gamma_k).
inline WeylSum weyl_sum(std::span<const double> ordinates, double a, std::size_t N) {
  if (N == 0) throw DomainError("Weyl sum needs N >= 1");
  if (N > ordinates.size())
    throw RangeError("Weyl sum length " + std::to_string(N) + " exceeds " + std::to_string(ordinates.size()) +
                     " ordinates");
  if (a == 0.0) return {cplx(1.0), true};
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    // reduce the phase mod 1 first so large ordinates keep full precision
    const double ph = 2.0 * std::numbers::pi * fractional_part(a * ordinates[k]);
    re += std::cos(ph);
    im += std::sin(ph);
  }
  return {cplx(re, im) / double(N), false};
}

/// Exact star discrepancy of points in [0, 1).
inline double star_discrepancy_of(std::vector<double> u) {
  if (u.empty()) throw DomainError("star discrepancy needs at least one point");
  std::sort(u.begin(), u.end());
  const double n = double(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, double(i + 1) / n - u[i], u[i] - double(i) / n});
  return d;
}

/// D*_N of the fractional parts {a gamma_k}, k <= N.
inline double star_discrepancy(std::span<const double> ordinates, double a, std::size_t N) {
  if (N == 0 || N > ordinates.size()) throw RangeError("star discrepancy length out of range");
  std::vector<double> u(N);
  for (std::size_t k = 0; k < N; ++k) u[k] = fractional_part(a * ordinates[k]);
  return star_discrepancy_of(std::move(u));
}

/// log log log t, defined for t > e (positive for t > e^e).
inline double logloglog(double t) { return std::log(std::log(std::log(t))); }

struct GapRow {
  double window_start = 0.0;  // lower ordinate of the gap
  double gap = 0.0;
  std::optional<double> scaled;  // gap * logloglog(midpoint), for midpoint >= e^3
};

struct GapScan {
  double max_gap = 0.0;
  double location = 0.0;  // lower ordinate of the widest gap
  std::vector<GapRow> table;
};

/// Consecutive gaps among ordinates >= t_min.
inline GapScan gap_scan(std::span<const double> ordinates, double t_min) {
  std::vector<double> g;
  for (double v : ordinates)
    if (v >= t_min) g.push_back(v);
  if (g.size() < 2) throw InsufficientDataError("gap scan needs two ordinates above t_min");
  GapScan out;
  const double floor_mid = std::exp(3.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    GapRow r;
    r.window_start = g[i - 1];
    r.gap = g[i] - g[i - 1];
    const double mid = 0.5 * (g[i] + g[i - 1]);
    if (mid >= floor_mid) r.scaled = r.gap * logloglog(mid);
    if (r.gap > out.max_gap) {
      out.max_gap = r.gap;
      out.location = r.window_start;
    }
    out.table.push_back(r);
  }
  return out;
}

struct GapMonitor {
  double max_value = 0.0;  // max over T of (length of the gap containing T) * logloglog T
  double location = 0.0;   // T attaining it
};

/// Littlewood-scale gap monitor over T in [t_lo, t_hi]; t_lo >= e^3 and the
/// ordinates must reach past t_hi.
inline GapMonitor gap_monitor(std::span<const double> ordinates, double t_lo, double t_hi) {
  if (t_lo < std::exp(3.0) || t_hi <= t_lo) throw DomainError("gap monitor needs e^3 <= t_lo < t_hi");
  if (ordinates.empty() || ordinates.back() <= t_hi || ordinates.front() > t_lo)
    throw RangeError("ordinates do not bracket the monitored range");
  GapMonitor m;
  for (std::size_t i = 1; i < ordinates.size(); ++i) {
    const double a = ordinates[i - 1], b = ordinates[i];
    if (b < t_lo || a > t_hi) continue;
    // logloglog increases, so the maximum over the gap sits at its upper end
    const double T = std::min(b, t_hi);
    const double v = (b - a) * logloglog(T);
    if (v > m.max_value) {
      m.max_value = v;
      m.location = T;
    }
  }
  return m;
}

struct SubsequenceEntry {
  std::int64_t k = 0;
  std::size_t index = 0;  // position in the ordinate list (0-based)
  double gamma = 0.0;
  double deviation = 0.0;  // gamma - b k
};

/// For k = 1..K, the ordinate nearest to b k (ties to the smaller one).
/// covered_to is the height up to which the list is complete; it must reach b K + 10.
inline std::vector<SubsequenceEntry> build_subsequence(std::span<const double> ordinates, double b, std::int64_t K,
                                                       double covered_to) {
  if (!(b > 0.0)) throw DomainError("subsequence step b must be positive");
  if (K < 1) throw DomainError("subsequence length K must be positive");
  if (covered_to < b * double(K) + 10.0 || ordinates.empty())
    throw RangeError("ordinates cover (0, " + std::to_string(covered_to) + "], need " +
                     std::to_string(b * double(K) + 10.0));
  std::vector<SubsequenceEntry> out;
  out.reserve(std::size_t(K));
  for (std::int64_t k = 1; k <= K; ++k) {
    const double target = b * double(k);
    const auto it = std::lower_bound(ordinates.begin(), ordinates.end(), target);
    std::size_t idx;
    if (it == ordinates.begin()) {
      idx = 0;
    } else if (it == ordinates.end()) {
      idx = ordinates.size() - 1;
    } else {
      const std::size_t hi = std::size_t(it - ordinates.begin());
      idx = (target - ordinates[hi - 1] <= ordinates[hi] - target) ? hi - 1 : hi;
    }
    out.push_back({k, idx, ordinates[idx], ordinates[idx] - target});
  }
  return out;
}

/// Mean |deviation| over entries with k_lo <= k <= k_hi.
inline double mean_abs_deviation(std::span<const SubsequenceEntry> subseq, std::int64_t k_lo, std::int64_t k_hi) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& e : subseq)
    if (e.k >= k_lo && e.k <= k_hi) s += std::abs(e.deviation), ++n;
  if (n == 0) throw InsufficientDataError("no subsequence entries in the requested k range");
  return s / double(n);
}

struct SubsequenceUd {
  double a = 0.0;
  int m = 1;
  std::size_t n_max = 0;                          // number of k with k^m <= K
  std::vector<std::pair<std::size_t, cplx>> values;  // Weyl sums at N = 1, 2, 4, ..., and n_max
  double trend_slope = 0.0;  // least-squares slope of log|W| against log N (negative = decreasing)
  cplx final_value() const { return values.empty() ? cplx{} : values.back().second; }
};

/// Weyl sums of (a gamma_{n_{k^m}}) over k with k^m within the subsequence.
inline SubsequenceUd subsequence_ud_check(std::span<const SubsequenceEntry> subseq, double a, int m) {
  if (m < 1) throw DomainError("power m must be a positive integer");
  const auto K = std::int64_t(subseq.size());
  std::vector<double> g;
  for (std::int64_t k = 1;; ++k) {
    const double km = std::pow(double(k), m);
    if (km > double(K)) break;
    g.push_back(subseq[std::size_t(std::llround(km)) - 1].gamma);
  }
  if (g.empty()) throw RangeError("no k with k^m inside the subsequence");
  SubsequenceUd out;
  out.a = a;
  out.m = m;
  out.n_max = g.size();
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n < g.size(); n *= 2) ns.push_back(n);
  ns.push_back(g.size());
  std::vector<double> lx, ly;
  for (std::size_t n : ns) {
    const cplx w = weyl_sum(g, a, n).value;
    out.values.emplace_back(n, w);
    if (std::abs(w) > 0.0) {
      lx.push_back(std::log(double(n)));
      ly.push_back(std::log(std::abs(w)));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= double(lx.size());
    my /= double(lx.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
    out.trend_slope = sxx > 0 ? sxy / sxx : 0.0;
  }
  return out;
}

struct DistributionStats {
  std::vector<double> ordinates;
  struct Cell {
    double a = 0.0;
    std::size_t N = 0;
    cplx weyl{};
    double star_discrepancy = 0.0;
  };
  std::vector<Cell> cells;
  std::vector<double> gaps;
  double max_gap = 0.0;
  double gap_argmax = 0.0;
};

/// Weyl sums and discrepancies at the requested (a, N) cells plus the gap list.
inline DistributionStats describe(std::span<const double> ordinates,
                                  std::span<const std::pair<double, std::size_t>> cells) {
  DistributionStats s;
  s.ordinates.assign(ordinates.begin(), ordinates.end());
  for (std::size_t i = 1; i < s.ordinates.size(); ++i)
    if (!(s.ordinates[i] > s.ordinates[i - 1])) throw DomainError("ordinates must be strictly increasing");
  for (const auto& [a, N] : cells)
    s.cells.push_back({a, N, weyl_sum(ordinates, a, N).value, star_discrepancy(ordinates, a, N)});
  for (std::size_t i = 1; i < s.ordinates.size(); ++i) {
    const double g = s.ordinates[i] - s.ordinates[i - 1];
    s.gaps.push_back(g);
    if (g > s.max_gap) {
      s.max_gap = g;
      s.gap_argmax = s.ordinates[i - 1];
    }
  }
  return s;
}

}  // namespace selberg
