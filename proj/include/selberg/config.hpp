#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "selberg/alpha_point.hpp"
#include "selberg/apoints.hpp"
#include "selberg/errors.hpp"
#include "selberg/lfun.hpp"

namespace selberg {

/// Decimal with 17 significant digits, independent of locale.
inline std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero in output
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  s = trim(s);
  T v{};
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline double parse_real(std::string_view s, const char* what = "number") {
  return detail::parse_number<double>(s, what);
}

/// "re,im" or "re".
inline cplx parse_complex(std::string_view s) {
  const auto parts = detail::split(s, ',');
  if (parts.size() == 1) return {parse_real(parts[0], "complex number"), 0.0};
  if (parts.size() == 2) return {parse_real(parts[0], "complex number"), parse_real(parts[1], "complex number")};
  throw ParseError("invalid complex number '" + std::string(s) + "' (expected re,im)");
}

inline std::string format_complex(cplx z) { return fmt17(z.real()) + "," + fmt17(z.imag()); }

namespace detail {

inline SelbergDescriptor parse_factor(std::string_view s) {
  s = trim(s);
  if (s == "zeta") return SelbergDescriptor::zeta();
  if (s == "unit" || s == "1") throw DomainError("the constant function 1 is excluded");
  constexpr std::string_view dir = "dirichlet:";
  if (s.substr(0, dir.size()) == dir) {
    const auto args = split(s.substr(dir.size()), ',');
    if (args.size() < 2 || args.size() > 3)
      throw ParseError("dirichlet spec needs q,index[,theta]: '" + std::string(s) + "'");
    const auto q = parse_number<std::uint64_t>(args[0], "modulus");
    const auto idx = parse_number<std::uint64_t>(args[1], "character index");
    const double theta = args.size() == 3 ? parse_number<double>(args[2], "shift") : 0.0;
    return SelbergDescriptor::dirichlet(q, idx, theta);
  }
  throw ParseError("unknown function spec '" + std::string(s) + "'");
}

}  // namespace detail

/// zeta | dirichlet:q,index[,theta] | product:spec;spec;...
inline SelbergDescriptor parse_descriptor(std::string_view spec) {
  spec = detail::trim(spec);
  constexpr std::string_view prod = "product:";
  if (spec.substr(0, prod.size()) == prod) {
    std::vector<SelbergDescriptor> factors;
    for (auto part : detail::split(spec.substr(prod.size()), ';')) factors.push_back(detail::parse_factor(part));
    if (factors.size() < 2) throw ParseError("product spec needs at least two factors");
    return SelbergDescriptor::product(factors);
  }
  return detail::parse_factor(spec);
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Everything that determines a run's numbers; paths and threads do not enter the hashes.
struct RunConfig {
  std::string function = "zeta";
  cplx alpha{};
  double T = 100.0;
  SweepParams sweep{};
  std::string cache_path = "alpha_points.jsonl";
  std::string out_path;
  unsigned threads = 0;
  std::uint64_t seed = 1;

  SelbergDescriptor descriptor() const { return parse_descriptor(function); }

  /// Numerical parameters that influence located points.
  std::string params_canonical() const {
    const auto& e = sweep.eval;
    std::string s = "em_terms=" + std::to_string(e.em_terms) + " bernoulli_order=" + std::to_string(e.bernoulli_order) +
                    " target_abs_err=" + fmt17(e.target_abs_err) + " high_t_abs_err=" + fmt17(e.high_t_abs_err) +
                    " t_max=" + fmt17(e.t_max) + " dt=" + fmt17(sweep.dt) + " tolerance=" + fmt17(sweep.tolerance) +
                    " sigma_lo=" + fmt17(sweep.sigma_lo) + " chunk_length=" + fmt17(sweep.chunk_length);
    if (sweep.sigma_hi) s += " sigma_hi=" + fmt17(*sweep.sigma_hi);
    return s;
  }

  /// Space-separated key=value pairs (product specs use ';' internally).
  std::string canonical() const {
    return "function=" + descriptor().spec() + " alpha=" + format_complex(alpha) + " T=" + fmt17(T) + " " +
           params_canonical() + " seed=" + std::to_string(seed);
  }

  std::string descriptor_hash() const { return fnv1a_hex(descriptor().spec()); }
  std::string params_hash() const { return fnv1a_hex(params_canonical()); }

  /// Inverse of canonical(); unknown keys are rejected.
  static RunConfig from_canonical(std::string_view s) {
    RunConfig c;
    for (auto kv : detail::split(s, ' ')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw ParseError("malformed config entry '" + std::string(kv) + "'");
      c.set(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
    return c;
  }

  void set(const std::string& key, const std::string& value) {
    auto& e = sweep.eval;
    if (key == "function") {
      function = parse_descriptor(value).spec();
    } else if (key == "alpha") {
      alpha = parse_complex(value);
    } else if (key == "T") {
      T = parse_real(value, "T");
    } else if (key == "em_terms") {
      e.em_terms = detail::parse_number<int>(value, "em_terms");
    } else if (key == "bernoulli_order") {
      e.bernoulli_order = detail::parse_number<int>(value, "bernoulli_order");
    } else if (key == "target_abs_err") {
      e.target_abs_err = parse_real(value, "target_abs_err");
    } else if (key == "high_t_abs_err") {
      e.high_t_abs_err = parse_real(value, "high_t_abs_err");
    } else if (key == "t_max") {
      e.t_max = parse_real(value, "t_max");
    } else if (key == "dt") {
      sweep.dt = parse_real(value, "dt");
    } else if (key == "tolerance") {
      sweep.tolerance = parse_real(value, "tolerance");
    } else if (key == "sigma_lo") {
      sweep.sigma_lo = parse_real(value, "sigma_lo");
    } else if (key == "sigma_hi") {
      sweep.sigma_hi = parse_real(value, "sigma_hi");
    } else if (key == "chunk_length") {
      sweep.chunk_length = parse_real(value, "chunk_length");
    } else if (key == "seed") {
      seed = detail::parse_number<std::uint64_t>(value, "seed");
    } else if (key == "cache") {
      cache_path = value;
    } else if (key == "threads") {
      threads = detail::parse_number<unsigned>(value, "threads");
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }

  /// JSON object with the same keys as canonical(); numbers or strings accepted.
  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("config file must hold a JSON object");
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& v = it.value();
      std::string text;
      if (v.is_string()) {
        text = v.get<std::string>();
      } else if (v.is_number_integer()) {
        text = std::to_string(v.get<long long>());
      } else if (v.is_number()) {
        text = fmt17(v.get<double>());
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        text = fmt17(v[0].get<double>()) + "," + fmt17(v[1].get<double>());
      } else {
        throw ParseError("config key '" + it.key() + "' has an unsupported value");
      }
      c.set(it.key(), text);
    }
    return c;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config file '" + path + "': " + e.what());
    }
    return from_json(j);
  }
};

/// JSON-lines point cache keyed by (descriptor, alpha, params hash).
///
/// Each line holds one point plus "t_hi", the height up to which the sweep
/// that produced it was complete.
class PointCache {
 public:
  explicit PointCache(std::string path) : path_(std::move(path)) {}

  struct Entry {
    std::vector<AlphaPoint> points;  // sorted by gamma
    double covered_to = 0.0;         // 0 when the cache holds nothing for the key
  };

  static std::string line_for(const AlphaPoint& p, const std::string& descriptor, const std::string& params_hash,
                              double t_hi) {
    // field order fixed by hand so output bytes never depend on a JSON library's ordering
    return "{\"alpha\":[" + fmt17(p.alpha.real()) + "," + fmt17(p.alpha.imag()) + "],\"beta\":" + fmt17(p.beta) +
           ",\"gamma\":" + fmt17(p.gamma) + ",\"residual\":" + fmt17(p.residual) + ",\"kind\":\"" +
           std::string(to_string(p.kind)) + "\",\"descriptor\":\"" + descriptor + "\",\"params_hash\":\"" + params_hash +
           "\",\"iterations\":" + std::to_string(p.iterations) + ",\"t_hi\":" + fmt17(t_hi) + "}";
  }

  /// Points for the key; every matching line is re-validated against L.
  Entry load(const SelbergDescriptor& L, cplx alpha, const std::string& params_hash, double tolerance,
             const EvalParams& eval) const {
    Entry e;
    std::ifstream in(path_);
    if (!in) return e;
    const std::string desc = L.spec();
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
      if (detail::trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        throw ParseError(where(no) + "is not valid JSON");
      }
      AlphaPoint p;
      std::string d, ph;
      double t_hi = 0.0;
      try {
        p.alpha = {j.at("alpha").at(0).get<double>(), j.at("alpha").at(1).get<double>()};
        p.beta = j.at("beta").get<double>();
        p.gamma = j.at("gamma").get<double>();
        p.residual = j.at("residual").get<double>();
        p.kind = kind_from(j.at("kind").get<std::string>(), no);
        p.iterations = j.value("iterations", 0);
        d = j.at("descriptor").get<std::string>();
        ph = j.at("params_hash").get<std::string>();
        t_hi = j.at("t_hi").get<double>();
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(where(no) + "missing or mistyped field (" + ex.what() + ")");
      }
      if (d != desc || ph != params_hash || p.alpha != alpha) continue;
      if (!(p.gamma > 0.0 && p.gamma <= t_hi)) throw ParseError(where(no) + "ordinate outside its covered range");
      const double res = std::abs(evaluate(L, p.rho(), eval) - alpha);
      if (!(res <= tolerance)) throw ParseError(where(no) + "fails re-validation, |L(rho) - alpha| = " + fmt17(res));
      e.points.push_back(p);
      e.covered_to = std::max(e.covered_to, t_hi);
    }
    std::sort(e.points.begin(), e.points.end(), [](const AlphaPoint& a, const AlphaPoint& b) { return a.gamma < b.gamma; });
    return e;
  }

  void append(std::span<const AlphaPoint> points, const std::string& descriptor, const std::string& params_hash,
              double t_hi) const {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw DomainError("cannot open cache file '" + path_ + "' for writing");
    for (const auto& p : points) out << line_for(p, descriptor, params_hash, t_hi) << '\n';
    if (!out) throw DomainError("writing cache file '" + path_ + "' failed");
  }

  const std::string& path() const { return path_; }

 private:
  std::string where(std::size_t no) const { return "cache " + path_ + " line " + std::to_string(no) + ": "; }

  PointKind kind_from(const std::string& s, std::size_t no) const {
    if (s == "non-trivial") return PointKind::non_trivial;
    if (s == "trivial") return PointKind::trivial;
    if (s == "boundary-flagged") return PointKind::boundary_flagged;
    throw ParseError(where(no) + "unknown kind '" + s + "'");
  }

  std::string path_;
};

/// Points on (0, T] for the config's function and alpha, reusing and extending the cache.
/// Returns the points and the height they cover.
inline PointCache::Entry ensure_points(const RunConfig& cfg, double T, const std::string& cache_path) {
  const auto L = cfg.descriptor();
  SweepParams sp = cfg.sweep;
  sp.threads = cfg.threads;
  const PointCache cache(cache_path);
  auto e = cache.load(L, cfg.alpha, cfg.params_hash(), sp.tolerance, sp.eval);
  if (e.covered_to >= T) return e;
  const double from = e.covered_to > 0.0 ? e.covered_to : sp.dt;
  const auto r = T > from ? sweep_window(L, cfg.alpha, from, T, sp) : SweepResult{};
  if (!reverify(L, r.points, sp.tolerance, sp.eval))
    throw PrecisionError("re-verification with doubled parameters failed");
  const double covered = std::max(r.t_hi, from);
  cache.append(r.points, L.spec(), cfg.params_hash(), covered);
  e.points.insert(e.points.end(), r.points.begin(), r.points.end());
  e.covered_to = covered;
  return e;
}

}  // namespace selberg
