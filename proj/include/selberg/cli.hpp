#pragma once

#include <algorithm>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selberg/apoints.hpp"
#include "selberg/config.hpp"
#include "selberg/dist.hpp"
#include "selberg/errors.hpp"
#include "selberg/explicit.hpp"
#include "selberg/lfun.hpp"
#include "selberg/universality.hpp"

#ifndef SELBERG_CONTENT_VERSION
#define SELBERG_CONTENT_VERSION "unversioned"
#endif

namespace selberg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitOther = 1;

/// Insertion-ordered JSON object written with 17-digit numbers.
class JsonWriter {
 public:
  JsonWriter& num(const std::string& k, double v) { return raw(k, fmt17(v)); }
  JsonWriter& integer(const std::string& k, long long v) { return raw(k, std::to_string(v)); }
  JsonWriter& str(const std::string& k, const std::string& v) { return raw(k, quote(v)); }
  JsonWriter& complex(const std::string& k, cplx z) {
    return raw(k, "[" + fmt17(z.real()) + "," + fmt17(z.imag()) + "]");
  }
  JsonWriter& object(const std::string& k, const JsonWriter& w) { return raw(k, w.text()); }
  JsonWriter& raw(const std::string& k, const std::string& v) {
    fields_.push_back(quote(k) + ":" + v);
    return *this;
  }
  std::string text() const {
    std::string s = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) s += (i ? "," : "") + fields_[i];
    return s + "}";
  }

 private:
  static std::string quote(const std::string& v) { return nlohmann::json(v).dump(); }
  std::vector<std::string> fields_;
};

inline JsonWriter provenance(const RunConfig& cfg) {
  JsonWriter w;
  w.str("descriptor", cfg.descriptor().spec())
      .str("descriptor_hash", cfg.descriptor_hash())
      .str("params_hash", cfg.params_hash())
      .str("version", SELBERG_CONTENT_VERSION);
  return w;
}

inline std::string csv_provenance(const RunConfig& cfg) {
  return "# descriptor=" + cfg.descriptor().spec() + " descriptor_hash=" + cfg.descriptor_hash() +
         " params_hash=" + cfg.params_hash() + " version=" SELBERG_CONTENT_VERSION "\n";
}

/// disk:re,im,r | rect:s0,t0,s1,t1
inline CompactSet parse_compact_set(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("compact set spec needs a kind prefix: '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  std::vector<double> v;
  for (auto part : detail::split(std::string_view(spec).substr(colon + 1), ',')) v.push_back(parse_real(part));
  if (kind == "disk" && v.size() == 3) return CompactSet::disk({v[0], v[1]}, v[2]);
  if (kind == "rect" && v.size() == 4) return CompactSet::rectangle({v[0], v[1]}, {v[2], v[3]});
  throw ParseError("invalid compact set spec '" + spec + "' (disk:re,im,r or rect:s0,t0,s1,t1)");
}

/// const:re[,im] | exp-poly:c0re,c0im;c1re,c1im;... | zeta-shift:re,im
inline TargetFunction parse_target(const std::string& spec, const EvalParams& eval) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("target spec needs a kind prefix: '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string_view rest = std::string_view(spec).substr(colon + 1);
  if (kind == "const") return TargetFunction::constant(parse_complex(rest));
  if (kind == "zeta-shift") return TargetFunction::zeta_shift(parse_complex(rest), eval);
  if (kind == "exp-poly") {
    std::vector<cplx> c;
    for (auto part : detail::split(rest, ';')) c.push_back(parse_complex(part));
    return TargetFunction::exp_poly(std::move(c));
  }
  throw ParseError("unknown target spec '" + spec + "'");
}

namespace detail {

struct PointOptions {
  std::string function, alpha;
  double T = 0.0;
  CLI::Option* f_opt = nullptr;
  CLI::Option* a_opt = nullptr;
  CLI::Option* t_opt = nullptr;

  void add(CLI::App* sub, bool with_T = true) {
    f_opt = sub->add_option("--function", function, "zeta | dirichlet:q,index[,theta] | product:spec;spec");
    a_opt = sub->add_option("--alpha", alpha, "target value re,im");
    if (with_T) t_opt = sub->add_option("--T", T, "height ceiling");
  }

  void apply(RunConfig& cfg) const {
    if (f_opt && f_opt->count()) cfg.set("function", function);
    if (a_opt && a_opt->count()) cfg.set("alpha", alpha);
    if (t_opt && t_opt->count()) cfg.T = T;
  }
  bool has_T() const { return t_opt && t_opt->count(); }
};

/// Points for the key: swept up to `need` when given, else whatever the cache holds.
inline PointCache::Entry points_for(const RunConfig& cfg, std::optional<double> need) {
  if (need) return ensure_points(cfg, *need, cfg.cache_path);
  SweepParams sp = cfg.sweep;
  auto e = PointCache(cfg.cache_path).load(cfg.descriptor(), cfg.alpha, cfg.params_hash(), sp.tolerance, sp.eval);
  if (e.covered_to <= 0.0)
    throw InsufficientDataError("cache '" + cfg.cache_path + "' holds no points for " + cfg.descriptor().spec() +
                                " at alpha " + format_complex(cfg.alpha) + "; run find-points or pass --T");
  return e;
}

inline std::vector<double> ordinates_above_zero(const std::vector<AlphaPoint>& pts) {
  std::vector<AlphaPoint> pos;
  for (const auto& p : pts)
    if (p.gamma > 0.0) pos.push_back(p);
  return ordinates_of(pos);
}

}  // namespace detail

/// Parses and runs one command line (without the program name). Returns the exit status.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"alpha-points of Selberg-class L-functions"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, cache_path;
  unsigned threads = 0;
  auto* config_opt = app.add_option("--config", config_path, "JSON config file");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
  auto* cache_opt = app.add_option("--cache", cache_path, "alpha-point cache (JSON lines)");

  auto config = [&]() {
    RunConfig cfg = config_opt->count() ? RunConfig::from_file(config_path) : RunConfig{};
    if (threads_opt->count()) cfg.threads = threads;
    if (cache_opt->count()) cfg.cache_path = cache_path;
    cfg.sweep.threads = cfg.threads;
    return cfg;
  };

  std::function<void()> action;

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "generalized von Mangoldt coefficients Lambda(n; L, alpha)");
  detail::PointOptions coeffs_p;
  coeffs_p.add(coeffs, false);
  std::size_t n_max = 0;
  std::string format = "csv";
  coeffs->add_option("--n-max", n_max, "largest n")->required();
  coeffs->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  coeffs->callback([&] {
    action = [&] {
      auto cfg = config();
      coeffs_p.apply(cfg);
      if (n_max == 0) throw LengthError("--n-max must be at least 1");
      const auto L = cfg.descriptor();
      const auto lam = lambda_alpha(L, cfg.alpha, n_max);
      if (format == "csv") {
        out << csv_provenance(cfg) << "n,re,im\n";
        for (std::size_t n = 1; n <= n_max; ++n)
          out << n << "," << fmt17(lam(n).real()) << "," << fmt17(lam(n).imag()) << "\n";
      } else {
        std::string rows = "[";
        for (std::size_t n = 1; n <= n_max; ++n)
          rows += (n > 1 ? "," : "") + std::string("[") + fmt17(lam(n).real()) + "," + fmt17(lam(n).imag()) + "]";
        JsonWriter w;
        w.complex("alpha", cfg.alpha).integer("n_max", (long long)n_max).raw("lambda", rows + "]");
        w.object("provenance", provenance(cfg));
        out << w.text() << "\n";
      }
    };
  });

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate L(s) with an error estimate");
  detail::PointOptions eval_p;
  eval_p.add(evalc, false);
  std::string s_text, params_text;
  evalc->add_option("--s", s_text, "point re,im")->required();
  evalc->add_option("--params", params_text, "evaluation overrides key=value;key=value");
  evalc->callback([&] {
    action = [&] {
      auto cfg = config();
      eval_p.apply(cfg);
      for (auto kv : selberg::detail::split(params_text, ';')) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ParseError("malformed --params entry '" + std::string(kv) + "'");
        cfg.set(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      }
      cfg.sweep.eval.validate();
      const auto L = cfg.descriptor();
      const cplx s = parse_complex(s_text);
      if (L.has_pole_near(s, 1e-12)) throw PoleError("L has a pole at s = 1");
      const auto r = evaluate_with_error(L, s, cfg.sweep.eval);
      JsonWriter w;
      w.complex("s", s).complex("value", r.value).num("error_estimate", r.error_bound);
      w.num("functional_equation_residual", functional_equation_residual(L, s, cfg.sweep.eval));
      w.object("provenance", provenance(cfg));
      out << w.text() << "\n";
    };
  });

  // find-points
  auto* find = app.add_subcommand("find-points", "locate alpha-points with 0 < gamma <= T into the cache");
  detail::PointOptions find_p;
  find_p.add(find);
  std::string out_path;
  find->add_option("--out", out_path, "cache file to extend (default: --cache)");
  find->callback([&] {
    action = [&] {
      auto cfg = config();
      find_p.apply(cfg);
      if (!out_path.empty()) cfg.cache_path = out_path;
      if (!(cfg.T > 0.0)) throw DomainError("--T must be positive");
      const auto e = ensure_points(cfg, cfg.T, cfg.cache_path);
      const auto n = std::count_if(e.points.begin(), e.points.end(), [&](const AlphaPoint& p) { return p.gamma <= cfg.T; });
      const auto nt = std::count_if(e.points.begin(), e.points.end(), [&](const AlphaPoint& p) {
        return p.gamma <= cfg.T && p.kind == PointKind::non_trivial;
      });
      JsonWriter w;
      w.complex("alpha", cfg.alpha).num("T", cfg.T).num("covered_to", e.covered_to);
      w.integer("points", n).integer("non_trivial", nt).str("cache", cfg.cache_path);
      w.object("provenance", provenance(cfg));
      out << w.text() << "\n";
    };
  });

  // count-check
  auto* count = app.add_subcommand("count-check", "compare the count on (T, 2T] with the main term");
  detail::PointOptions count_p;
  count_p.add(count);
  count->callback([&] {
    action = [&] {
      auto cfg = config();
      count_p.apply(cfg);
      if (!(cfg.T > 1.0)) throw DomainError("--T must exceed 1");
      const auto e = ensure_points(cfg, 2.0 * cfg.T, cfg.cache_path);
      const auto c = rvm_count_check(cfg.descriptor(), e.points, cfg.T);
      JsonWriter w;
      w.complex("alpha", cfg.alpha).num("T", c.T).integer("found", c.found).num("main_term", c.main_term);
      w.num("deviation", c.deviation).num("reference_scale", c.reference_scale);
      w.object("provenance", provenance(cfg));
      out << w.text() << "\n";
    };
  });

  // explicit-check
  auto* expl = app.add_subcommand("explicit-check", "explicit-formula power sums against their main terms");
  detail::PointOptions expl_p;
  expl_p.add(expl, false);
  std::string theorem_text;
  double x = 0.0, eps = 0.0;
  std::vector<double> T_list;
  expl->add_option("--theorem", theorem_text, "t1 | t2 | t3")->required();
  expl->add_option("--x", x, "x > 1")->required();
  expl->add_option("--T", T_list, "height (repeatable)")->required();
  auto* eps_opt = expl->add_option("--eps", eps, "epsilon in the error scale");
  expl->callback([&] {
    action = [&] {
      auto cfg = config();
      expl_p.apply(cfg);
      const Theorem th = parse_theorem(theorem_text);
      const auto L = cfg.descriptor();
      require_theorem_applies(th, L, cfg.alpha);
      ExplicitParams ep;
      if (eps_opt->count()) ep.eps = eps;
      ep.sweep = cfg.sweep;
      const double t_max = *std::max_element(T_list.begin(), T_list.end());
      const auto e = ensure_points(cfg, t_max, cfg.cache_path);
      const auto fc = run_formula_check(th, L, cfg.alpha, x, T_list, e.points, ep);
      out << csv_provenance(cfg) << "theorem,x,T,lhs_re,lhs_im,main_re,main_im,res_abs,ref_scale,slope\n";
      for (std::size_t i = 0; i < fc.reports.size(); ++i) {
        const auto& r = fc.reports[i];
        out << to_string(r.theorem) << "," << fmt17(r.x) << "," << fmt17(r.T) << "," << fmt17(r.lhs.real()) << ","
            << fmt17(r.lhs.imag()) << "," << fmt17(r.main_term.real()) << "," << fmt17(r.main_term.imag()) << ","
            << fmt17(std::abs(r.residual)) << "," << fmt17(r.reference_scale) << ",";
        if (i + 1 == fc.reports.size() && fc.slope) out << fmt17(*fc.slope);
        out << "\n";
      }
    };
  });

  // weyl / discrepancy
  double a = 0.0;
  std::size_t N = 0;
  auto* weyl = app.add_subcommand("weyl", "Weyl sum of a * gamma over the first N cached ordinates");
  detail::PointOptions weyl_p;
  weyl_p.add(weyl);
  weyl->add_option("--a", a, "frequency")->required();
  weyl->add_option("--N", N, "number of ordinates")->required();
  weyl->callback([&] {
    action = [&] {
      auto cfg = config();
      weyl_p.apply(cfg);
      const auto e = detail::points_for(cfg, weyl_p.has_T() ? std::optional(cfg.T) : std::nullopt);
      const auto w = weyl_sum(detail::ordinates_above_zero(e.points), a, N);
      out << csv_provenance(cfg) << "a,N,re,im,abs\n";
      out << fmt17(a) << "," << N << "," << fmt17(w.value.real()) << "," << fmt17(w.value.imag()) << ","
          << fmt17(w.abs()) << "\n";
    };
  });
  auto* disc = app.add_subcommand("discrepancy", "star discrepancy of {a * gamma} over the first N ordinates");
  detail::PointOptions disc_p;
  disc_p.add(disc);
  disc->add_option("--a", a, "frequency")->required();
  disc->add_option("--N", N, "number of ordinates")->required();
  disc->callback([&] {
    action = [&] {
      auto cfg = config();
      disc_p.apply(cfg);
      const auto e = detail::points_for(cfg, disc_p.has_T() ? std::optional(cfg.T) : std::nullopt);
      const double d = star_discrepancy(detail::ordinates_above_zero(e.points), a, N);
      out << csv_provenance(cfg) << "a,N,star_discrepancy\n" << fmt17(a) << "," << N << "," << fmt17(d) << "\n";
    };
  });

  // gaps
  auto* gaps = app.add_subcommand("gaps", "consecutive ordinate gaps above t_min");
  detail::PointOptions gaps_p;
  gaps_p.add(gaps);
  double t_min = 0.0;
  gaps->add_option("--t-min", t_min, "lower height")->required();
  gaps->callback([&] {
    action = [&] {
      auto cfg = config();
      gaps_p.apply(cfg);
      const auto e = detail::points_for(cfg, gaps_p.has_T() ? std::optional(cfg.T) : std::nullopt);
      const auto s = gap_scan(detail::ordinates_above_zero(e.points), t_min);
      out << csv_provenance(cfg) << "# max_gap=" << fmt17(s.max_gap) << " location=" << fmt17(s.location) << "\n";
      out << "window_start,gap,gap_logloglog\n";
      for (const auto& r : s.table)
        out << fmt17(r.window_start) << "," << fmt17(r.gap) << "," << (r.scaled ? fmt17(*r.scaled) : "") << "\n";
    };
  });

  // subseq
  auto* subseq = app.add_subcommand("subseq", "ordinates nearest to b k, with optional Weyl checks");
  detail::PointOptions subseq_p;
  subseq_p.add(subseq, false);
  double b = 0.0;
  long long K = 0;
  int m = 1;
  auto* sub_a = subseq->add_option("--a", a, "Weyl frequency for the uniform-distribution check");
  subseq->add_option("--b", b, "step b > 0")->required();
  subseq->add_option("--K", K, "number of terms")->required();
  subseq->add_option("--m", m, "power m in gamma_{n_{k^m}}");
  subseq->callback([&] {
    action = [&] {
      auto cfg = config();
      subseq_p.apply(cfg);
      if (!(b > 0.0) || K < 1) throw DomainError("--b must be positive and --K at least 1");
      const auto e = ensure_points(cfg, b * double(K) + 10.0, cfg.cache_path);
      const auto sub = build_subsequence(detail::ordinates_above_zero(e.points), b, K, e.covered_to);
      out << csv_provenance(cfg);
      out << "# mean_abs_deviation first_half=" << fmt17(mean_abs_deviation(sub, 1, std::max(1LL, K / 2)))
          << " second_half=" << fmt17(mean_abs_deviation(sub, K / 2 + 1 <= K ? K / 2 + 1 : K, K)) << "\n";
      if (sub_a->count()) {
        const auto ud = subsequence_ud_check(sub, a, m);
        for (const auto& [n, w] : ud.values)
          out << "# weyl a=" << fmt17(a) << " m=" << m << " N=" << n << " re=" << fmt17(w.real())
              << " im=" << fmt17(w.imag()) << " abs=" << fmt17(std::abs(w)) << "\n";
        out << "# weyl trend_slope=" << fmt17(ud.trend_slope) << "\n";
      }
      out << "k,index,gamma,deviation\n";
      for (const auto& s : sub)
        out << s.k << "," << s.index << "," << fmt17(s.gamma) << "," << fmt17(s.deviation) << "\n";
    };
  });

  // euler-trunc
  auto* euler = app.add_subcommand("euler-trunc", "truncated Euler product over p <= y");
  double y = 0.0;
  euler->add_option("--s", s_text, "point re,im")->required();
  euler->add_option("--y", y, "prime bound")->required();
  euler->callback([&] {
    action = [&] {
      auto cfg = config();
      cfg.function = "zeta";
      const cplx s = parse_complex(s_text);
      const cplx v = zeta_truncated(s, y);
      out << csv_provenance(cfg) << "s_re,s_im,y,re,im,abs\n";
      out << fmt17(s.real()) << "," << fmt17(s.imag()) << "," << fmt17(y) << "," << fmt17(v.real()) << ","
          << fmt17(v.imag()) << "," << fmt17(std::abs(v)) << "\n";
    };
  });

  // bohr
  auto* bohr = app.add_subcommand("bohr", "mean square of zeta minus its truncated Euler product");
  double sigma = 0.0, bohr_T = 0.0, step = 0.05, t_start = 0.0;
  bohr->add_option("--sigma", sigma, "real part")->required();
  bohr->add_option("--y", y, "prime bound")->required();
  bohr->add_option("--T", bohr_T, "upper height")->required();
  bohr->add_option("--step", step, "Simpson step, at most 0.05");
  bohr->add_option("--t-start", t_start, "lower height of the averaging window");
  bohr->callback([&] {
    action = [&] {
      auto cfg = config();
      cfg.function = "zeta";
      const auto r = bohr_mean_square(sigma, y, bohr_T, step, t_start, cfg.sweep.eval, cfg.threads);
      out << csv_provenance(cfg) << "sigma,y,T,t_start,step,value,error_estimate\n";
      out << fmt17(sigma) << "," << fmt17(y) << "," << fmt17(bohr_T) << "," << fmt17(t_start) << "," << fmt17(r.step)
          << "," << fmt17(r.value) << "," << fmt17(r.error_estimate) << "\n";
    };
  });

  // uscan
  auto* uscan = app.add_subcommand("uscan", "hit rate of zeta shifts along a zero subsequence");
  std::string k_spec, target_spec;
  double pitch = 0.01;
  uscan->add_option("--b", b, "subsequence step")->default_val(2 * std::numbers::pi);
  uscan->add_option("--K-spec", k_spec, "disk:re,im,r | rect:s0,t0,s1,t1")->required();
  uscan->add_option("--target", target_spec, "const:re,im | exp-poly:c0;c1;... | zeta-shift:re,im")->required();
  uscan->add_option("--eps", eps, "hit threshold")->required();
  uscan->add_option("--N", N, "number of shifts")->required();
  uscan->add_option("--pitch", pitch, "grid pitch, at most 0.01");
  uscan->callback([&] {
    action = [&] {
      auto cfg = config();
      cfg.function = "zeta";
      cfg.alpha = 0.0;
      if (!(b > 0.0) || N == 0) throw DomainError("--b must be positive and --N at least 1");
      const auto Kset = parse_compact_set(k_spec);
      const auto f = parse_target(target_spec, cfg.sweep.eval);
      const auto e = ensure_points(cfg, b * double(N) + 10.0, cfg.cache_path);
      const auto sub = build_subsequence(detail::ordinates_above_zero(e.points), b, (long long)N, e.covered_to);
      const auto r = hit_rate(sub, Kset, f, eps, N, pitch, cfg.sweep.eval, cfg.threads);
      out << csv_provenance(cfg) << "# target=" << f.label() << " eps=" << fmt17(eps) << " hits=" << r.hits
          << " N=" << r.N << " rate=" << fmt17(r.rate) << "\n";
      out << "k,gamma,sup_distance,hit\n";
      for (std::size_t k = 0; k < r.N; ++k)
        out << sub[k].k << "," << fmt17(sub[k].gamma) << "," << fmt17(r.sup_distance[k]) << ","
            << (r.sup_distance[k] < eps ? 1 : 0) << "\n";
    };
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDomain;
  }
  try {
    if (action) action();
    out.flush();
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace selberg::cli
