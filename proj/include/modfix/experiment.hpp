#pragma once

// Experiment drivers behind the CLI verbs `check`, `solve` and `bounds`.
// Each driver is a template over the numeric backend; the untemplated
// entry points dispatch on Backend.
//
// Exit codes: 0 pass, 1 violation or mismatch, 2 non-convergence.

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "modfix/config.hpp"
#include "modfix/contraction.hpp"
#include "modfix/error.hpp"
#include "modfix/expr.hpp"
#include "modfix/graph.hpp"
#include "modfix/modular.hpp"
#include "modfix/sampling.hpp"
#include "modfix/solver.hpp"

namespace modfix {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitNonConvergence = 2;

template <Scalar T>
using AnyConstants = std::variant<BanachConstants<T>, KannanConstants<T>>;

template <Scalar T>
struct Experiment {
  std::size_t dimension;
  Modular<T> modular;
  SelfMap<T> map;
  SpaceGraph<T> graph;
  std::optional<AnyConstants<T>> constants;
  bool undirected = false;
  std::vector<Point<T>> points;
  PairSample<T> pairs;
  std::vector<Coefficients<T>> coeffs;
  std::optional<Point<T>> x0;
  std::optional<SolveOptions<T>> solve;
  std::size_t bounds_depth = 20;
};

template <Scalar T>
Modular<T> build_modular(const ModularConfig& mc, std::size_t dim) {
  if (mc.builtin) return Modular<T>(*mc.builtin, dim);
  auto e = expr::parse_expression(*mc.expression, expr::Context::function(dim));
  return Modular<T>::custom([e](const Point<T>& x) { return expr::evaluate<T>(e, x); }, dim, mc.convex,
                            "expression " + *mc.expression);
}

template <Scalar T>
SelfMap<T> build_map(const MapConfig& mc, std::size_t dim) {
  switch (mc.kind) {
    case MapConfig::Kind::affine: {
      const T slope = from_rational<T>(mc.slope);
      const Point<T> offset = point_from_rational<T>(mc.offset);
      return {[slope, offset](const Point<T>& x) { return slope * x + offset; },
              "affine f(x) = " + to_string(slope) + "*x + " + to_string(offset)};
    }
    case MapConfig::Kind::piecewise: {
      std::vector<std::pair<std::optional<expr::Expr>, Point<T>>> branches;
      std::string d = "piecewise(";
      for (std::size_t i = 0; i < mc.branches.size(); ++i) {
        const auto& br = mc.branches[i];
        std::optional<expr::Expr> guard;
        if (br.guard) guard = expr::parse_expression(*br.guard, expr::Context::guard(dim));
        branches.emplace_back(std::move(guard), point_from_rational<T>(br.value));
        d += (i ? ", " : "") + br.guard.value_or("else") + " -> " + to_string(branches.back().second);
      }
      return {[branches](const Point<T>& x) {
                for (const auto& [guard, value] : branches)
                  if (!guard || expr::evaluate_guard<T>(*guard, x)) return value;
                throw DomainError("no piecewise branch matched " + to_string(x));
              },
              d + ")"};
    }
    case MapConfig::Kind::expression: {
      std::vector<expr::Expr> coords;
      for (const auto& s : mc.expressions) coords.push_back(expr::parse_expression(s, expr::Context::function(dim)));
      std::string d = "f(x) = ";
      for (std::size_t i = 0; i < mc.expressions.size(); ++i) d += (i ? ", " : "") + mc.expressions[i];
      return {[coords](const Point<T>& x) {
                std::vector<T> out;
                out.reserve(coords.size());
                for (const auto& e : coords) out.push_back(expr::evaluate<T>(e, x));
                return Point<T>(std::move(out));
              },
              d};
    }
  }
  throw PreconditionError("unknown map kind");
}

template <Scalar T>
SpaceGraph<T> build_graph(const GraphConfig& gc, std::size_t dim) {
  if (gc.kind == GraphKind::complete) return make_complete<T>();
  if (gc.kind == GraphKind::poset && !gc.predicate) return make_coordinatewise_poset<T>();
  auto e = expr::parse_expression(*gc.predicate, expr::Context::predicate(dim));
  auto pred = [e](const Point<T>& x, const Point<T>& y) { return expr::evaluate_predicate<T>(e, x, y); };
  return gc.kind == GraphKind::poset ? make_poset<T>(pred) : make_custom<T>(pred);
}

template <Scalar T>
AnyConstants<T> build_constants(const ContractionConfig& cc) {
  std::vector<T> v;
  for (const auto& r : cc.values) v.push_back(from_rational<T>(r));
  if (cc.mode == ContractionMode::banach) return BanachConstants<T>(v[0], v[1], v[2]);
  return KannanConstants<T>(v[0], v[1], v[2], v[3], v[4]);
}

/// Sample points are grid, then random, then explicit points, with exact
/// duplicates removed. Pairs are all ordered pairs of sample points followed
/// by the explicit pairs.
inline std::vector<RationalPoint> sample_points(const SampleConfig& sc, std::size_t dim) {
  std::vector<RationalPoint> raw;
  if (sc.grid) {
    auto g = grid_points(sc.grid->lo, sc.grid->hi, sc.grid->count, dim);
    raw.insert(raw.end(), g.begin(), g.end());
  }
  if (sc.random) {
    SplitMix64 rng(sc.random->seed);
    auto r = random_points(rng, sc.random->lo, sc.random->hi, sc.random->count, dim, sc.random->resolution);
    raw.insert(raw.end(), r.begin(), r.end());
  }
  raw.insert(raw.end(), sc.points.begin(), sc.points.end());
  std::vector<RationalPoint> out;
  std::set<std::vector<std::string>> seen;
  for (auto& p : raw) {
    std::vector<std::string> key;
    for (const auto& c : p) key.push_back(to_string(c));
    if (seen.insert(key).second) out.push_back(std::move(p));
  }
  return out;
}

template <Scalar T>
Experiment<T> build_experiment(const ExperimentConfig& cfg) {
  const std::size_t dim = cfg.space.dimension;
  Experiment<T> ex{dim,
                   build_modular<T>(cfg.modular, dim),
                   build_map<T>(cfg.map, dim),
                   build_graph<T>(cfg.graph, dim),
                   std::nullopt,
                   false,
                   {},
                   {},
                   {},
                   std::nullopt,
                   std::nullopt,
                   20};
  if (cfg.contraction) {
    ex.constants = build_constants<T>(*cfg.contraction);
    ex.undirected = cfg.contraction->undirected;
  }
  for (const auto& p : sample_points(cfg.samples, dim)) ex.points.push_back(point_from_rational<T>(p));
  for (const auto& x : ex.points)
    for (const auto& y : ex.points) ex.pairs.emplace_back(x, y);
  for (const auto& [x, y] : cfg.samples.pairs) ex.pairs.emplace_back(point_from_rational<T>(x), point_from_rational<T>(y));
  if (cfg.samples.coeffs.empty()) {
    ex.coeffs = default_coefficients<T>();
  } else {
    for (const auto& [a, b] : cfg.samples.coeffs) ex.coeffs.push_back({from_rational<T>(a), from_rational<T>(b)});
  }
  if (cfg.solve) {
    const auto& s = *cfg.solve;
    ex.x0 = point_from_rational<T>(s.x0);
    SolveOptions<T> opts{from_rational<T>(s.tol), s.max_iter, s.cf_depth, std::nullopt};
    if (!s.witnesses.empty()) {
      std::vector<Point<T>> w;
      for (const auto& p : s.witnesses) w.push_back(point_from_rational<T>(p));
      opts.witnesses = WitnessSet<T>(std::move(w));
    }
    ex.solve = std::move(opts);
    ex.bounds_depth = s.bounds_depth;
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Reporting helpers

template <Scalar T>
std::string describe_constants(const AnyConstants<T>& c) {
  if (const auto* b = std::get_if<BanachConstants<T>>(&c))
    return "k=" + to_string(b->k) + " a=" + to_string(b->a) + " b=" + to_string(b->b);
  const auto& k = std::get<KannanConstants<T>>(c);
  return "k=" + to_string(k.k) + " l=" + to_string(k.l) + " a1=" + to_string(k.a1) + " a2=" + to_string(k.a2) +
         " b=" + to_string(k.b);
}

namespace detail {

inline constexpr std::size_t kWitnessesShown = 3;

template <Scalar T>
void print_axiom_report(std::ostream& out, const std::string& title, const AxiomReport<T>& r) {
  out << (r.ok() ? "PASS " : "FAIL ") << title << ": " << r.instances_checked << " instances, "
      << r.violations.size() << " violations\n";
  for (std::size_t i = 0; i < r.violations.size() && i < kWitnessesShown; ++i) {
    const auto& v = r.violations[i];
    out << "     " << axiom_name(v.axiom) << " witness x=" << to_string(v.x);
    if (v.y) out << " y=" << to_string(*v.y);
    out << " a=" << to_string(v.a) << " b=" << to_string(v.b) << " lhs=" << to_string(v.lhs)
        << " rhs=" << to_string(v.rhs) << "\n";
  }
}

template <Scalar T>
void print_contraction_report(std::ostream& out, const std::string& title, const ContractionReport<T>& r) {
  out << (r.ok() ? "PASS " : "FAIL ") << title << ": " << r.pairs_checked << " pairs, " << r.violations.size()
      << " violations";
  if (r.max_ratio) out << ", max ratio " << to_string(*r.max_ratio);
  out << "\n";
  for (std::size_t i = 0; i < r.violations.size() && i < kWitnessesShown; ++i) {
    const auto& v = r.violations[i];
    out << "     witness x=" << to_string(v.x) << " y=" << to_string(v.y);
    if (v.kind == ViolationKind::inequality) out << " lhs=" << to_string(v.lhs) << " rhs=" << to_string(v.rhs);
    else out << " edge not preserved";
    out << "\n";
  }
}

}  // namespace detail

/// Samples the modular axioms, convexity (for convex modulars), edge
/// preservation and the configured contraction inequality.
template <Scalar T>
int run_check(const ExperimentConfig& cfg, std::ostream& out) {
  const Experiment<T> ex = build_experiment<T>(cfg);
  if (ex.points.empty()) throw ConfigError("$.samples", "check needs sample points (grid, random or points)");
  bool ok = true;
  out << "backend " << ScalarTraits<T>::name << ", modular " << ex.modular.description() << ", map "
      << ex.map.description << ", graph " << graph_kind_name(ex.graph.kind()) << "\n";

  auto axioms = check_modular_axioms(ex.modular, ex.points, ex.coeffs);
  detail::print_axiom_report(out, "modular axioms M1-M4", axioms);
  ok = ok && axioms.ok();
  if (ex.modular.convex()) {
    auto convex = check_convexity(ex.modular, ex.points, ex.coeffs);
    detail::print_axiom_report(out, "convexity M4'", convex);
    ok = ok && convex.ok();
  }

  auto edges = check_edge_preservation(ex.map, ex.graph, ex.pairs);
  detail::print_contraction_report(out, "edge preservation", edges);
  ok = ok && edges.ok();

  if (ex.constants) {
    const std::string graph_name = ex.undirected ? "G~" : "G";
    if (const auto* b = std::get_if<BanachConstants<T>>(&*ex.constants)) {
      auto r = check_banach_condition(ex.map, ex.modular, ex.graph, *b, ex.pairs, ex.undirected);
      detail::print_contraction_report(out, "Banach condition on " + graph_name + " (" + describe_constants(*ex.constants) + ")", r);
      ok = ok && r.ok();
    } else {
      const auto& k = std::get<KannanConstants<T>>(*ex.constants);
      auto r = check_kannan_condition(ex.map, ex.modular, ex.graph, k, ex.pairs, ex.undirected);
      detail::print_contraction_report(out, "Kannan condition on " + graph_name + " (" + describe_constants(*ex.constants) + ")", r);
      if (!*r.a2_within_half_b) out << "     note: a2 > b/2, the condition need not transfer from G to G~\n";
      ok = ok && r.ok();
    }
  }
  out << (ok ? "result: no violations\n" : "result: violations found\n");
  return ok ? kExitPass : kExitViolation;
}

template <Scalar T>
SolveResult<T> solve_experiment(const Experiment<T>& ex) {
  if (!ex.constants) throw ConfigError("$.contraction", "solve needs contraction constants");
  if (!ex.solve) throw ConfigError("$.solve", "missing solve block");
  if (const auto* b = std::get_if<BanachConstants<T>>(&*ex.constants))
    return solve_banach(ex.map, ex.modular, ex.graph, *b, *ex.x0, *ex.solve);
  return solve_kannan(ex.map, ex.modular, ex.graph, std::get<KannanConstants<T>>(*ex.constants), *ex.x0, *ex.solve);
}

/// CSV columns: n, x (or x1..xd), step_gap, apriori_bound. step_gap on row n
/// is rho(b(x_n - x_{n-1})) and is empty on row 0.
template <Scalar T>
void write_trace_csv(std::ostream& out, const SolveResult<T>& r) {
  const std::size_t dim = r.trace.start.dimension();
  out << "n";
  if (dim == 1) out << ",x";
  else
    for (std::size_t i = 1; i <= dim; ++i) out << ",x" << i;
  out << ",step_gap,apriori_bound\n";
  for (std::size_t n = 0; n < r.trace.points.size(); ++n) {
    out << n;
    for (const auto& c : r.trace.points[n].coords()) out << "," << to_string(c);
    out << ",";
    if (n > 0) out << to_string(r.trace.step_gaps[n - 1]);
    out << "," << to_string(r.bounds[n]) << "\n";
  }
}

template <Scalar T>
void print_certificate(std::ostream& out, SolveStatus status, const ConvergenceCertificate<T>& c) {
  auto row = [&](const char* key, const std::string& value) { out << std::left << std::setw(16) << key << value << "\n"; };
  row("mode", std::string(mode_name(c.mode)));
  row("constants", std::visit([](const auto& k) { return describe_constants<T>(AnyConstants<T>(k)); }, c.constants));
  if (c.alpha) row("alpha", to_string(*c.alpha));
  row(c.mode == ContractionMode::banach ? "seed r" : "seed d0", to_string(c.seed));
  row("rate", to_string(c.rate));
  row("status", std::string(status_name(status)));
  row("stop reason", std::string(stop_reason_name(c.stop_reason)));
  row("iterations", std::to_string(c.iterations));
  row("fixed point", to_string(c.fixed_point));
  row("residual", to_string(c.residual));
  row("step gap", to_string(c.step_gap_at_stop));
  row("bound at stop", to_string(c.bound_at_stop));
  row("snapped", c.snapped ? "yes" : "no");
  row("C_f depth", std::to_string(c.cf_checked_depth) + (c.cf_passed ? " (pass)" : " (fail)"));
  if (c.uniqueness)
    row("uniqueness", c.uniqueness->kind + ": " + (c.uniqueness->supported ? "supported, " : "not supported, ") +
                          c.uniqueness->detail);
}

template <Scalar T>
int run_solve(const ExperimentConfig& cfg, const std::optional<std::string>& csv_path, std::ostream& out) {
  const Experiment<T> ex = build_experiment<T>(cfg);
  const SolveResult<T> r = solve_experiment(ex);
  if (csv_path) {
    std::ofstream csv(*csv_path, std::ios::binary);
    if (!csv) throw Error("cannot write " + *csv_path);
    write_trace_csv(csv, r);
  }
  print_certificate(out, r.status, r.certificate);
  return r.converged() ? kExitPass : kExitNonConvergence;
}

/// Bound-versus-actual table. Banach rows cover 1 <= n <= m <= depth with
/// bound k^n r/(1-k); Kannan rows cover 1 <= n, m <= depth with the
/// two-index bound. slack = bound - actual.
template <Scalar T>
int run_bounds(const ExperimentConfig& cfg, const std::optional<std::string>& csv_path, std::ostream& out) {
  const Experiment<T> ex = build_experiment<T>(cfg);
  if (!ex.constants) throw ConfigError("$.contraction", "bounds needs contraction constants");
  if (!ex.solve) throw ConfigError("$.solve", "bounds needs a solve block");
  const std::size_t depth = ex.bounds_depth;
  const auto* banach = std::get_if<BanachConstants<T>>(&*ex.constants);
  const auto* kannan = std::get_if<KannanConstants<T>>(&*ex.constants);
  const T b = banach ? banach->b : kannan->b;
  const auto orbit = picard_orbit(ex.map, *ex.x0, depth).points;
  const T seed = banach ? banach_seed(*banach, ex.modular, ex.map, *ex.x0) : ex.modular(b * (orbit[1] - orbit[0]));

  std::ostringstream rows;
  rows << "n,m,actual_gap,bound,slack\n";
  std::size_t count = 0;
  std::size_t negative = 0;
  for (std::size_t n = 1; n <= depth; ++n) {
    for (std::size_t m = banach ? n : 1; m <= depth; ++m) {
      T actual = ex.modular(b * (orbit[m] - orbit[n]));
      T bound = banach ? banach_apriori_bound(*banach, seed, n) : kannan_cauchy_bound(*kannan, seed, n, m);
      T slack = bound - actual;
      ++count;
      if (exceeds(actual, bound, 1e-12)) ++negative;
      rows << n << "," << m << "," << to_string(actual) << "," << to_string(bound) << "," << to_string(slack) << "\n";
    }
  }
  if (csv_path) {
    std::ofstream csv(*csv_path, std::ios::binary);
    if (!csv) throw Error("cannot write " + *csv_path);
    csv << rows.str();
  }
  out << (negative == 0 ? "PASS " : "FAIL ") << mode_name(banach ? ContractionMode::banach : ContractionMode::kannan)
      << " bounds: " << count << " rows, " << negative << " with negative slack (depth " << depth << ", "
      << (banach ? "r=" : "d0=") << to_string(seed) << ")\n";
  return negative == 0 ? kExitPass : kExitViolation;
}

inline int run_check(const ExperimentConfig& cfg, Backend backend, std::ostream& out) {
  return backend == Backend::exact ? run_check<Rational>(cfg, out) : run_check<double>(cfg, out);
}

inline int run_solve(const ExperimentConfig& cfg, Backend backend, const std::optional<std::string>& csv,
                     std::ostream& out) {
  return backend == Backend::exact ? run_solve<Rational>(cfg, csv, out) : run_solve<double>(cfg, csv, out);
}

inline int run_bounds(const ExperimentConfig& cfg, Backend backend, const std::optional<std::string>& csv,
                      std::ostream& out) {
  return backend == Backend::exact ? run_bounds<Rational>(cfg, csv, out) : run_bounds<double>(cfg, csv, out);
}

}  // namespace modfix

namespace modfix {

/// The --backend flag wins over MODFIX_BACKEND, which wins over the config.
inline Backend resolve_backend(const std::optional<std::string>& flag, const char* env, Backend from_config) {
  if (flag) return parse_backend(*flag);
  if (env && *env) return parse_backend(env);
  return from_config;
}

}  // namespace modfix
