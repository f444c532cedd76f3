#pragma once

// Experiment configuration: a JSON document with exact constants written as
// strings ("64/81", "1e-9") or plain JSON numbers. Unknown keys are
// rejected; every error names the offending field path.
//
// {
//   "space":    {"dimension": 1, "backend": "exact"},
//   "modular":  {"family": "power", "p": "2"}            |  {"expression": "x^2", "convex": true},
//   "map":      {"affine": {"slope": "1/3", "offset": "0"}}
//             | {"piecewise": [{"guard": "x = 1", "value": "1/10"}, {"guard": "else", "value": "1/2"}]}
//             | {"expression": "x/3"}  |  {"expressions": ["x1/2", "x2/3"]},
//   "graph":    {"kind": "complete"} | {"kind": "poset"[, "order": "x <= y"]} | {"kind": "custom", "edge": "..."},
//   "contraction": {"banach": {"k": "2/3", "a": "1/2", "b": "1"}, "undirected": false}
//                | {"kannan": {"k": "64/81", "l": "16/81", "a1": "1/2", "a2": "1", "b": "1"}},
//   "solve":    {"x0": ["1"], "tol": "1e-9", "max_iter": 200, "cf_depth": 20, "bounds_depth": 20,
//                "witnesses": [["0"], ["1"]]},
//   "samples":  {"grid": {"lo": "-2", "hi": "2", "count": 21},
//                "random": {"lo": "-1", "hi": "1", "count": 50, "seed": 7, "resolution": 1000},
//                "points": [["1"]], "pairs": [[["1"], ["3/5"]]], "coeffs": [["1/2", "1/2"]]}
// }

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "modfix/contraction.hpp"
#include "modfix/error.hpp"
#include "modfix/expr.hpp"
#include "modfix/graph.hpp"
#include "modfix/modular.hpp"
#include "modfix/sampling.hpp"
#include "modfix/solver.hpp"

namespace modfix {

using json = nlohmann::ordered_json;

struct SpaceConfig {
  std::size_t dimension = 1;
  Backend backend = Backend::exact;
};

struct ModularConfig {
  std::optional<ModularSpec> builtin;
  std::optional<std::string> expression;
  bool convex = true;
};

struct PiecewiseBranchConfig {
  std::optional<std::string> guard;  // nullopt for else
  RationalPoint value;
};

struct MapConfig {
  enum class Kind { affine, piecewise, expression };
  Kind kind = Kind::affine;
  Rational slope = 1;
  RationalPoint offset;                        // affine; one entry per coordinate
  std::vector<PiecewiseBranchConfig> branches;  // piecewise
  std::vector<std::string> expressions;         // expression; one per coordinate
};

struct GraphConfig {
  GraphKind kind = GraphKind::complete;
  std::optional<std::string> predicate;  // poset order (default coordinatewise <=) or custom edge
};

struct ContractionConfig {
  ContractionMode mode = ContractionMode::banach;
  std::vector<Rational> values;  // (k, a, b) or (k, l, a1, a2, b)
  bool undirected = false;
};

struct SolveConfig {
  RationalPoint x0;
  Rational tol;
  std::size_t max_iter = 1000;
  std::size_t cf_depth = kDefaultCfDepth;
  std::size_t bounds_depth = 20;
  std::vector<RationalPoint> witnesses;
};

struct GridConfig {
  Rational lo;
  Rational hi;
  std::size_t count = 0;
};

struct RandomConfig {
  Rational lo;
  Rational hi;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::uint64_t resolution = 1000;
};

struct SampleConfig {
  std::optional<GridConfig> grid;
  std::optional<RandomConfig> random;
  std::vector<RationalPoint> points;
  std::vector<std::pair<RationalPoint, RationalPoint>> pairs;
  std::vector<std::pair<Rational, Rational>> coeffs;  // empty: default coefficients
};

struct ExperimentConfig {
  SpaceConfig space;
  ModularConfig modular;
  MapConfig map;
  GraphConfig graph;
  std::optional<ContractionConfig> contraction;
  std::optional<SolveConfig> solve;
  SampleConfig samples;
};

namespace detail {

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const json& node() const { return node_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

  Reader child(const std::string& key) const { return Reader(node_.at(key), path_ + "." + key); }
  Reader element(std::size_t i) const { return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  bool has(const std::string& key) const { return node_.contains(key); }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : node_.items())
      if (!ok.count(item.key())) throw ConfigError(path_ + "." + item.key(), "unknown key");
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(path_ + "." + key, "missing required field");
  }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  Rational rational() const {
    try {
      if (node_.is_string()) return parse_rational(node_.get<std::string>());
      if (node_.is_number_integer()) return Rational(node_.get<long long>());
      if (node_.is_number()) return parse_rational(node_.dump());
    } catch (const DomainError& e) {
      fail(e.what());
    }
    fail("expected a number or a rational string");
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  bool boolean() const {
    if (!node_.is_boolean()) fail("expected true or false");
    return node_.get<bool>();
  }

  std::uint64_t count(std::uint64_t min = 0) const {
    if (!node_.is_number_integer() || node_.get<long long>() < 0) fail("expected a nonnegative integer");
    auto v = node_.get<std::uint64_t>();
    if (v < min) fail("must be >= " + std::to_string(min));
    return v;
  }

  /// A point: an array of coordinates, or a bare scalar in dimension 1.
  RationalPoint point(std::size_t dimension) const {
    RationalPoint p;
    if (!node_.is_array()) {
      if (dimension != 1) fail("expected an array of " + std::to_string(dimension) + " coordinates");
      p.push_back(rational());
      return p;
    }
    if (node_.size() != dimension) fail("expected " + std::to_string(dimension) + " coordinates");
    for (std::size_t i = 0; i < node_.size(); ++i) p.push_back(element(i).rational());
    return p;
  }

 private:
  const json& node_;
  std::string path_;
};

inline void check_expression(const Reader& r, const std::string& src, expr::Context ctx) {
  try {
    expr::parse_expression(src, ctx);
  } catch (const ParseError& e) {
    r.fail(e.what());
  }
}

inline json rational_json(const Rational& r) { return to_string(r); }

inline json point_json(const RationalPoint& p) {
  json a = json::array();
  for (const auto& c : p) a.push_back(to_string(c));
  return a;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  using detail::Reader;
  ExperimentConfig cfg;
  Reader root(doc, "$");
  root.require_object({"space", "modular", "map", "graph", "contraction", "solve", "samples"});

  if (root.has("space")) {
    Reader sp = root.child("space");
    sp.require_object({"dimension", "backend"});
    if (sp.has("dimension")) cfg.space.dimension = sp.child("dimension").count(1);
    if (sp.has("backend")) {
      Reader b = sp.child("backend");
      try {
        cfg.space.backend = parse_backend(b.string());
      } catch (const PreconditionError& e) {
        b.fail(e.what());
      }
    }
  }
  const std::size_t dim = cfg.space.dimension;

  root.require("modular");
  {
    Reader m = root.child("modular");
    m.require_object({"family", "p", "weights", "convex", "expression"});
    if (m.has("convex")) cfg.modular.convex = m.child("convex").boolean();
    if (m.has("expression")) {
      if (m.has("family") || m.has("p") || m.has("weights")) m.fail("give either a family or an expression");
      cfg.modular.expression = m.child("expression").string();
      detail::check_expression(m.child("expression"), *cfg.modular.expression, expr::Context::function(dim));
    } else {
      m.require("family");
      ModularSpec spec;
      Reader fam = m.child("family");
      try {
        spec.family = parse_family(fam.string());
      } catch (const PreconditionError& e) {
        fam.fail(e.what());
      }
      if (m.has("p")) spec.exponent = m.child("p").rational();
      if (m.has("weights")) {
        Reader w = m.child("weights");
        for (std::size_t i = 0; i < w.size(); ++i) spec.weights.push_back(w.element(i).rational());
      }
      spec.convex = cfg.modular.convex;
      try {
        spec.validate(dim);
      } catch (const Error& e) {
        m.fail(e.what());
      }
      cfg.modular.builtin = std::move(spec);
    }
  }

  root.require("map");
  {
    Reader m = root.child("map");
    m.require_object({"affine", "piecewise", "expression", "expressions"});
    int given = m.has("affine") + m.has("piecewise") + m.has("expression") + m.has("expressions");
    if (given != 1) m.fail("give exactly one of affine, piecewise, expression, expressions");
    if (m.has("affine")) {
      Reader a = m.child("affine");
      a.require_object({"slope", "offset"});
      cfg.map.kind = MapConfig::Kind::affine;
      a.require("slope");
      cfg.map.slope = a.child("slope").rational();
      cfg.map.offset = a.has("offset") ? a.child("offset").point(dim) : RationalPoint(dim, Rational(0));
    } else if (m.has("piecewise")) {
      Reader p = m.child("piecewise");
      cfg.map.kind = MapConfig::Kind::piecewise;
      const std::size_t n = p.size();
      if (n == 0) p.fail("piecewise map needs at least one branch");
      for (std::size_t i = 0; i < n; ++i) {
        Reader br = p.element(i);
        br.require_object({"guard", "value"});
        br.require("guard");
        br.require("value");
        PiecewiseBranchConfig out;
        std::string guard = br.child("guard").string();
        if (guard != "else") {
          detail::check_expression(br.child("guard"), guard, expr::Context::guard(dim));
          out.guard = guard;
        } else if (i + 1 != n) {
          br.child("guard").fail("else must be the last branch");
        }
        out.value = br.child("value").point(dim);
        cfg.map.branches.push_back(std::move(out));
      }
    } else {
      cfg.map.kind = MapConfig::Kind::expression;
      if (m.has("expression")) {
        if (dim != 1) m.child("expression").fail("use \"expressions\" (one per coordinate) in dimension > 1");
        cfg.map.expressions.push_back(m.child("expression").string());
      } else {
        Reader es = m.child("expressions");
        if (es.size() != dim) es.fail("expected " + std::to_string(dim) + " expressions");
        for (std::size_t i = 0; i < dim; ++i) cfg.map.expressions.push_back(es.element(i).string());
      }
      for (std::size_t i = 0; i < cfg.map.expressions.size(); ++i) {
        Reader at = m.has("expression") ? m.child("expression") : m.child("expressions").element(i);
        detail::check_expression(at, cfg.map.expressions[i], expr::Context::function(dim));
      }
    }
  }

  if (root.has("graph")) {
    Reader g = root.child("graph");
    g.require_object({"kind", "order", "edge"});
    g.require("kind");
    std::string kind = g.child("kind").string();
    if (kind == "complete") {
      if (g.has("order") || g.has("edge")) g.fail("complete graph takes no predicate");
      cfg.graph.kind = GraphKind::complete;
    } else if (kind == "poset") {
      if (g.has("edge")) g.child("edge").fail("poset graphs take \"order\"");
      cfg.graph.kind = GraphKind::poset;
      if (g.has("order")) cfg.graph.predicate = g.child("order").string();
    } else if (kind == "custom") {
      if (g.has("order")) g.child("order").fail("custom graphs take \"edge\"");
      g.require("edge");
      cfg.graph.kind = GraphKind::custom;
      cfg.graph.predicate = g.child("edge").string();
    } else {
      g.child("kind").fail("expected complete|poset|custom");
    }
    if (cfg.graph.predicate)
      detail::check_expression(g.child(cfg.graph.kind == GraphKind::poset ? "order" : "edge"), *cfg.graph.predicate,
                               expr::Context::predicate(dim));
  }

  if (root.has("contraction")) {
    Reader c = root.child("contraction");
    c.require_object({"banach", "kannan", "undirected"});
    if (c.has("banach") == c.has("kannan")) c.fail("give exactly one of banach, kannan");
    ContractionConfig cc;
    if (c.has("undirected")) cc.undirected = c.child("undirected").boolean();
    if (c.has("banach")) {
      Reader b = c.child("banach");
      b.require_object({"k", "a", "b"});
      for (const char* key : {"k", "a", "b"}) {
        b.require(key);
        cc.values.push_back(b.child(key).rational());
      }
      cc.mode = ContractionMode::banach;
      try {
        BanachConstants<Rational>(cc.values[0], cc.values[1], cc.values[2]);
      } catch (const AdmissibilityError& e) {
        b.fail(e.what());
      }
    } else {
      Reader k = c.child("kannan");
      k.require_object({"k", "l", "a1", "a2", "b"});
      for (const char* key : {"k", "l", "a1", "a2", "b"}) {
        k.require(key);
        cc.values.push_back(k.child(key).rational());
      }
      cc.mode = ContractionMode::kannan;
      try {
        KannanConstants<Rational>(cc.values[0], cc.values[1], cc.values[2], cc.values[3], cc.values[4]);
      } catch (const AdmissibilityError& e) {
        k.fail(e.what());
      }
    }
    cfg.contraction = std::move(cc);
  }

  if (root.has("solve")) {
    Reader s = root.child("solve");
    s.require_object({"x0", "tol", "max_iter", "cf_depth", "bounds_depth", "witnesses"});
    s.require("x0");
    s.require("tol");
    SolveConfig sc;
    sc.x0 = s.child("x0").point(dim);
    sc.tol = s.child("tol").rational();
    if (sc.tol <= 0) s.child("tol").fail("tolerance must be positive");
    if (s.has("max_iter")) sc.max_iter = s.child("max_iter").count();
    if (s.has("cf_depth")) sc.cf_depth = s.child("cf_depth").count(1);
    if (s.has("bounds_depth")) sc.bounds_depth = s.child("bounds_depth").count(1);
    if (s.has("witnesses")) {
      Reader w = s.child("witnesses");
      for (std::size_t i = 0; i < w.size(); ++i) sc.witnesses.push_back(w.element(i).point(dim));
      if (sc.witnesses.empty()) w.fail("witness set must be nonempty");
    }
    cfg.solve = std::move(sc);
  }

  if (root.has("samples")) {
    Reader s = root.child("samples");
    s.require_object({"grid", "random", "points", "pairs", "coeffs"});
    if (s.has("grid")) {
      Reader g = s.child("grid");
      g.require_object({"lo", "hi", "count"});
      for (const char* key : {"lo", "hi", "count"}) g.require(key);
      cfg.samples.grid = GridConfig{g.child("lo").rational(), g.child("hi").rational(), g.child("count").count(1)};
    }
    if (s.has("random")) {
      Reader r = s.child("random");
      r.require_object({"lo", "hi", "count", "seed", "resolution"});
      for (const char* key : {"lo", "hi", "count", "seed"}) r.require(key);
      RandomConfig rc{r.child("lo").rational(), r.child("hi").rational(), r.child("count").count(), 0, 1000};
      rc.seed = r.child("seed").count();
      if (r.has("resolution")) rc.resolution = r.child("resolution").count(1);
      cfg.samples.random = rc;
    }
    if (s.has("points")) {
      Reader p = s.child("points");
      for (std::size_t i = 0; i < p.size(); ++i) cfg.samples.points.push_back(p.element(i).point(dim));
    }
    if (s.has("pairs")) {
      Reader p = s.child("pairs");
      for (std::size_t i = 0; i < p.size(); ++i) {
        Reader pr = p.element(i);
        if (pr.size() != 2) pr.fail("a pair has two points");
        cfg.samples.pairs.emplace_back(pr.element(0).point(dim), pr.element(1).point(dim));
      }
    }
    if (s.has("coeffs")) {
      Reader c = s.child("coeffs");
      for (std::size_t i = 0; i < c.size(); ++i) {
        Reader pr = c.element(i);
        if (pr.size() != 2) pr.fail("coefficients come in pairs (a, b)");
        Rational a = pr.element(0).rational();
        Rational b = pr.element(1).rational();
        if (a < 0 || b < 0 || a + b != 1) pr.fail("coefficients need a, b >= 0 and a + b = 1");
        cfg.samples.coeffs.emplace_back(std::move(a), std::move(b));
      }
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical JSON form; parse_config(to_json(c)) reproduces c.
inline json to_json(const ExperimentConfig& cfg) {
  using detail::point_json;
  using detail::rational_json;
  json doc;
  doc["space"] = {{"dimension", cfg.space.dimension}, {"backend", std::string(backend_name(cfg.space.backend))}};

  json m;
  if (cfg.modular.expression) {
    m["expression"] = *cfg.modular.expression;
  } else {
    const auto& spec = *cfg.modular.builtin;
    m["family"] = std::string(family_name(spec.family));
    m["p"] = rational_json(spec.exponent);
    if (!spec.weights.empty()) m["weights"] = point_json(spec.weights);
  }
  m["convex"] = cfg.modular.convex;
  doc["modular"] = std::move(m);

  json map;
  switch (cfg.map.kind) {
    case MapConfig::Kind::affine:
      map["affine"] = {{"slope", rational_json(cfg.map.slope)}, {"offset", point_json(cfg.map.offset)}};
      break;
    case MapConfig::Kind::piecewise: {
      json branches = json::array();
      for (const auto& br : cfg.map.branches)
        branches.push_back({{"guard", br.guard.value_or("else")}, {"value", point_json(br.value)}});
      map["piecewise"] = std::move(branches);
      break;
    }
    case MapConfig::Kind::expression:
      if (cfg.map.expressions.size() == 1) map["expression"] = cfg.map.expressions[0];
      else map["expressions"] = cfg.map.expressions;
      break;
  }
  doc["map"] = std::move(map);

  json g = {{"kind", std::string(graph_kind_name(cfg.graph.kind))}};
  if (cfg.graph.predicate) g[cfg.graph.kind == GraphKind::poset ? "order" : "edge"] = *cfg.graph.predicate;
  doc["graph"] = std::move(g);

  if (cfg.contraction) {
    const auto& c = *cfg.contraction;
    json vals;
    if (c.mode == ContractionMode::banach) {
      vals = {{"k", rational_json(c.values[0])}, {"a", rational_json(c.values[1])}, {"b", rational_json(c.values[2])}};
      doc["contraction"] = {{"banach", std::move(vals)}, {"undirected", c.undirected}};
    } else {
      vals = {{"k", rational_json(c.values[0])}, {"l", rational_json(c.values[1])}, {"a1", rational_json(c.values[2])},
              {"a2", rational_json(c.values[3])}, {"b", rational_json(c.values[4])}};
      doc["contraction"] = {{"kannan", std::move(vals)}, {"undirected", c.undirected}};
    }
  }

  if (cfg.solve) {
    const auto& s = *cfg.solve;
    json sj = {{"x0", point_json(s.x0)},          {"tol", rational_json(s.tol)},
               {"max_iter", s.max_iter},           {"cf_depth", s.cf_depth},
               {"bounds_depth", s.bounds_depth}};
    if (!s.witnesses.empty()) {
      json w = json::array();
      for (const auto& p : s.witnesses) w.push_back(point_json(p));
      sj["witnesses"] = std::move(w);
    }
    doc["solve"] = std::move(sj);
  }

  json sj = json::object();
  const auto& sm = cfg.samples;
  if (sm.grid) sj["grid"] = {{"lo", rational_json(sm.grid->lo)}, {"hi", rational_json(sm.grid->hi)}, {"count", sm.grid->count}};
  if (sm.random)
    sj["random"] = {{"lo", rational_json(sm.random->lo)}, {"hi", rational_json(sm.random->hi)},
                    {"count", sm.random->count},           {"seed", sm.random->seed},
                    {"resolution", sm.random->resolution}};
  if (!sm.points.empty()) {
    json a = json::array();
    for (const auto& p : sm.points) a.push_back(point_json(p));
    sj["points"] = std::move(a);
  }
  if (!sm.pairs.empty()) {
    json a = json::array();
    for (const auto& [x, y] : sm.pairs) a.push_back(json::array({point_json(x), point_json(y)}));
    sj["pairs"] = std::move(a);
  }
  if (!sm.coeffs.empty()) {
    json a = json::array();
    for (const auto& [ca, cb] : sm.coeffs) a.push_back(json::array({rational_json(ca), rational_json(cb)}));
    sj["coeffs"] = std::move(a);
  }
  doc["samples"] = std::move(sj);
  return doc;
}

}  // namespace modfix
