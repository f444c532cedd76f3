#pragma once

// Graphs on the whole space X = R^d. The vertex set is implicit; only the
// edge relation is represented, as a predicate. Loops are forced by the
// graph itself, never delegated to the predicate, and a predicate cannot
// express parallel edges.
//
// Global properties (weak connectivity, Condition (star), Property (*)) are
// decided relative to finite witness sets or orbits. Results are evidence,
// not proof.

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/point.hpp"

namespace modfix {

enum class GraphKind { complete, poset, custom };

inline std::string_view graph_kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::complete: return "complete";
    case GraphKind::poset: return "poset";
    case GraphKind::custom: return "custom";
  }
  return "?";
}

template <Scalar T>
class SpaceGraph {
 public:
  using Predicate = std::function<bool(const Point<T>&, const Point<T>&)>;

  GraphKind kind() const noexcept { return kind_; }

  /// (x, y) in E(G). Always true on loops.
  bool has_edge(const Point<T>& x, const Point<T>& y) const {
    if (x == y) return true;
    return edge_ ? edge_(x, y) : true;
  }

  /// (x, y) in E(G~), the symmetrized relation.
  bool has_undirected_edge(const Point<T>& x, const Point<T>& y) const {
    return has_edge(x, y) || has_edge(y, x);
  }

  static SpaceGraph complete() { return SpaceGraph(GraphKind::complete, nullptr); }
  static SpaceGraph poset(Predicate order) { return SpaceGraph(GraphKind::poset, std::move(order)); }
  static SpaceGraph custom(Predicate edge) { return SpaceGraph(GraphKind::custom, std::move(edge)); }

 private:
  SpaceGraph(GraphKind kind, Predicate edge) : kind_(kind), edge_(std::move(edge)) {}

  GraphKind kind_;
  Predicate edge_;  // empty for the complete graph
};

template <Scalar T>
SpaceGraph<T> make_complete() {
  return SpaceGraph<T>::complete();
}

template <Scalar T>
SpaceGraph<T> make_poset(typename SpaceGraph<T>::Predicate order) {
  return SpaceGraph<T>::poset(std::move(order));
}

template <Scalar T>
SpaceGraph<T> make_custom(typename SpaceGraph<T>::Predicate edge) {
  return SpaceGraph<T>::custom(std::move(edge));
}

/// Componentwise x <= y.
template <Scalar T>
bool coordinatewise_leq(const Point<T>& x, const Point<T>& y) {
  if (x.dimension() != y.dimension()) throw DimensionError("dimension mismatch in order predicate");
  for (std::size_t i = 0; i < x.dimension(); ++i)
    if (x[i] > y[i]) return false;
  return true;
}

/// The poset graph of the componentwise order.
template <Scalar T>
SpaceGraph<T> make_coordinatewise_poset() {
  return SpaceGraph<T>::poset(&coordinatewise_leq<T>);
}

/// Graph whose only edges are the loops.
template <Scalar T>
SpaceGraph<T> make_loops_only() {
  return SpaceGraph<T>::custom([](const Point<T>&, const Point<T>&) { return false; });
}

template <Scalar T>
bool has_edge(const SpaceGraph<T>& g, const Point<T>& x, const Point<T>& y) {
  return g.has_edge(x, y);
}

template <Scalar T>
bool has_undirected_edge(const SpaceGraph<T>& g, const Point<T>& x, const Point<T>& y) {
  return g.has_undirected_edge(x, y);
}

/// Finite stand-in for X when deciding global graph properties.
template <Scalar T>
class WitnessSet {
 public:
  explicit WitnessSet(std::vector<Point<T>> points) : points_(std::move(points)) {
    if (points_.empty()) throw PreconditionError("witness set must be nonempty");
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (same(points_[i], points_[j]))
          throw PreconditionError("witness set points must be distinct: " + to_string(points_[i]));
  }

  std::size_t size() const noexcept { return points_.size(); }
  const Point<T>& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point<T>>& points() const noexcept { return points_; }

  std::optional<std::size_t> index_of(const Point<T>& p) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] == p) return i;
    return std::nullopt;
  }

  /// Copy of this set with `p` appended unless it is already present.
  WitnessSet with(const Point<T>& p) const {
    if (index_of(p)) return *this;
    auto pts = points_;
    pts.push_back(p);
    return WitnessSet(std::move(pts));
  }

 private:
  static bool same(const Point<T>& a, const Point<T>& b) {
    if constexpr (is_exact_v<T>) {
      return a == b;
    } else {
      return max_coordinate_gap(a, b) <= 1e-12;
    }
  }

  std::vector<Point<T>> points_;
};

/// A walk (x_0, ..., x_N), N >= 0, whose consecutive vertices are joined in G~.
template <Scalar T>
class Path {
 public:
  Path(const SpaceGraph<T>& g, std::vector<Point<T>> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw PreconditionError("path needs at least one vertex");
    for (std::size_t s = 1; s < vertices_.size(); ++s)
      if (!g.has_undirected_edge(vertices_[s - 1], vertices_[s]))
        throw PreconditionError("path vertices " + std::to_string(s - 1) + " and " + std::to_string(s) +
                                " are not joined in the undirected graph");
  }

  /// Number of edges N.
  std::size_t length() const noexcept { return vertices_.size() - 1; }
  const std::vector<Point<T>>& vertices() const noexcept { return vertices_; }
  const Point<T>& front() const { return vertices_.front(); }
  const Point<T>& back() const { return vertices_.back(); }

 private:
  std::vector<Point<T>> vertices_;
};

/// Breadth-first search over W (x and y appended when absent) under the
/// undirected edge relation. Neighbours are scanned in witness order, so the
/// first shortest path found is returned.
template <Scalar T>
std::optional<Path<T>> find_undirected_path(const SpaceGraph<T>& g, const WitnessSet<T>& witnesses,
                                            const Point<T>& x, const Point<T>& y) {
  const WitnessSet<T> w = witnesses.with(x).with(y);
  const std::size_t source = *w.index_of(x);
  const std::size_t target = *w.index_of(y);
  if (source == target) return Path<T>(g, {x});

  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(w.size(), none);
  std::vector<bool> seen(w.size(), false);
  std::deque<std::size_t> queue{source};
  seen[source] = true;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < w.size(); ++v) {
      if (seen[v] || !g.has_undirected_edge(w[u], w[v])) continue;
      seen[v] = true;
      parent[v] = u;
      if (v == target) {
        std::vector<Point<T>> rev;
        for (std::size_t at = target; at != none; at = parent[at]) rev.push_back(w[at]);
        return Path<T>(g, std::vector<Point<T>>(rev.rbegin(), rev.rend()));
      }
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

/// Every pair of W is joined by an undirected path inside W.
template <Scalar T>
bool is_weakly_connected_on(const SpaceGraph<T>& g, const WitnessSet<T>& w) {
  std::vector<bool> seen(w.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < w.size(); ++v) {
      if (seen[v] || !g.has_undirected_edge(w[u], w[v])) continue;
      seen[v] = true;
      ++reached;
      queue.push_back(v);
    }
  }
  return reached == w.size();
}

/// First candidate z with (x, z) and (y, z) both undirected edges.
template <Scalar T>
std::optional<Point<T>> check_star_condition(const SpaceGraph<T>& g, const Point<T>& x, const Point<T>& y,
                                             const WitnessSet<T>& candidates) {
  for (const auto& z : candidates.points())
    if (g.has_undirected_edge(x, z) && g.has_undirected_edge(y, z)) return z;
  return std::nullopt;
}

struct PropertyStarReport {
  bool orbit_chained = true;
  std::optional<std::size_t> first_unchained;  // i with (orbit[i], orbit[i+1]) not an edge
  std::vector<std::size_t> indices;            // i with (orbit[i], limit) an edge

  bool subsequence_found() const noexcept { return !indices.empty(); }

  std::string summary() const {
    if (!orbit_chained)
      return "orbit not chained at index " + std::to_string(*first_unchained);
    if (indices.empty()) return "no edge to limit found in given orbit";
    return "subsequence found (" + std::to_string(indices.size()) + " indices)";
  }
};

/// Finite evidence for Property (*): which orbit terms are joined to the
/// limit in G~. The orbit itself must be edge-chained.
template <Scalar T>
PropertyStarReport check_property_star_on_orbit(const SpaceGraph<T>& g, const std::vector<Point<T>>& orbit,
                                                const Point<T>& limit) {
  PropertyStarReport report;
  for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
    if (!g.has_undirected_edge(orbit[i], orbit[i + 1])) {
      report.orbit_chained = false;
      report.first_unchained = i;
      break;
    }
  }
  for (std::size_t i = 0; i < orbit.size(); ++i)
    if (g.has_undirected_edge(orbit[i], limit)) report.indices.push_back(i);
  return report;
}

}  // namespace modfix
