#pragma once

// Sampling of uniform point sets, the random geometric graph G(X; r) on the
// torus, and connected components.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rgglab/geometry.hpp"
#include "rgglab/random.hpp"

namespace rgglab {

/// n i.i.d. uniform points on the torus. Bit-identical for identical (n, seed).
inline PointSet sample_points(std::size_t n, RandomSeed seed) {
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  Xoshiro256 rng(seed);
  std::vector<TorusPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    pts.emplace_back(x, y);
  }
  return PointSet(std::move(pts));
}

/// Undirected graph with ascending adjacency lists in compressed form.
class GeometricGraph {
 public:
  GeometricGraph(double radius, std::vector<std::size_t> offsets, std::vector<VertexId> targets)
      : radius_(radius), offsets_(std::move(offsets)), targets_(std::move(targets)) {}

  [[nodiscard]] double radius() const noexcept { return radius_; }
  [[nodiscard]] std::size_t size() const noexcept { return offsets_.size() - 1; }
  [[nodiscard]] std::size_t num_edges() const noexcept { return targets_.size() / 2; }
  [[nodiscard]] std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  [[nodiscard]] std::span<const VertexId> neighbors(std::size_t i) const noexcept {
    return std::span<const VertexId>(targets_).subspan(offsets_[i], degree(i));
  }

  friend bool operator==(const GeometricGraph&, const GeometricGraph&) = default;

 private:
  double radius_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> targets_;
};

namespace detail {

inline void check_radius(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be non-negative");
}

// Grid used for G(X; r): cell target r, at most 1024 cells per axis.
inline CellGrid radius_grid(const PointSet& ps, double r) {
  return build_grid(ps, std::clamp(r, 1.0 / 1024.0, 1.0), 1024);
}

}  // namespace detail

/// G(X; r): an edge between every pair at torus distance <= r.
inline GeometricGraph build_rgg(const PointSet& ps, double r) {
  detail::check_radius(r);
  const CellGrid grid = detail::radius_grid(ps, r);
  std::vector<std::size_t> offsets;
  offsets.reserve(ps.size() + 1);
  offsets.push_back(0);
  std::vector<VertexId> targets;
  targets.reserve(ps.size() * 8);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::size_t begin = targets.size();
    grid.for_each_within(ps, ps[i], r, [&](VertexId j, double) {
      if (j != i) targets.push_back(j);
    });
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(begin), targets.end());
    offsets.push_back(targets.size());
  }
  return GeometricGraph(r, std::move(offsets), std::move(targets));
}

/// All-pairs construction of G(X; r). O(n^2); reference for build_rgg.
inline GeometricGraph build_rgg_bruteforce(const PointSet& ps, double r) {
  detail::check_radius(r);
  std::vector<std::size_t> offsets{0};
  std::vector<VertexId> targets;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (j != i && torus_distance(ps[i], ps[j]) <= r) targets.push_back(static_cast<VertexId>(j));
    }
    offsets.push_back(targets.size());
  }
  return GeometricGraph(r, std::move(offsets), std::move(targets));
}

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<VertexId>(i);
  }

  VertexId find(VertexId v) noexcept {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  /// Returns true when a and b were in different sets.
  bool unite(VertexId a, VertexId b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    return true;
  }

  [[nodiscard]] std::size_t num_sets() const noexcept { return sets_; }

 private:
  std::vector<VertexId> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_;
};

/// Component label per vertex. Labels are 0..k-1 in order of each
/// component's smallest vertex index.
struct ComponentLabeling {
  std::vector<std::size_t> label;
  std::vector<std::size_t> sizes;

  [[nodiscard]] std::size_t num_components() const noexcept { return sizes.size(); }

  /// Vertex ids grouped by label, ascending within each group.
  [[nodiscard]] std::vector<std::vector<VertexId>> members() const {
    std::vector<std::vector<VertexId>> out(sizes.size());
    for (std::size_t c = 0; c < sizes.size(); ++c) out[c].reserve(sizes[c]);
    for (std::size_t v = 0; v < label.size(); ++v) out[label[v]].push_back(static_cast<VertexId>(v));
    return out;
  }

  friend bool operator==(const ComponentLabeling&, const ComponentLabeling&) = default;
};

inline ComponentLabeling canonical_labels(UnionFind& uf, std::size_t n) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> root_label(n, kUnset);
  ComponentLabeling out;
  out.label.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const VertexId root = uf.find(static_cast<VertexId>(v));
    if (root_label[root] == kUnset) {
      root_label[root] = out.sizes.size();
      out.sizes.push_back(0);
    }
    out.label[v] = root_label[root];
    ++out.sizes[root_label[root]];
  }
  return out;
}

inline ComponentLabeling components(const GeometricGraph& g) {
  UnionFind uf(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (VertexId j : g.neighbors(i))
      if (j > i) uf.unite(static_cast<VertexId>(i), j);
  return canonical_labels(uf, g.size());
}

/// K_1 without materializing the graph: vertices with no other vertex within r.
inline std::size_t count_isolated(const PointSet& ps, double r) {
  detail::check_radius(r);
  const CellGrid grid = detail::radius_grid(ps, r);
  std::size_t isolated = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool has_neighbor = false;
    grid.for_each_within(ps, ps[i], r, [&](VertexId j, double) { has_neighbor |= (j != i); });
    isolated += has_neighbor ? 0 : 1;
  }
  return isolated;
}

}  // namespace rgglab
