#pragma once

// Component census of G(X; r): per-component geometry, the embeddable and
// solitary classifications, and the counters K_1, K_l, K'_{eps,l}, K~_l
// together with the four-way split of the leftover components.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rgglab/geometry.hpp"
#include "rgglab/rgg.hpp"

namespace rgglab {

struct CensusConfig {
  double epsilon = 0.4;
  std::size_t ell_max = 3;
  double alpha_cell = 0.2;           // solitary-test cell side, in units of r
  double type_split_divisor = 37.0;  // small/dense clique boundary is log(n) / divisor

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    if (ell_max < 2) throw std::invalid_argument("ell_max must be at least 2");
    if (!(alpha_cell > 0.0 && alpha_cell < 1.0)) throw std::invalid_argument("alpha_cell must lie in (0, 1)");
    if (!(type_split_divisor > 0.0)) throw std::invalid_argument("type split divisor must be positive");
  }
};

struct ComponentSummary {
  std::vector<VertexId> vertex_ids;
  std::size_t size = 0;
  double diameter = 0.0;
  bool diameter_approximate = false;
  double x_extent = 0.0;
  double y_extent = 0.0;
  double x_gap = 1.0;
  double y_gap = 1.0;
  bool embeddable = true;
  bool solitary = false;
  VertexId leftmost_vertex = 0;
  double rho_from_leftmost = 0.0;
};

/// Components above this size get an extent-based diameter.
inline constexpr std::size_t kExactDiameterLimit = 10000;

namespace detail {

inline double diameter_sq_all_pairs(const PointSet& ps, std::span<const VertexId> members) {
  double best = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      best = std::max(best, torus_distance_sq(ps[members[a]], ps[members[b]]));
  return best;
}

/// Exact squared torus diameter. Members are bucketed on a coarse grid; a
/// cell pair is scanned only if its distance upper bound beats the best pair
/// found so far, seeded by a few farthest-point sweeps.
inline double diameter_sq(const PointSet& ps, std::span<const VertexId> members) {
  const std::size_t s = members.size();
  if (s <= 64) return diameter_sq_all_pairs(ps, members);

  double best = 0.0;
  std::size_t from = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    std::size_t far = from;
    double far_sq = -1.0;
    for (std::size_t k = 0; k < s; ++k) {
      const double d = torus_distance_sq(ps[members[from]], ps[members[k]]);
      if (d > far_sq) {
        far_sq = d;
        far = k;
      }
    }
    best = std::max(best, far_sq);
    from = far;
  }

  const std::size_t g = std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(static_cast<double>(s) / 8.0)), 2, 64);
  const double h = 1.0 / static_cast<double>(g);
  std::vector<std::vector<VertexId>> cells(g * g);
  for (VertexId v : members) {
    const auto cx = std::min(g - 1, static_cast<std::size_t>(ps[v].x() * static_cast<double>(g)));
    const auto cy = std::min(g - 1, static_cast<std::size_t>(ps[v].y() * static_cast<double>(g)));
    cells[cx * g + cy].push_back(v);
  }
  std::vector<std::size_t> occupied;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (!cells[c].empty()) occupied.push_back(c);

  // circular distance between cell centres, plus one cell side, capped at 1/2
  const auto axis_bound = [&](std::size_t a, std::size_t b) {
    const std::size_t d = a > b ? a - b : b - a;
    const std::size_t circ = std::min(d, g - d);
    return std::min(0.5, (static_cast<double>(circ) + 1.0) * h);
  };
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    const std::size_t ca = occupied[i];
    for (std::size_t j = i; j < occupied.size(); ++j) {
      const std::size_t cb = occupied[j];
      const double ux = axis_bound(ca / g, cb / g), uy = axis_bound(ca % g, cb % g);
      if (ux * ux + uy * uy <= best) continue;
      const auto& A = cells[ca];
      const auto& B = cells[cb];
      for (std::size_t a = 0; a < A.size(); ++a)
        for (std::size_t b = (ca == cb ? a + 1 : 0); b < B.size(); ++b)
          best = std::max(best, torus_distance_sq(ps[A[a]], ps[B[b]]));
    }
  }
  return best;
}

}  // namespace detail

/// Geometry of one component. The solitary flag is left false.
inline ComponentSummary summarize_component(const PointSet& ps, std::span<const VertexId> members, double r) {
  if (members.empty()) throw std::invalid_argument("component has no members");
  ComponentSummary s;
  s.vertex_ids.assign(members.begin(), members.end());
  s.size = members.size();
  if (s.size == 1) {
    s.leftmost_vertex = members.front();
    s.embeddable = 1.0 >= 2.0 * r;
    return s;
  }

  std::vector<double> xs(s.size), ys(s.size);
  for (std::size_t k = 0; k < s.size; ++k) {
    xs[k] = ps[members[k]].x();
    ys[k] = ps[members[k]].y();
  }
  const CircularExtent ex = circular_extent(xs);
  const CircularExtent ey = circular_extent(ys);
  s.x_extent = ex.extent;
  s.x_gap = ex.max_gap;
  s.y_extent = ey.extent;
  s.y_gap = ey.max_gap;
  s.embeddable = s.x_gap >= 2.0 * r && s.y_gap >= 2.0 * r;

  // Several members may share the anchor's x coordinate; the lowest one wins.
  const double anchor_x = xs[ex.anchor_index];
  std::size_t best = ex.anchor_index;
  for (std::size_t k = 0; k < s.size; ++k) {
    if (xs[k] == anchor_x && (ys[k] < ys[best] || (ys[k] == ys[best] && members[k] < members[best]))) best = k;
  }
  s.leftmost_vertex = members[best];

  const TorusPoint& left = ps[s.leftmost_vertex];
  for (VertexId v : members) s.rho_from_leftmost = std::max(s.rho_from_leftmost, torus_distance(left, ps[v]));

  if (s.size <= kExactDiameterLimit) {
    s.diameter = std::sqrt(detail::diameter_sq(ps, members));
  } else {
    s.diameter = std::hypot(std::min(s.x_extent, 0.5), std::min(s.y_extent, 0.5));
    s.diameter_approximate = true;
  }
  return s;
}

namespace detail {

// Union-find over grid cells that also records each cell's integer
// displacement from its root, so a cycle that wraps the torus is seen as two
// different displacements between the same pair of cells.
class DisplacementUnionFind {
 public:
  struct Offset {
    std::int64_t dx = 0;
    std::int64_t dy = 0;
    friend bool operator==(Offset, Offset) = default;
  };

  explicit DisplacementUnionFind(std::size_t n) : parent_(n), offset_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }

  std::pair<std::uint32_t, Offset> find(std::uint32_t v) {
    std::uint32_t root = v;
    Offset total;
    while (parent_[root] != root) {
      total.dx += offset_[root].dx;
      total.dy += offset_[root].dy;
      root = parent_[root];
    }
    Offset remaining = total;
    for (std::uint32_t u = v; parent_[u] != u;) {
      const std::uint32_t next = parent_[u];
      const Offset own = offset_[u];
      parent_[u] = root;
      offset_[u] = remaining;
      remaining.dx -= own.dx;
      remaining.dy -= own.dy;
      u = next;
    }
    return {root, total};
  }

  /// Records that b sits at displacement `step` from a. Returns false when
  /// a and b were already joined through a different displacement.
  bool join(std::uint32_t a, std::uint32_t b, Offset step) {
    auto [ra, oa] = find(a);
    auto [rb, ob] = find(b);
    if (ra == rb) return Offset{ob.dx - oa.dx, ob.dy - oa.dy} == step;
    // pos(rb) - pos(ra) = oa + step - ob
    Offset rel{oa.dx + step.dx - ob.dx, oa.dy + step.dy - ob.dy};
    if (size_[ra] < size_[rb]) {
      std::swap(ra, rb);
      rel = Offset{-rel.dx, -rel.dy};
    }
    parent_[rb] = ra;
    offset_[rb] = rel;
    size_[ra] += size_[rb];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<Offset> offset_;
  std::vector<std::uint32_t> size_;
};

}  // namespace detail

/// Cells per axis above which the solitary test coarsens its tessellation.
inline constexpr std::size_t kMaxSolitaryCellsPerAxis = 4096;

/// Conservative solitary test for a non-embeddable component. The torus is
/// cut into cells of side at most alpha*r; a cell is free when its center is
/// farther than r + half its diagonal from every member. The component is
/// solitary iff the free cells (4-neighbourhood, toroidal) contain no cycle
/// that wraps around the torus.
inline bool is_solitary(const PointSet& ps, const ComponentSummary& summary, double r, double alpha_cell) {
  if (!(alpha_cell > 0.0 && alpha_cell < 1.0)) throw std::invalid_argument("alpha_cell must lie in (0, 1)");
  if (summary.embeddable || !(r > 0.0)) return false;

  const double cells = std::ceil(1.0 / (alpha_cell * r));
  const std::size_t m = cells >= static_cast<double>(kMaxSolitaryCellsPerAxis)
                            ? kMaxSolitaryCellsPerAxis
                            : static_cast<std::size_t>(cells);
  const double side = 1.0 / static_cast<double>(m);
  const double block = r + side * kHalfDiagonal;
  const double block_sq = block * block;
  const auto reach = static_cast<std::int64_t>(std::ceil(block / side)) + 1;
  const auto mi = static_cast<std::int64_t>(m);

  std::vector<std::uint8_t> blocked(m * m, 0);
  for (VertexId v : summary.vertex_ids) {
    const TorusPoint& p = ps[v];
    const auto hx = static_cast<std::int64_t>(std::min<double>(p.x() * static_cast<double>(m), static_cast<double>(m - 1)));
    const auto hy = static_cast<std::int64_t>(std::min<double>(p.y() * static_cast<double>(m), static_cast<double>(m - 1)));
    const std::int64_t span_cells = std::min<std::int64_t>(reach, mi);
    for (std::int64_t oy = -span_cells; oy <= span_cells; ++oy) {
      const std::int64_t cy = ((hy + oy) % mi + mi) % mi;
      const double dy = axis_offset((static_cast<double>(cy) + 0.5) * side, p.y());
      if (dy > block) continue;
      for (std::int64_t ox = -span_cells; ox <= span_cells; ++ox) {
        const std::int64_t cx = ((hx + ox) % mi + mi) % mi;
        const double dx = axis_offset((static_cast<double>(cx) + 0.5) * side, p.x());
        if (dx * dx + dy * dy <= block_sq) blocked[static_cast<std::size_t>(cy * mi + cx)] = 1;
      }
    }
  }

  detail::DisplacementUnionFind uf(m * m);
  for (std::size_t cy = 0; cy < m; ++cy) {
    for (std::size_t cx = 0; cx < m; ++cx) {
      const std::size_t c = cy * m + cx;
      if (blocked[c]) continue;
      const std::size_t right = cy * m + (cx + 1) % m;
      const std::size_t up = ((cy + 1) % m) * m + cx;
      if (!blocked[right] && !uf.join(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(right), {1, 0}))
        return false;
      if (!blocked[up] && !uf.join(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(up), {0, 1}))
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Leftover-component types

enum class ComponentType : std::uint8_t {
  kUnassigned = 0,   // size <= l and diameter <= eps*r, or solitary
  kSmallClique = 1,  // diameter <= eps*r, l+1 <= size <= log(n)/37
  kDenseClique = 2,  // diameter <= eps*r, size > log(n)/37
  kWideEmbeddable = 3,
  kWrapping = 4,     // not embeddable, not solitary
};

struct TypeCounts {
  std::array<std::size_t, 4> m{};  // M_1..M_4

  [[nodiscard]] std::size_t total() const noexcept { return m[0] + m[1] + m[2] + m[3]; }
  friend bool operator==(const TypeCounts&, const TypeCounts&) = default;
};

inline ComponentType component_type(const ComponentSummary& s, double r, const CensusConfig& cfg, std::size_t ell,
                                    std::size_t n) {
  if (s.solitary) return ComponentType::kUnassigned;
  const bool narrow = s.diameter <= cfg.epsilon * r;
  if (narrow && s.size <= ell) return ComponentType::kUnassigned;
  if (narrow) {
    const double split = std::log(static_cast<double>(n)) / cfg.type_split_divisor;
    return static_cast<double>(s.size) <= split ? ComponentType::kSmallClique : ComponentType::kDenseClique;
  }
  return s.embeddable ? ComponentType::kWideEmbeddable : ComponentType::kWrapping;
}

/// M_1..M_4 for one graph. `n` is the vertex count, which sets the size
/// boundary between the two clique types.
inline TypeCounts classify_types(std::span<const ComponentSummary> summaries, double r, const CensusConfig& cfg,
                                 std::size_t ell, std::size_t n) {
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  TypeCounts out;
  for (const auto& s : summaries) {
    const auto t = component_type(s, r, cfg, ell, n);
    if (t != ComponentType::kUnassigned) ++out.m[static_cast<std::size_t>(t) - 1];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Census

struct ComponentCensus {
  std::size_t n = 0;
  std::size_t ell_max = 0;
  std::size_t num_components = 0;
  std::vector<std::size_t> k_exact;   // [l] for 1 <= l <= ell_max; index 0 unused
  std::size_t k_exact_overflow = 0;   // components larger than ell_max
  std::vector<std::size_t> k_prime;   // [l] = K'_{eps,l}
  std::vector<std::size_t> k_tilde;   // [l] = K~_l
  std::vector<TypeCounts> type_counts;  // [l] for 2 <= l <= ell_max
  bool has_solitary = false;

  [[nodiscard]] std::size_t k1() const noexcept { return k_exact[1]; }

  /// K'_{eps,l} <= K_l <= K~_l for every l, and sizes add up to n.
  [[nodiscard]] bool counters_consistent() const noexcept {
    for (std::size_t l = 1; l <= ell_max; ++l) {
      if (k_prime[l] > k_exact[l] || k_exact[l] > k_tilde[l]) return false;
      if (l > 1 && k_tilde[l] > k_tilde[l - 1]) return false;
    }
    return true;
  }

  friend bool operator==(const ComponentCensus&, const ComponentCensus&) = default;
};

/// Whether a summarized component is counted by K'_{eps,l} for l = its size.
inline bool counts_as_clustered(const ComponentSummary& s, double r, double epsilon) {
  return s.embeddable && s.rho_from_leftmost <= epsilon * r;
}

/// All component summaries of G(X; r), with solitary flags filled in.
inline std::vector<ComponentSummary> summarize_all(const PointSet& ps, double r, const CensusConfig& cfg) {
  const ComponentLabeling lab = components(build_rgg(ps, r));
  const auto groups = lab.members();
  std::vector<ComponentSummary> out;
  out.reserve(groups.size());
  std::size_t solitary = 0;
  for (const auto& g : groups) {
    out.push_back(summarize_component(ps, g, r));
    auto& s = out.back();
    if (!s.embeddable && is_solitary(ps, s, r, cfg.alpha_cell)) {
      s.solitary = true;
      ++solitary;
    }
  }
  if (solitary > 1) throw std::logic_error("more than one solitary component");
  return out;
}

inline ComponentCensus census_of(std::span<const ComponentSummary> summaries, std::size_t n, double r,
                                 const CensusConfig& cfg) {
  ComponentCensus c;
  c.n = n;
  c.ell_max = cfg.ell_max;
  c.num_components = summaries.size();
  c.k_exact.assign(cfg.ell_max + 1, 0);
  c.k_prime.assign(cfg.ell_max + 1, 0);
  c.k_tilde.assign(cfg.ell_max + 1, 0);
  for (const auto& s : summaries) {
    c.has_solitary |= s.solitary;
    if (s.size <= cfg.ell_max) {
      ++c.k_exact[s.size];
      if (counts_as_clustered(s, r, cfg.epsilon)) ++c.k_prime[s.size];
    } else {
      ++c.k_exact_overflow;
    }
    if (!s.solitary) {
      const std::size_t top = std::min(s.size, cfg.ell_max);
      for (std::size_t l = 1; l <= top; ++l) ++c.k_tilde[l];
    }
  }
  c.type_counts.assign(cfg.ell_max + 1, TypeCounts{});
  for (std::size_t l = 2; l <= cfg.ell_max; ++l) c.type_counts[l] = classify_types(summaries, r, cfg, l, n);
  return c;
}

inline ComponentCensus census(const PointSet& ps, double r, const CensusConfig& cfg) {
  cfg.validate();
  const auto summaries = summarize_all(ps, r, cfg);
  return census_of(summaries, ps.size(), r, cfg);
}

}  // namespace rgglab
