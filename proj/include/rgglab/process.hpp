#pragma once

// The graph process r -> G(X; r) for a fixed point set: the radius r_i at
// which the last isolated vertex disappears, the radius r_c at which the
// graph becomes connected, and the count Z of close isolated pairs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "rgglab/geometry.hpp"
#include "rgglab/rgg.hpp"

namespace rgglab {

struct VertexPair {
  VertexId a = 0;  // a < b
  VertexId b = 0;
  friend constexpr bool operator==(VertexPair, VertexPair) = default;
};

struct NearestNeighborRadii {
  std::vector<double> nn_distance;
  double r_i = 0.0;
  VertexId r_i_vertex = 0;
};

/// Distance from every vertex to its nearest other vertex, by expanding ring
/// search on a grid with about one point per cell. r_i is their maximum.
inline NearestNeighborRadii nearest_neighbor_radii(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("nearest neighbours need n >= 2");
  const CellGrid grid = build_grid(ps, std::min(1.0, 1.0 / std::sqrt(static_cast<double>(n))), 1024);
  const std::size_t m = grid.cells_per_axis();
  const double side = grid.cell_side();

  NearestNeighborRadii out;
  out.nn_distance.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hx = grid.axis_cell(ps[i].x());
    const std::size_t hy = grid.axis_cell(ps[i].y());
    double best_sq = std::numeric_limits<double>::infinity();
    const auto scan = [&](std::size_t cx, std::size_t cy) {
      for (VertexId j : grid.bucket(cx, cy)) {
        if (j == i) continue;
        best_sq = std::min(best_sq, torus_distance_sq(ps[i], ps[j]));
      }
    };
    for (std::size_t k = 0;; ++k) {
      if (2 * k + 1 >= m) {
        grid.for_each_cell_near(hx, hy, m, scan);
        break;
      }
      const auto at = [&](std::ptrdiff_t ox, std::ptrdiff_t oy) {
        const auto mi = static_cast<std::ptrdiff_t>(m);
        scan(static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(hx) + ox) % mi + mi) % mi),
             static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(hy) + oy) % mi + mi) % mi));
      };
      const auto kk = static_cast<std::ptrdiff_t>(k);
      for (std::ptrdiff_t oy = -kk; oy <= kk; ++oy) {
        if (oy == -kk || oy == kk) {
          for (std::ptrdiff_t ox = -kk; ox <= kk; ++ox) at(ox, oy);
        } else {
          at(-kk, oy);
          at(kk, oy);
        }
      }
      // Cells beyond ring k are at least k * side away.
      const double cleared = static_cast<double>(k) * side;
      if (best_sq <= cleared * cleared) break;
    }
    out.nn_distance[i] = std::sqrt(best_sq);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.nn_distance[i] > out.r_i) {
      out.r_i = out.nn_distance[i];
      out.r_i_vertex = static_cast<VertexId>(i);
    }
  }
  return out;
}

struct BottleneckEdge {
  double r_c = 0.0;
  VertexPair edge;
};

/// Longest edge of the minimum spanning tree under the torus metric, via
/// Kruskal on the pairs within R, with R doubling from twice the
/// connectivity scale until the candidates span. Equal weights are ordered
/// by vertex pair.
inline BottleneckEdge bottleneck_radius(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("bottleneck radius needs n >= 2");
  const double nd = static_cast<double>(n);
  double reach = 2.0 * std::sqrt(std::log(nd) / (std::numbers::pi * nd));

  struct Candidate {
    double w;
    VertexId a;
    VertexId b;
  };
  std::vector<Candidate> cand;
  for (;;) {
    const bool everything = reach >= kHalfDiagonal;
    const double query = everything ? 1.0 : reach;
    const CellGrid grid = build_grid(ps, std::clamp(query, 1.0 / 1024.0, 1.0), 1024);
    cand.clear();
    for (std::size_t i = 0; i < n; ++i) {
      grid.for_each_within(ps, ps[i], query, [&](VertexId j, double) {
        if (j > i) cand.push_back({torus_distance(ps[i], ps[j]), static_cast<VertexId>(i), j});
      });
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(x.w, x.a, x.b) < std::tie(y.w, y.a, y.b);
    });
    UnionFind uf(n);
    for (const Candidate& c : cand) {
      if (uf.unite(c.a, c.b) && uf.num_sets() == 1) return BottleneckEdge{c.w, VertexPair{c.a, c.b}};
    }
    if (everything) throw std::logic_error("complete candidate set failed to span");
    reach *= 2.0;
  }
}

struct HittingRadii {
  double r_i = 0.0;
  double r_c = 0.0;
  VertexId r_i_vertex = 0;
  VertexPair r_c_edge;
  bool equal = false;
};

inline HittingRadii hitting_radii(const PointSet& ps) {
  const NearestNeighborRadii nn = nearest_neighbor_radii(ps);
  const BottleneckEdge mst = bottleneck_radius(ps);
  HittingRadii h{nn.r_i, mst.r_c, nn.r_i_vertex, mst.edge, false};
  const bool incident = h.r_c_edge.a == h.r_i_vertex || h.r_c_edge.b == h.r_i_vertex;
  h.equal = (incident && h.r_c == h.r_i) || std::fabs(h.r_c - h.r_i) <= 1e-12 * h.r_c;
  return h;
}

/// Radii r_lower < r_upper around the threshold: sqrt((log n -/+ kappa)/(pi n)).
struct IsolatedPairConfig {
  double kappa = 2.0;
  double r_lower = 0.0;
  double r_upper = 0.0;

  static IsolatedPairConfig make(std::size_t n, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    const double nd = static_cast<double>(n);
    const double log_n = n >= 1 ? std::log(nd) : 0.0;
    if (!(log_n > kappa)) throw std::domain_error("r_lower undefined: need log n > kappa");
    return IsolatedPairConfig{kappa, std::sqrt((log_n - kappa) / (std::numbers::pi * nd)),
                              std::sqrt((log_n + kappa) / (std::numbers::pi * nd))};
  }
};

/// Z: unordered pairs of vertices isolated in G(X; r_lower) that lie within
/// r_upper of each other.
inline std::size_t count_close_isolated_pairs(const PointSet& ps, const IsolatedPairConfig& cfg) {
  const CellGrid grid = detail::radius_grid(ps, cfg.r_lower);
  std::vector<TorusPoint> isolated;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool alone = true;
    grid.for_each_within(ps, ps[i], cfg.r_lower, [&](VertexId j, double) { alone &= (j == i); });
    if (alone) isolated.push_back(ps[i]);
  }
  if (isolated.size() < 2) return 0;
  const PointSet iso(std::move(isolated));
  const CellGrid near = detail::radius_grid(iso, cfg.r_upper);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < iso.size(); ++i) {
    near.for_each_within(iso, iso[i], cfg.r_upper, [&](VertexId j, double) { pairs += (j > i) ? 1 : 0; });
  }
  return pairs;
}

}  // namespace rgglab
