#pragma once

// Geometry of the unit torus [0,1)^2: points, the wrap-around metric,
// circular projections, a uniform cell grid for fixed-radius queries and a
// hit-or-miss estimator for the area of a union of disks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rgglab/random.hpp"

namespace rgglab {

using VertexId = std::uint32_t;

inline constexpr double kHalfDiagonal = 0.70710678118654752440;  // sqrt(2)/2

/// Reduces a real coordinate into [0, 1).
inline double wrap_unit(double v) noexcept {
  double w = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.
  return w >= 1.0 ? 0.0 : w;
}

class TorusPoint {
 public:
  constexpr TorusPoint() noexcept = default;
  TorusPoint(double x, double y) noexcept : x_(wrap_unit(x)), y_(wrap_unit(y)) {}

  [[nodiscard]] constexpr double x() const noexcept { return x_; }
  [[nodiscard]] constexpr double y() const noexcept { return y_; }

  friend constexpr bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

/// Per-axis wrap-around offset in [0, 1/2].
inline double axis_offset(double a, double b) noexcept {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

inline double torus_distance_sq(const TorusPoint& p, const TorusPoint& q) noexcept {
  const double dx = axis_offset(p.x(), q.x());
  const double dy = axis_offset(p.y(), q.y());
  return dx * dx + dy * dy;
}

inline double torus_distance(const TorusPoint& p, const TorusPoint& q) noexcept {
  return std::sqrt(torus_distance_sq(p, q));
}

/// The vertex positions X_1..X_n. Never empty.
class PointSet {
 public:
  explicit PointSet(std::vector<TorusPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("point set must contain at least one point");
  }

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const TorusPoint& operator[](std::size_t i) const noexcept { return points_[i]; }
  [[nodiscard]] std::span<const TorusPoint> points() const noexcept { return points_; }
  [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
  [[nodiscard]] auto end() const noexcept { return points_.end(); }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<TorusPoint> points_;
};

// ---------------------------------------------------------------------------
// Circular projections

struct CircularExtent {
  double extent = 0.0;       // 1 - max_gap
  double max_gap = 1.0;      // largest circular gap between consecutive values
  std::size_t anchor_index = 0;  // input index of the value just after the largest gap
};

/// Largest circular gap of a set of values on the unit circle. The anchor is
/// the canonical "leftmost" element: the first value met when walking
/// clockwise out of the largest gap. Equal gaps resolve to the smallest anchor
/// value, and equal values to the smallest input index.
inline CircularExtent circular_extent(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty projection");
  if (values.size() == 1) return CircularExtent{0.0, 1.0, 0};

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });

  const double first = values[order.front()];
  const double last = values[order.back()];
  CircularExtent best{0.0, (1.0 - last) + first, order.front()};
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double gap = values[order[k]] - values[order[k - 1]];
    if (gap > best.max_gap) {
      best.max_gap = gap;
      best.anchor_index = order[k];
    }
  }
  best.extent = 1.0 - best.max_gap;
  return best;
}

// ---------------------------------------------------------------------------
// Cell grid

/// Uniform bucketing of a point set into cells_per_axis^2 square cells,
/// stored in compressed (offset, item) form.
class CellGrid {
 public:
  [[nodiscard]] std::size_t cells_per_axis() const noexcept { return m_; }
  [[nodiscard]] double cell_side() const noexcept { return side_; }
  [[nodiscard]] std::size_t num_cells() const noexcept { return m_ * m_; }

  [[nodiscard]] std::size_t axis_cell(double coord) const noexcept {
    const auto c = static_cast<std::size_t>(coord * static_cast<double>(m_));
    return c < m_ ? c : m_ - 1;
  }

  [[nodiscard]] std::size_t cell_index(std::size_t cx, std::size_t cy) const noexcept {
    return cy * m_ + cx;
  }

  [[nodiscard]] std::size_t cell_of(const TorusPoint& p) const noexcept {
    return cell_index(axis_cell(p.x()), axis_cell(p.y()));
  }

  [[nodiscard]] std::span<const VertexId> bucket(std::size_t cell) const noexcept {
    return std::span<const VertexId>(items_).subspan(offsets_[cell], offsets_[cell + 1] - offsets_[cell]);
  }

  [[nodiscard]] std::span<const VertexId> bucket(std::size_t cx, std::size_t cy) const noexcept {
    return bucket(cell_index(cx, cy));
  }

  /// Number of cell rings around the home cell that can hold a point within
  /// `rad`: floor(rad / side) + 1.
  [[nodiscard]] std::size_t reach(double rad) const noexcept {
    const double cells = std::floor(rad * static_cast<double>(m_));
    if (cells >= static_cast<double>(m_)) return m_;
    return static_cast<std::size_t>(cells) + 1;
  }

  /// Calls f(cx, cy) for every cell within `rings` rings of (hx, hy), each
  /// cell at most once even when the rings wrap all the way around.
  template <typename F>
  void for_each_cell_near(std::size_t hx, std::size_t hy, std::size_t rings, F&& f) const {
    const auto visit_axis = [&](std::size_t home, auto&& g) {
      if (2 * rings + 1 >= m_) {
        for (std::size_t c = 0; c < m_; ++c) g(c);
      } else {
        for (std::size_t k = 0; k < 2 * rings + 1; ++k) g((home + m_ - rings + k) % m_);
      }
    };
    visit_axis(hy, [&](std::size_t cy) { visit_axis(hx, [&](std::size_t cx) { f(cx, cy); }); });
  }

  /// Calls f(j, squared_distance) for every j (including q itself, if it is
  /// a member) with torus_distance(q, X_j) <= rad.
  template <typename F>
  void for_each_within(const PointSet& ps, const TorusPoint& q, double rad, F&& f) const {
    const double rad_sq = rad * rad;
    for_each_cell_near(axis_cell(q.x()), axis_cell(q.y()), reach(rad), [&](std::size_t cx, std::size_t cy) {
      for (VertexId j : bucket(cx, cy)) {
        const double d2 = torus_distance_sq(q, ps[j]);
        if (within(d2, rad_sq, rad)) f(j, d2);
      }
    });
  }

  /// Edge rule: torus_distance <= rad, decided on the square except within a
  /// relative 1e-12 band where the rounded sqrt is compared. The open-threshold
  /// variant exists only for the mutation self-check.
  static bool within(double d2, double rad_sq, double rad) noexcept {
    if (d2 < rad_sq * (1.0 - 1e-12)) return true;
    if (d2 > rad_sq * (1.0 + 1e-12)) return false;
#ifdef RGGLAB_MUTATION_OPEN_THRESHOLD
    return std::sqrt(d2) < rad;
#else
    return std::sqrt(d2) <= rad;
#endif
  }

  friend CellGrid build_grid(const PointSet& ps, double cell_side_target, std::size_t max_cells_per_axis);

 private:
  std::size_t m_ = 1;
  double side_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> items_;
};

inline constexpr std::size_t kDefaultMaxCellsPerAxis = 4096;

/// Buckets `ps` into cells of side 1/floor(1/cell_side_target), with at most
/// `max_cells_per_axis` cells per axis. Counting sort; linear in n plus cells.
inline CellGrid build_grid(const PointSet& ps, double cell_side_target,
                           std::size_t max_cells_per_axis = kDefaultMaxCellsPerAxis) {
  if (!(cell_side_target > 0.0) || cell_side_target > 1.0)
    throw std::invalid_argument("cell side target must lie in (0, 1]");
  if (ps.size() == 0) throw std::invalid_argument("cannot grid an empty point set");
  if (max_cells_per_axis == 0) throw std::invalid_argument("grid needs at least one cell per axis");

  CellGrid g;
  const double per_axis = std::floor(1.0 / cell_side_target);
  g.m_ = per_axis >= static_cast<double>(max_cells_per_axis)
             ? max_cells_per_axis
             : std::max<std::size_t>(1, static_cast<std::size_t>(per_axis));
  g.side_ = 1.0 / static_cast<double>(g.m_);

  std::vector<std::size_t> home(ps.size());
  g.offsets_.assign(g.num_cells() + 1, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    home[i] = g.cell_of(ps[i]);
    ++g.offsets_[home[i] + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.items_.resize(ps.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t i = 0; i < ps.size(); ++i) g.items_[cursor[home[i]]++] = static_cast<VertexId>(i);
  return g;
}

/// All j != i with torus_distance(X_i, X_j) <= rad, ascending.
inline std::vector<VertexId> neighbors_within(const CellGrid& grid, const PointSet& ps, std::size_t i,
                                              double rad) {
  if (i >= ps.size()) throw std::out_of_range("vertex index out of range");
  std::vector<VertexId> out;
  grid.for_each_within(ps, ps[i], rad, [&](VertexId j, double) {
    if (j != i) out.push_back(j);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Disk-union area

struct AreaEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Hit-or-miss estimate of the area of the union of closed disks of radius
/// `rad` around `centers`, on the torus.
inline AreaEstimate disk_union_area_mc(const PointSet& centers, double rad, std::size_t samples,
                                       RandomSeed seed) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  if (rad < 0.0) throw std::invalid_argument("negative radius");
  const CellGrid grid = build_grid(centers, std::clamp(rad, 1.0 / 1024.0, 1.0), 1024);
  Xoshiro256 rng(seed);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    const TorusPoint q(x, y);
    bool hit = false;
    grid.for_each_within(centers, q, rad, [&](VertexId, double) { hit = true; });
    hits += hit ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return AreaEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace rgglab
