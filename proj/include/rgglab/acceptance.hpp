#pragma once

// The acceptance suite, shared by the rgglab_acceptance test binary and
// `rgglab verify`. Each criterion reports pass/fail, a one-line detail and
// the numbers it produced; the determinism criterion reruns criteria 2-6
// with another worker count and compares those numbers bit for bit.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rgglab/analytic.hpp"
#include "rgglab/census.hpp"
#include "rgglab/geometry.hpp"
#include "rgglab/harness.hpp"
#include "rgglab/process.hpp"
#include "rgglab/random.hpp"
#include "rgglab/report.hpp"
#include "rgglab/rgg.hpp"
#include "rgglab/stats.hpp"
#include "rgglab/testing/oracles.hpp"

namespace rgglab::acceptance {

struct Options {
  bool quick = false;     // sizes n <= 4096 and fewer trials
  std::size_t threads = 0;
  std::uint64_t seed = 20240917;
  std::ostream* progress = nullptr;
};

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  std::vector<double> emitted;
};

namespace detail {

inline RandomSeed criterion_seed(const Options& o, int id) {
  return RandomSeed{splitmix64_mix(o.seed + static_cast<std::uint64_t>(id))};
}

inline void note(const Options& o, const std::string& line) {
  if (o.progress != nullptr) *o.progress << "  .. " << line << std::endl;
}

// Runs one criterion; a run longer than `limit_seconds` fails it.
template <typename F>
Result timed(int id, std::string name, double limit_seconds, F&& body) {
  Result r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > limit_seconds) {
    r.passed = false;
    r.detail += "; exceeded the " + std::to_string(static_cast<int>(limit_seconds)) + " s limit";
  }
  return r;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Grid graph and union-find components against all-pairs oracles.

inline Result oracle_equivalence(const Options& o) {
  return detail::timed(1, "oracle equivalence (graphs)", 30.0, [&](Result& res) {
    const RandomSeed base = detail::criterion_seed(o, 1);
    std::size_t checked = 0, mismatches = 0;
    std::string first;
    for (std::size_t inst = 0; inst < 50; ++inst) {
      const std::size_t n = 50 + (250 * inst) / 49;
      const PointSet ps = sample_points(n, base.trial(inst));
      // Two radii are exact pairwise distances, so the closed threshold matters.
      const double radii[5] = {0.03, 0.08, r_of_mu(n, 1.0), torus_distance(ps[0], ps[1]),
                               torus_distance(ps[2], ps[n - 1])};
      for (double r : radii) {
        ++checked;
        const GeometricGraph fast = build_rgg(ps, r);
        const GeometricGraph slow = build_rgg_bruteforce(ps, r);
        const bool same = fast == slow && components(fast) == oracle::bfs_components(ps, r) &&
                          count_isolated(ps, r) == oracle::count_isolated(ps, r);
        if (!same) {
          ++mismatches;
          if (first.empty()) first = "instance " + std::to_string(inst) + " n=" + std::to_string(n) + " r=" + detail::fmt(r);
        }
      }
    }
    res.passed = mismatches == 0;
    res.detail = std::to_string(checked) + " (instance, radius) pairs, " + std::to_string(mismatches) + " mismatches" +
                 (first.empty() ? "" : ", first at " + first);
  });
}

// ---------------------------------------------------------------------------
// 2. Mean isolated-vertex count against n (1 - pi r^2)^(n-1).

inline Result isolated_mean(const Options& o) {
  return detail::timed(2, "isolated-vertex mean", 600.0, [&](Result& res) {
    const RandomSeed base = detail::criterion_seed(o, 2);
    const std::size_t trials = o.quick ? 2000 : 20000;
    const std::size_t ns[2] = {1000, 4096};
    const double mus[3] = {0.5, 1.0, 2.0};
    bool ok = true;
    std::string worst;
    double worst_z = 0.0;
    std::size_t config = 0;
    for (std::size_t n : ns) {
      for (double mu : mus) {
        const double r = r_of_mu(n, mu);
        const RandomSeed master = base.trial(config++);
        const auto k1 = run_trials<std::size_t>(trials, o.threads, [&](std::size_t k) {
          return count_isolated(sample_points(n, master.trial(k)), r);
        });
        const MeanEstimate m = mean_estimate(std::span<const std::size_t>(k1));
        const double expect = oracle::expected_isolated(n, r);
        const double z = std::fabs(m.mean - expect) / m.std_error;
        ok &= z <= 3.0;
        if (z >= worst_z) {
          worst_z = z;
          worst = "n=" + std::to_string(n) + " mu=" + detail::fmt(mu) + " mean=" + detail::fmt(m.mean) +
                  " exact=" + detail::fmt(expect);
        }
        res.emitted.insert(res.emitted.end(), {m.mean, m.std_error, expect});
        detail::note(o, "n=" + std::to_string(n) + " mu=" + detail::fmt(mu) + " |z|=" + detail::fmt(z));
      }
    }
    res.passed = ok;
    res.detail = std::to_string(trials) + " trials per setting, max |z| = " + detail::fmt(worst_z) + " (" + worst + ")";
  });
}

// Census campaigns feed criteria 3, 4 and 5.
struct CensusCampaigns {
  std::optional<CensusRun> poisson;
  std::optional<ScalingSweep> sweep;
  std::vector<std::string> errors;
};

// ---------------------------------------------------------------------------
// 3. Poisson law of K_1.

inline Result poisson_law(const Options& o, CensusCampaigns& data) {
  return detail::timed(3, "Poisson law of isolated vertices", 1200.0, [&](Result& res) {
    TrialPlan plan;
    plan.n = o.quick ? 4096 : 10000;
    plan.mu = 1.0;
    plan.trials = o.quick ? 2000 : 10000;
    plan.master_seed = detail::criterion_seed(o, 3);
    try {
      data.poisson = run_census_trials(plan, o.threads, 1e12);
    } catch (const std::logic_error& e) {
      data.errors.emplace_back(e.what());
      throw;
    }
    const auto k1 = data.poisson->k1_samples();
    const double tv = poisson_tv_distance(k1, 1.0);
    bool ok = tv <= 0.08;
    std::string moments;
    res.emitted.push_back(tv);
    for (std::size_t k = 1; k <= 3; ++k) {
      const MeanEstimate f = factorial_moment(k1, k);
      const double z = std::fabs(f.mean - 1.0) / f.std_error;
      ok &= z <= 3.0;
      moments += " E[K1]_" + std::to_string(k) + "=" + detail::fmt(f.mean) + " (|z|=" + detail::fmt(z) + ")";
      res.emitted.insert(res.emitted.end(), {f.mean, f.std_error});
    }
    res.passed = ok;
    res.detail = "n=" + std::to_string(plan.n) + ", " + std::to_string(plan.trials) + " trials, TV=" + detail::fmt(tv) +
                 moments;
  });
}

// ---------------------------------------------------------------------------
// 4. Theta(1/log n) band for Pr(K~_2 > 0).

inline Result scaling_band(const Options& o, CensusCampaigns& data) {
  return detail::timed(4, "Pr(K~_2 > 0) scaling band", 2700.0, [&](Result& res) {
    const std::vector<std::size_t> ns =
        o.quick ? std::vector<std::size_t>{1024, 4096} : std::vector<std::size_t>{1024, 4096, 16384, 65536};
    const std::size_t trials = o.quick ? 2000 : 5000;
    CensusConfig cfg;
    cfg.epsilon = 0.4;
    cfg.ell_max = 2;
    try {
      data.sweep = scaling_sweep(ns, 2, 1.0, trials, detail::criterion_seed(o, 4), cfg, o.threads, 1e12);
    } catch (const std::logic_error& e) {
      data.errors.emplace_back(e.what());
      throw;
    }
    const auto& rows = data.sweep->rows;
    double lo = rows[0].normalized.point, hi = lo;
    bool decreasing = true, dominated = true;
    std::string table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const ScalingRow& row = rows[i];
      lo = std::min(lo, row.normalized.point);
      hi = std::max(hi, row.normalized.point);
      if (i > 0 && !(row.p_tilde.point < rows[i - 1].p_tilde.point)) decreasing = false;
      // Pr(K~) - Pr(K') <= Pr(K'), allowing the combined 95% half-widths.
      const double excess = row.p_tilde.point - 2.0 * row.p_prime.point;
      const double slack = std::hypot(row.p_tilde.half_width(), 2.0 * row.p_prime.half_width());
      if (excess > slack) dominated = false;
      table += " n=" + std::to_string(row.n) + ":p~=" + detail::fmt(row.p_tilde.point) +
               ",p'=" + detail::fmt(row.p_prime.point) + ",norm=" + detail::fmt(row.normalized.point);
      res.emitted.insert(res.emitted.end(), {row.r, row.p_tilde.point, row.p_tilde.low, row.p_tilde.high,
                                             row.normalized.point, row.p_prime.point, row.p_prime.low,
                                             row.p_prime.high});
    }
    const bool band = lo > 0.0 && hi / lo <= 4.0;
    res.passed = band && decreasing && dominated;
    res.detail = "max/min normalized=" + (lo > 0.0 ? detail::fmt(hi / lo) : std::string("inf")) +
                 (decreasing ? "" : ", NOT decreasing") + (dominated ? "" : ", clique share too small") + ";" + table;
  });
}

// ---------------------------------------------------------------------------
// 5. K' <= K <= K~ in every trial of criteria 3 and 4.

inline Result counter_inequality(const CensusCampaigns& data) {
  return detail::timed(5, "counter inequality", 60.0, [&](Result& res) {
    std::size_t trials = 0, bad = 0;
    const auto scan = [&](const std::vector<ComponentCensus>& cs) {
      for (const auto& c : cs) {
        ++trials;
        bad += c.counters_consistent() ? 0 : 1;
      }
    };
    if (data.poisson) scan(data.poisson->trials);
    if (data.sweep)
      for (const auto& cs : data.sweep->trials) scan(cs);
    const bool complete = data.poisson.has_value() && data.sweep.has_value();
    res.passed = complete && bad == 0 && data.errors.empty();
    res.emitted = {static_cast<double>(trials), static_cast<double>(bad)};
    res.detail = std::to_string(bad) + " violations in " + std::to_string(trials) + " trials" +
                 (complete ? "" : ", census campaigns incomplete") +
                 (data.errors.empty() ? "" : ", " + data.errors.front());
  });
}

// ---------------------------------------------------------------------------
// 6. r_c = r_i with high probability; Pr(Z > 0) falls with n.

inline Result hitting_equality(const Options& o) {
  return detail::timed(6, "r_c = r_i hitting radii", 900.0, [&](Result& res) {
    const std::vector<std::size_t> ns =
        o.quick ? std::vector<std::size_t>{1024, 4096} : std::vector<std::size_t>{1024, 4096, 16384};
    const HittingSweep sw = hitting_sweep(ns, 500, 2.0, detail::criterion_seed(o, 6), o.threads, 1e12);
    const auto& rows = sw.rows;
    bool ok = rows[0].p_equal.point >= 0.8;
    std::string table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const HittingRow& row = rows[i];
      ok &= row.order_violations == 0;
      ok &= row.p_z.has_value();
      if (i > 0) {
        const HittingRow& prev = rows[i - 1];
        ok &= row.p_equal.point >= prev.p_equal.point || row.p_equal.high >= prev.p_equal.low;
        ok &= row.p_z && prev.p_z && row.p_z->point < prev.p_z->point;
      }
      table += " n=" + std::to_string(row.n) + ":Pr(eq)=" + detail::fmt(row.p_equal.point) +
               ",Pr(Z>0)=" + (row.p_z ? detail::fmt(row.p_z->point) : std::string("-")) +
               ",r_c<r_i:" + std::to_string(row.order_violations);
      res.emitted.insert(res.emitted.end(), {row.p_equal.point, row.p_equal.low, row.p_equal.high,
                                             row.p_z ? row.p_z->point : -1.0, row.mean_z.value_or(-1.0),
                                             static_cast<double>(row.order_violations)});
      for (const auto& t : sw.trials[i]) res.emitted.insert(res.emitted.end(), {t.r_i, t.r_c});
    }
    res.passed = ok;
    res.detail = "500 trials per n;" + table;
  });
}

// ---------------------------------------------------------------------------
// 7. Disk-union area of tight clusters within the area bounds.

/// A cluster of `ell` points whose leftmost point sits at a random position,
/// one point at distance exactly rho to its right and the rest uniform in
/// the right half-disk of radius rho.
inline PointSet sample_cluster(std::size_t ell, double rho, RandomSeed seed) {
  Xoshiro256 rng(seed);
  const double x0 = rng.uniform(), y0 = rng.uniform();
  std::vector<TorusPoint> pts{TorusPoint(x0, y0)};
  const auto half_angle = [&] { return (rng.uniform() - 0.5) * std::numbers::pi; };
  const double t = half_angle();
  pts.emplace_back(x0 + rho * std::cos(t), y0 + rho * std::sin(t));
  while (pts.size() < ell) {
    const double a = half_angle();
    const double d = rho * std::sqrt(rng.uniform());
    pts.emplace_back(x0 + d * std::cos(a), y0 + d * std::sin(a));
  }
  return PointSet(std::move(pts));
}

inline Result area_sandwich(const Options& o) {
  return detail::timed(7, "disk-union area sandwich", 300.0, [&](Result& res) {
    const RandomSeed base = detail::criterion_seed(o, 7);
    const double r = 0.05;
    const std::size_t clusters = 500, samples = 200000;
    std::size_t inside = 0;
    for (std::size_t c = 0; c < clusters; ++c) {
      const RandomSeed cs = base.trial(c);
      Xoshiro256 pick(cs);
      const std::size_t ell = 2 + c % 3;
      double rho = 0.0;
      while (!(rho > 0.0)) rho = pick.uniform() * r / 2.0;
      const PointSet cluster = sample_cluster(ell, rho, cs.trial(1));
      const AreaEstimate a = disk_union_area_mc(cluster, r, samples, cs.trial(2));
      const AreaBounds b = area_bounds(ClusterGeometry{rho, r});
      inside += (a.estimate > b.lower - 4.0 * a.std_error && a.estimate < b.upper + 4.0 * a.std_error) ? 1 : 0;
    }
    const double share = static_cast<double>(inside) / static_cast<double>(clusters);
    res.passed = share >= 0.99;
    res.detail = std::to_string(inside) + "/" + std::to_string(clusters) + " clusters inside the bounds";
  });
}

// ---------------------------------------------------------------------------
// 8. Quadrature against the l = 2 antiderivative; approach to the large-n form.

inline Result quadrature(const Options&) {
  return detail::timed(8, "I(beta) quadrature", 10.0, [&](Result& res) {
    double worst = 0.0;
    const double betas[3] = {1.0 / 6.0, 1.0, 2.5};
    const double epss[3] = {0.1, 0.25, 0.4};
    const std::size_t ns[3] = {1000, 100000, 10000000};
    for (double beta : betas)
      for (double eps : epss)
        for (std::size_t n : ns) {
          const double r = r_of_mu(n, 1.0);
          const double q = i_beta_quadrature(IBetaParams{beta, 2, eps, n, r});
          const double exact = oracle::i_beta_closed_form_l2(beta, eps, static_cast<double>(n), r);
          worst = std::max(worst, std::fabs(q - exact) / exact);
        }
    std::vector<double> ratios;
    for (std::size_t n : {std::size_t{10000}, std::size_t{1000000}, std::size_t{100000000}}) {
      const IBetaParams p{1.0 / 6.0, 2, 0.4, n, r_of_mu(n, 1.0)};
      ratios.push_back(i_beta_quadrature(p) / i_beta_asymptotic(p));
    }
    bool approach = true;
    for (std::size_t i = 1; i < ratios.size(); ++i)
      approach &= std::fabs(1.0 - ratios[i]) < std::fabs(1.0 - ratios[i - 1]);
    res.passed = worst <= 1e-9 && approach;
    res.detail = "max rel err " + detail::fmt(worst) + " over 27 points; ratios " + detail::fmt(ratios[0]) + ", " +
                 detail::fmt(ratios[1]) + ", " + detail::fmt(ratios[2]);
  });
}

// ---------------------------------------------------------------------------
// 9. Bitwise reproducibility of criteria 2-6 under another worker count.

inline std::vector<Result> statistical_criteria(const Options& o, CensusCampaigns& data) {
  std::vector<Result> out;
  const auto step = [&](Result r) {
    if (o.progress != nullptr)
      *o.progress << "  .. criterion " << r.id << " done in " << detail::fmt(r.seconds) << " s" << std::endl;
    out.push_back(std::move(r));
  };
  step(isolated_mean(o));
  step(poisson_law(o, data));
  step(scaling_band(o, data));
  step(counter_inequality(data));
  step(hitting_equality(o));
  return out;
}

inline bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

inline Result determinism(const Options& o, const std::vector<Result>& first) {
  return detail::timed(9, "determinism", 7200.0, [&](Result& res) {
    Options again = o;
    again.threads = resolve_threads(o.threads) == 1 ? 3 : 1;
    CensusCampaigns data;
    const auto second = statistical_criteria(again, data);
    std::size_t compared = 0;
    std::string differing;
    for (const auto& a : first) {
      for (const auto& b : second) {
        if (a.id != b.id) continue;
        compared += a.emitted.size();
        if (!same_bits(a.emitted, b.emitted) || a.passed != b.passed)
          differing += (differing.empty() ? "" : ",") + std::to_string(a.id);
      }
    }
    res.passed = differing.empty() && compared > 0;
    res.detail = "reran criteria 2-6 with " + std::to_string(again.threads) + " worker(s) against " +
                 std::to_string(resolve_threads(o.threads)) + "; " + std::to_string(compared) + " numbers compared" +
                 (differing.empty() ? ", all identical" : ", differences in criteria " + differing);
  });
}

inline std::string format_line(const Result& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + " (" +
         detail::fmt(r.seconds) + " s): " + r.detail;
}

/// Runs every criterion in order, printing one line per criterion to `out`.
inline std::vector<Result> run_all(const Options& o, std::ostream& out) {
  std::vector<Result> results;
  const auto report = [&](Result r) {
    out << format_line(r) << std::endl;
    results.push_back(std::move(r));
  };
  report(oracle_equivalence(o));
  CensusCampaigns data;
  const auto stats = statistical_criteria(o, data);
  for (const auto& r : stats) out << format_line(r) << std::endl;
  results.insert(results.end(), stats.begin(), stats.end());
  report(area_sandwich(o));
  report(quadrature(o));
  report(determinism(o, stats));
  std::sort(results.begin(), results.end(), [](const Result& a, const Result& b) { return a.id < b.id; });
  return results;
}

inline bool all_passed(const std::vector<Result>& results) {
  return std::all_of(results.begin(), results.end(), [](const Result& r) { return r.passed; });
}

}  // namespace rgglab::acceptance
