#pragma once

// Seeded Monte Carlo campaigns. Trial k of a campaign with master seed s
// samples its points from s.trial(k); results are stored by trial index, so
// the output does not depend on how trials are spread over threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rgglab/analytic.hpp"
#include "rgglab/census.hpp"
#include "rgglab/process.hpp"
#include "rgglab/random.hpp"
#include "rgglab/rgg.hpp"
#include "rgglab/stats.hpp"

namespace rgglab {

inline constexpr double kDefaultBudget = 1e9;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point-placement budget: RGG_BUDGET if set to a positive number, else 1e9.
inline double budget_from_env() {
  const char* raw = std::getenv("RGG_BUDGET");
  if (raw == nullptr || *raw == '\0') return kDefaultBudget;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) throw std::invalid_argument("RGG_BUDGET must be a positive number");
  return v;
}

inline void check_budget(double placements, double budget) {
  if (placements > budget) {
    throw BudgetExceeded("plan needs " + std::to_string(placements) + " point placements, budget is " +
                         std::to_string(budget));
  }
}

/// Worker count: 0 means one per hardware thread.
inline std::size_t resolve_threads(std::size_t threads) {
  if (threads != 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// results[k] = fn(k) for k < count, computed by up to `threads` workers.
/// The first exception thrown by any trial is rethrown after all workers stop.
template <typename T, typename F>
std::vector<T> run_trials(std::size_t count, std::size_t threads, F&& fn) {
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t k = next.fetch_add(1, std::memory_order_relaxed);
      if (k >= count) return;
      try {
        slots[k].emplace(fn(k));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct TrialPlan {
  std::size_t n = 1024;
  double mu = 1.0;
  std::size_t trials = 1000;
  RandomSeed master_seed{1};
  CensusConfig census_cfg{};
  double kappa = 2.0;
  std::optional<double> radius;  // overrides mu when set

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    census_cfg.validate();
    if (radius) {
      detail::check_radius(*radius);
    } else if (!(mu > 0.0 && mu <= static_cast<double>(n))) {
      throw std::domain_error("mu must lie in (0, n]");
    }
  }

  [[nodiscard]] double r() const { return radius ? *radius : r_of_mu(n, mu); }
};

struct EstimateRow {
  std::string name;
  std::size_t n = 0;
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t trials = 0;
  RandomSeed seed{0};

  friend bool operator==(const EstimateRow&, const EstimateRow&) = default;
};

inline EstimateRow proportion_row(std::string name, std::size_t n, std::size_t hits, std::size_t trials,
                                  RandomSeed seed) {
  const Interval ci = wilson_interval(hits, trials);
  return EstimateRow{std::move(name), n, ci.point, ci.low, ci.high, trials, seed};
}

inline EstimateRow mean_row(std::string name, std::size_t n, std::span<const std::size_t> xs, RandomSeed seed) {
  const Interval ci = mean_estimate(xs).interval();
  return EstimateRow{std::move(name), n, ci.point, ci.low, ci.high, xs.size(), seed};
}

struct CensusRun {
  double r = 0.0;
  std::vector<ComponentCensus> trials;
  std::vector<EstimateRow> rows;

  /// K_1 of every trial, in trial order.
  [[nodiscard]] std::vector<std::size_t> k1_samples() const {
    std::vector<std::size_t> out;
    out.reserve(trials.size());
    for (const auto& c : trials) out.push_back(c.k1());
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> k_prime_samples(std::size_t ell) const {
    std::vector<std::size_t> out;
    out.reserve(trials.size());
    for (const auto& c : trials) out.push_back(c.k_prime.at(ell));
    return out;
  }

  [[nodiscard]] const EstimateRow& row(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return r;
    throw std::out_of_range("no estimate row named " + name);
  }
};

inline std::string ell_suffix(std::size_t ell) { return "_l" + std::to_string(ell); }

/// Rows: mean_k1, then for each l in 2..ell_max pr_ktilde_gt0_l<l>,
/// pr_k_gt0_l<l>, pr_kprime_gt0_l<l>, mean_kprime_l<l> and fmom2_kprime_l<l>
/// (the second factorial moment of K'). Every trial must satisfy
/// K' <= K <= K~; a violation throws std::logic_error.
inline CensusRun run_census_trials(const TrialPlan& plan, std::size_t threads = 0, double budget = kDefaultBudget) {
  plan.validate();
  check_budget(static_cast<double>(plan.n) * static_cast<double>(plan.trials), budget);
  CensusRun run;
  run.r = plan.r();
  const double r = run.r;
  run.trials = run_trials<ComponentCensus>(plan.trials, threads, [&](std::size_t k) {
    const PointSet ps = sample_points(plan.n, plan.master_seed.trial(k));
    ComponentCensus c = census(ps, r, plan.census_cfg);
    if (!c.counters_consistent())
      throw std::logic_error("counter inequality violated in trial " + std::to_string(k));
    return c;
  });

  const auto k1 = run.k1_samples();
  run.rows.push_back(mean_row("mean_k1", plan.n, k1, plan.master_seed));
  for (std::size_t ell = 2; ell <= plan.census_cfg.ell_max; ++ell) {
    std::size_t tilde = 0, exact = 0, prime = 0;
    for (const auto& c : run.trials) {
      tilde += c.k_tilde[ell] > 0 ? 1 : 0;
      exact += c.k_exact[ell] > 0 ? 1 : 0;
      prime += c.k_prime[ell] > 0 ? 1 : 0;
    }
    const std::string sfx = ell_suffix(ell);
    run.rows.push_back(proportion_row("pr_ktilde_gt0" + sfx, plan.n, tilde, plan.trials, plan.master_seed));
    run.rows.push_back(proportion_row("pr_k_gt0" + sfx, plan.n, exact, plan.trials, plan.master_seed));
    run.rows.push_back(proportion_row("pr_kprime_gt0" + sfx, plan.n, prime, plan.trials, plan.master_seed));
    const auto kp = run.k_prime_samples(ell);
    run.rows.push_back(mean_row("mean_kprime" + sfx, plan.n, kp, plan.master_seed));
    const Interval f2 = factorial_moment(kp, 2).interval();
    run.rows.push_back(EstimateRow{"fmom2_kprime" + sfx, plan.n, f2.point, f2.low, f2.high, plan.trials,
                                   plan.master_seed});
  }
  return run;
}

namespace detail {

inline void check_sweep_sizes(std::span<const std::size_t> ns, std::size_t min_n) {
  if (ns.empty()) throw std::invalid_argument("sweep needs at least one n");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < min_n) throw std::invalid_argument("sweep n must be at least " + std::to_string(min_n));
    if (i > 0 && ns[i] <= ns[i - 1]) throw std::invalid_argument("sweep sizes must be strictly increasing");
  }
}

inline void check_sweep_budget(std::span<const std::size_t> ns, std::size_t trials, double budget) {
  double total = 0.0;
  for (std::size_t n : ns) total += static_cast<double>(n) * static_cast<double>(trials);
  check_budget(total, budget);
}

}  // namespace detail

/// Master seed of the campaign for size n within a sweep.
inline RandomSeed sweep_seed(RandomSeed seed, std::size_t n) { return seed.trial(static_cast<std::uint64_t>(n)); }

struct ScalingRow {
  std::size_t n = 0;
  std::size_t ell = 2;
  double r = 0.0;
  std::size_t trials = 0;
  RandomSeed seed{0};
  Interval p_tilde;       // Pr(K~_l > 0)
  Interval normalized;    // p_tilde * log^{l-1} n
  Interval p_prime;       // Pr(K'_{eps,l} > 0)
  std::size_t counter_violations = 0;
};

struct ScalingSweep {
  std::vector<ScalingRow> rows;
  std::vector<std::vector<ComponentCensus>> trials;  // per row
};

inline ScalingSweep scaling_sweep(std::span<const std::size_t> ns, std::size_t ell, double mu,
                                  std::size_t trials_per_n, RandomSeed seed, CensusConfig cfg = {},
                                  std::size_t threads = 0, double budget = kDefaultBudget) {
  detail::check_sweep_sizes(ns, 16);
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  if (trials_per_n < 1) throw std::invalid_argument("trials must be at least 1");
  cfg.ell_max = std::max(cfg.ell_max, ell);
  cfg.validate();
  for (std::size_t n : ns) {
    if (!(mu > 0.0 && mu <= static_cast<double>(n))) throw std::domain_error("mu must lie in (0, n]");
  }
  detail::check_sweep_budget(ns, trials_per_n, budget);

  ScalingSweep out;
  for (std::size_t n : ns) {
    TrialPlan plan;
    plan.n = n;
    plan.mu = mu;
    plan.trials = trials_per_n;
    plan.master_seed = sweep_seed(seed, n);
    plan.census_cfg = cfg;
    CensusRun run = run_census_trials(plan, threads, budget);

    ScalingRow row;
    row.n = n;
    row.ell = ell;
    row.r = run.r;
    row.trials = trials_per_n;
    row.seed = plan.master_seed;
    std::size_t tilde = 0, prime = 0;
    for (const auto& c : run.trials) {
      tilde += c.k_tilde[ell] > 0 ? 1 : 0;
      prime += c.k_prime[ell] > 0 ? 1 : 0;
      row.counter_violations += c.counters_consistent() ? 0 : 1;
    }
    row.p_tilde = wilson_interval(tilde, trials_per_n);
    row.p_prime = wilson_interval(prime, trials_per_n);
    const double scale = std::pow(std::log(static_cast<double>(n)), static_cast<double>(ell - 1));
    row.normalized = Interval{row.p_tilde.point * scale, row.p_tilde.low * scale, row.p_tilde.high * scale};
    out.rows.push_back(row);
    out.trials.push_back(std::move(run.trials));
  }
  return out;
}

struct HittingTrial {
  double r_i = 0.0;
  double r_c = 0.0;
  bool equal = false;
  std::optional<std::size_t> z;  // empty when log n <= kappa
};

struct HittingRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  RandomSeed seed{0};
  Interval p_equal;              // Pr(r_c = r_i)
  std::optional<Interval> p_z;   // Pr(Z > 0)
  std::optional<double> mean_z;
  std::size_t order_violations = 0;  // trials with r_c < r_i
};

struct HittingSweep {
  std::vector<HittingRow> rows;
  std::vector<std::vector<HittingTrial>> trials;  // per row
};

/// Sizes must be >= 2 and strictly increasing. Z is reported only for sizes
/// with log n > kappa.
inline HittingSweep hitting_sweep(std::span<const std::size_t> ns, std::size_t trials_per_n, double kappa,
                                  RandomSeed seed, std::size_t threads = 0, double budget = kDefaultBudget) {
  detail::check_sweep_sizes(ns, 2);
  if (trials_per_n < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  detail::check_sweep_budget(ns, trials_per_n, budget);

  HittingSweep out;
  for (std::size_t n : ns) {
    const bool z_defined = std::log(static_cast<double>(n)) > kappa;
    std::optional<IsolatedPairConfig> zcfg;
    if (z_defined) zcfg = IsolatedPairConfig::make(n, kappa);
    const RandomSeed master = sweep_seed(seed, n);
    auto trials = run_trials<HittingTrial>(trials_per_n, threads, [&](std::size_t k) {
      const PointSet ps = sample_points(n, master.trial(k));
      const HittingRadii h = hitting_radii(ps);
      HittingTrial t{h.r_i, h.r_c, h.equal, std::nullopt};
      if (zcfg) t.z = count_close_isolated_pairs(ps, *zcfg);
      return t;
    });

    HittingRow row;
    row.n = n;
    row.trials = trials_per_n;
    row.seed = master;
    std::size_t equal = 0, z_positive = 0;
    std::vector<std::size_t> zs;
    for (const auto& t : trials) {
      equal += t.equal ? 1 : 0;
      row.order_violations += t.r_c < t.r_i ? 1 : 0;
      if (t.z) {
        z_positive += *t.z > 0 ? 1 : 0;
        zs.push_back(*t.z);
      }
    }
    row.p_equal = wilson_interval(equal, trials_per_n);
    if (z_defined) {
      row.p_z = wilson_interval(z_positive, trials_per_n);
      row.mean_z = mean_estimate(zs).mean;
    }
    out.rows.push_back(row);
    out.trials.push_back(std::move(trials));
  }
  return out;
}

}  // namespace rgglab
