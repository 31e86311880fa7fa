#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "rgglab/analytic.hpp"
#include "rgglab/harness.hpp"
#include "rgglab/testing/oracles.hpp"

using namespace rgglab;

namespace {

TrialPlan small_plan(std::size_t n, std::size_t trials, std::uint64_t seed) {
  TrialPlan p;
  p.n = n;
  p.mu = 1.0;
  p.trials = trials;
  p.master_seed = RandomSeed{seed};
  p.census_cfg.ell_max = 3;
  return p;
}

}  // namespace

TEST(RunTrials, ResultsByIndex) {
  const auto out = run_trials<std::size_t>(100, 4, [](std::size_t k) { return k * k; });
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t k = 0; k < 100; ++k) EXPECT_EQ(out[k], k * k);
  EXPECT_TRUE(run_trials<int>(0, 2, [](std::size_t) { return 1; }).empty());
}

TEST(RunTrials, RethrowsTrialException) {
  EXPECT_THROW(run_trials<int>(50, 3,
                               [](std::size_t k) -> int {
                                 if (k == 17) throw std::runtime_error("boom");
                                 return 0;
                               }),
               std::runtime_error);
}

TEST(Budget, CheckAndEnvironment) {
  EXPECT_NO_THROW(check_budget(1e9, 1e9));
  EXPECT_THROW(check_budget(1e9 + 1, 1e9), BudgetExceeded);
  ::unsetenv("RGG_BUDGET");
  EXPECT_EQ(budget_from_env(), kDefaultBudget);
  ::setenv("RGG_BUDGET", "1000", 1);
  EXPECT_EQ(budget_from_env(), 1000.0);
  ::setenv("RGG_BUDGET", "lots", 1);
  EXPECT_THROW(budget_from_env(), std::invalid_argument);
  ::setenv("RGG_BUDGET", "-5", 1);
  EXPECT_THROW(budget_from_env(), std::invalid_argument);
  ::unsetenv("RGG_BUDGET");
}

TEST(Budget, CensusRejectsOversizedPlan) {
  EXPECT_THROW(run_census_trials(small_plan(1000, 100, 1), 1, 99999.0), BudgetExceeded);
  const std::vector<std::size_t> ns{100, 200};
  EXPECT_THROW(scaling_sweep(ns, 2, 1.0, 10, RandomSeed{1}, {}, 1, 2999.0), BudgetExceeded);
  EXPECT_THROW(hitting_sweep(ns, 10, 2.0, RandomSeed{1}, 1, 2999.0), BudgetExceeded);
}

TEST(TrialPlan, Validation) {
  TrialPlan p = small_plan(100, 10, 1);
  p.trials = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = small_plan(100, 10, 1);
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), std::domain_error);
  p.mu = 101.0;
  EXPECT_THROW(p.validate(), std::domain_error);
  p = small_plan(100, 10, 1);
  p.radius = -0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.radius = 0.05;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.r(), 0.05);
}

TEST(Census, RowsAndNames) {
  const CensusRun run = run_census_trials(small_plan(256, 20, 3), 1);
  ASSERT_EQ(run.trials.size(), 20u);
  ASSERT_EQ(run.rows.size(), 1u + 5u * 2u);
  EXPECT_EQ(run.rows[0].name, "mean_k1");
  EXPECT_EQ(run.rows[1].name, "pr_ktilde_gt0_l2");
  EXPECT_EQ(run.rows[5].name, "fmom2_kprime_l2");
  EXPECT_EQ(run.rows.back().name, "fmom2_kprime_l3");
  for (const auto& r : run.rows) {
    EXPECT_EQ(r.n, 256u);
    EXPECT_EQ(r.trials, 20u);
    EXPECT_LE(r.ci_low, r.point_estimate);
    EXPECT_LE(r.point_estimate, r.ci_high);
  }
  EXPECT_THROW((void)run.row("nope"), std::out_of_range);
}

TEST(Census, ProbabilityOrderFollowsCounters) {
  const CensusRun run = run_census_trials(small_plan(512, 200, 4), 1);
  for (std::size_t ell = 2; ell <= 3; ++ell) {
    const std::string s = ell_suffix(ell);
    EXPECT_LE(run.row("pr_kprime_gt0" + s).point_estimate, run.row("pr_k_gt0" + s).point_estimate);
    EXPECT_LE(run.row("pr_k_gt0" + s).point_estimate, run.row("pr_ktilde_gt0" + s).point_estimate);
  }
}

TEST(Census, EveryVertexIsolatedGivesZeroKPrime) {
  // n = 2 and mu = n puts r at zero.
  TrialPlan p = small_plan(2, 50, 9);
  p.mu = 2.0;
  const CensusRun run = run_census_trials(p, 1);
  EXPECT_EQ(run.r, 0.0);
  EXPECT_EQ(run.row("pr_kprime_gt0_l2").point_estimate, 0.0);
  EXPECT_EQ(run.row("mean_k1").point_estimate, 2.0);
}

TEST(Census, SingleTrialIntervals) {
  const CensusRun run = run_census_trials(small_plan(64, 1, 2), 1);
  const auto& r = run.row("pr_ktilde_gt0_l2");
  EXPECT_TRUE(r.point_estimate == 0.0 || r.point_estimate == 1.0);
  EXPECT_EQ(r.ci_high - r.ci_low > 0.5, true);
}

TEST(Census, DeterministicAcrossThreadCounts) {
  const TrialPlan p = small_plan(400, 40, 77);
  const CensusRun a = run_census_trials(p, 1);
  const CensusRun b = run_census_trials(p, 3);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.rows, b.rows);
}

TEST(Census, ReseedingChangesSamples) {
  const CensusRun a = run_census_trials(small_plan(400, 40, 1), 1);
  const CensusRun b = run_census_trials(small_plan(400, 40, 2), 1);
  EXPECT_NE(a.trials, b.trials);
}

TEST(Census, MeanIsolatedMatchesExactExpectation) {
  const std::size_t n = 4096;
  const CensusRun run = run_census_trials(small_plan(n, 400, 12), 1);
  const auto& row = run.row("mean_k1");
  const double expected = oracle::expected_isolated(n, run.r);
  EXPECT_NEAR(expected, expected_k1_exact(n, run.r), 1e-12 * expected);
  const double se = (row.ci_high - row.ci_low) / (2.0 * kZ95);
  EXPECT_LT(std::fabs(row.point_estimate - expected), 4.0 * se);
}

TEST(Census, SecondMomentLowerBound) {
  // Pr(X > 0) >= (E X)^2 / E X^2 with E X^2 = E X(X-1) + E X.
  TrialPlan p = small_plan(1024, 1000, 21);
  p.mu = 3.0;
  p.census_cfg.ell_max = 2;
  p.census_cfg.epsilon = 0.45;
  const CensusRun run = run_census_trials(p, 1);
  const auto& pr = run.row("pr_kprime_gt0_l2");
  const auto& m = run.row("mean_kprime_l2");
  const auto& f2 = run.row("fmom2_kprime_l2");
  const double second = f2.point_estimate + m.point_estimate;
  if (second > 0.0) {
    const double bound = m.point_estimate * m.point_estimate / second;
    const double slack = (pr.ci_high - pr.ci_low) / 2.0;
    EXPECT_GE(pr.point_estimate + slack, bound);
  }
}

TEST(Sweep, SizeValidation) {
  const std::vector<std::size_t> small{8, 64};
  const std::vector<std::size_t> unordered{64, 32};
  const std::vector<std::size_t> none;
  EXPECT_THROW(scaling_sweep(small, 2, 1.0, 5, RandomSeed{1}), std::invalid_argument);
  EXPECT_THROW(scaling_sweep(unordered, 2, 1.0, 5, RandomSeed{1}), std::invalid_argument);
  EXPECT_THROW(scaling_sweep(none, 2, 1.0, 5, RandomSeed{1}), std::invalid_argument);
  const std::vector<std::size_t> ok{32, 64};
  EXPECT_THROW(scaling_sweep(ok, 1, 1.0, 5, RandomSeed{1}), std::invalid_argument);
  EXPECT_THROW(scaling_sweep(ok, 2, 1.0, 0, RandomSeed{1}), std::invalid_argument);
  EXPECT_THROW(scaling_sweep(ok, 2, 40.0, 5, RandomSeed{1}), std::domain_error);
  const std::vector<std::size_t> one{1, 4};
  EXPECT_THROW(hitting_sweep(one, 5, 2.0, RandomSeed{1}), std::invalid_argument);
  EXPECT_THROW(hitting_sweep(ok, 5, 0.0, RandomSeed{1}), std::invalid_argument);
}

TEST(Sweep, ScalingRowsUsePerSizeSeeds) {
  const std::vector<std::size_t> ns{128, 256};
  const ScalingSweep s = scaling_sweep(ns, 3, 1.0, 30, RandomSeed{5}, {}, 1);
  ASSERT_EQ(s.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& row = s.rows[i];
    EXPECT_EQ(row.n, ns[i]);
    EXPECT_EQ(row.ell, 3u);
    EXPECT_EQ(row.seed, sweep_seed(RandomSeed{5}, ns[i]));
    EXPECT_EQ(row.counter_violations, 0u);
    EXPECT_LE(row.p_prime.point, row.p_tilde.point);
    const double scale = std::pow(std::log(static_cast<double>(ns[i])), 2.0);
    EXPECT_DOUBLE_EQ(row.normalized.point, row.p_tilde.point * scale);
    EXPECT_NEAR(row.r, r_of_mu(ns[i], 1.0), 0.0);
  }
  TrialPlan p;
  p.n = 256;
  p.mu = 1.0;
  p.trials = 30;
  p.master_seed = sweep_seed(RandomSeed{5}, 256);
  p.census_cfg.ell_max = 3;
  EXPECT_EQ(s.trials[1], run_census_trials(p, 1).trials);
}

TEST(Sweep, HittingTwoPointsAlwaysEqual) {
  const std::vector<std::size_t> ns{2, 3};
  const HittingSweep h = hitting_sweep(ns, 50, 2.0, RandomSeed{8}, 1);
  ASSERT_EQ(h.rows.size(), 2u);
  EXPECT_EQ(h.rows[0].p_equal.point, 1.0);
  EXPECT_FALSE(h.rows[0].p_z.has_value());
  EXPECT_FALSE(h.rows[0].mean_z.has_value());
  EXPECT_EQ(h.rows[0].order_violations, 0u);
}

TEST(Sweep, HittingDeterministicAndOrdered) {
  const std::vector<std::size_t> ns{64, 512};
  const HittingSweep a = hitting_sweep(ns, 60, 2.0, RandomSeed{8}, 1);
  const HittingSweep b = hitting_sweep(ns, 60, 2.0, RandomSeed{8}, 3);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i)
    for (std::size_t k = 0; k < a.trials[i].size(); ++k) {
      EXPECT_EQ(a.trials[i][k].r_i, b.trials[i][k].r_i);
      EXPECT_EQ(a.trials[i][k].r_c, b.trials[i][k].r_c);
      EXPECT_EQ(a.trials[i][k].z, b.trials[i][k].z);
      EXPECT_GE(a.trials[i][k].r_c, a.trials[i][k].r_i);
    }
  EXPECT_TRUE(a.rows[1].p_z.has_value());
  EXPECT_GT(a.rows[1].p_equal.point, 0.3);
}
