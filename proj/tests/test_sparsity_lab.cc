#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "qrot/dual_solver.h"
#include "qrot/potential_polytope.h"
#include "qrot/projection_oracle.h"
#include "qrot/sparsity_lab.h"
#include "test_support.h"

namespace qrot {
namespace {

std::vector<double> uniform_grid(int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = (i + 0.5) / k;
  return v;
}

TEST(MonotoneCoupling, NorthWestCorner) {
  const Matrix plan =
      monotone_coupling_1d({0.0, 1.0}, {0.5, 0.5}, {0.0, 1.0, 2.0},
                           {0.25, 0.5, 0.25});
  Matrix expected(2, 3);
  expected << 0.25, 0.25, 0.0, 0.0, 0.25, 0.25;
  EXPECT_LE(testing::max_abs_diff(plan, expected), 1e-15);
}

TEST(MonotoneCoupling, RejectsUnsorted) {
  EXPECT_THROW(monotone_coupling_1d({1.0, 0.0}, {0.5, 0.5}, {0.0}, {1.0}),
               InstanceError);
}

// With uniform weights on five points an optimal plan is a permutation, so
// the monotone plan must match the best of all 120.
TEST(MonotoneCoupling, OptimalAmongPermutations) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> w(5, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs(5);
    std::vector<double> ys(5);
    for (auto& x : xs) x = u(rng);
    for (auto& y : ys) y = u(rng);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double d = xs[static_cast<std::size_t>(i)] -
                         ys[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        cost += 0.2 * d * d;
      }
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));

    const Matrix plan = monotone_coupling_1d(xs, w, ys, w);
    double cost = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double d =
            xs[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(j)];
        cost += plan(i, j) * d * d;
      }
    }
    EXPECT_NEAR(cost, best, 1e-14);
  }
}

TEST(ZeroCostClosedForm, MatchesProjection) {
  for (double lambda : {0.2, 0.3}) {
    const Instance inst = testing::zero_cost_reference_example(lambda);
    const auto closed = zero_cost_closed_form(inst);
    if (lambda < 0.25) {
      EXPECT_FALSE(closed.has_value());
      continue;
    }
    ASSERT_TRUE(closed.has_value());
    const CouplingDensity oracle = project(inst);
    EXPECT_LE(testing::max_abs_diff(closed->second.z, oracle.z), 1e-9);
    EXPECT_TRUE(verify_potentials(inst, closed->first, oracle.z, 1e-9));
    const auto [p, rep] = solve(inst);
    EXPECT_LE(testing::max_abs_diff(density_from_potentials(inst, p).z,
                                    closed->second.z),
              1e-9);
  }
}

TEST(ZeroCostClosedForm, RejectsNonzeroCost) {
  EXPECT_THROW(zero_cost_closed_form(testing::diagonal_example(1.0)),
               InstanceError);
}

TEST(EpsilonSweep, ShrinksTowardMonotonePlan) {
  const std::vector<double> xs = uniform_grid(20);
  const std::vector<double> w(20, 0.05);
  const SweepResult r =
      epsilon_sweep(xs, w, xs, w, {1.0, 0.1, 0.01, 0.001}, 0.1);
  ASSERT_EQ(r.epsilons.size(), 4u);
  for (bool c : r.converged) EXPECT_TRUE(c);
  EXPECT_DOUBLE_EQ(r.containment.back(), 1.0);
  EXPECT_LT(r.support_sizes.back(), r.support_sizes.front());
  EXPECT_TRUE(std::is_sorted(r.support_sizes.rbegin(), r.support_sizes.rend()));
  // Pinned from the calibration run; the final band is tridiagonal.
  EXPECT_EQ(r.support_sizes, (std::vector<int>{400, 280, 136, 62}));

  std::ostringstream csv;
  write_sweep_csv(r, csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "epsilon,support_size,containment,primal_value,dual_value,"
            "converged,sweeps,potential_change");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(EpsilonSweep, RejectsIncreasingEpsilons) {
  const std::vector<double> xs = uniform_grid(3);
  const std::vector<double> w(3, 1.0 / 3);
  EXPECT_THROW(epsilon_sweep(xs, w, xs, w, {0.1, 1.0}, 0.1), InstanceError);
  EXPECT_THROW(epsilon_sweep(xs, w, xs, w, {1.0, 0.0}, 0.1), InstanceError);
}

TEST(Refinement, BlockCostKeepsTwoComponents) {
  const double gamma = 1.0;
  const auto rows =
      refinement_study(block_cost_spec(gamma), std::vector<int>{2, 4, 10});
  ASSERT_EQ(rows.size(), 3u);
  for (const RefinementRow& row : rows) {
    EXPECT_TRUE(row.converged);
    EXPECT_EQ(row.n_components, 2);
    EXPECT_EQ(row.dimension, 2);
    EXPECT_NEAR(row.max_finite_slack, gamma, 1e-6);
  }
}

TEST(Refinement, QuadraticCostSingleComponentAtLargeEpsilon) {
  const auto rows = refinement_study(quadratic_uniform_spec(1.0), {5, 10});
  for (const RefinementRow& row : rows) {
    EXPECT_EQ(row.n_components, 1);
    EXPECT_EQ(row.dimension, 1);
  }
}

TEST(Discretize, MidpointGrid) {
  const Instance inst = discretize(quadratic_uniform_spec(0.5), 4);
  EXPECT_EQ(inst.n(), 4u);
  EXPECT_DOUBLE_EQ(inst.cost(0, 3), 0.5625);
  EXPECT_DOUBLE_EQ(inst.epsilon, 0.5);
  EXPECT_DOUBLE_EQ(inst.mu[2], 0.25);
}

}  // namespace
}  // namespace qrot
