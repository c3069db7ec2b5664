// Copyright 2026 The mstraj Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "mstraj/assignment.hpp"
#include "oracles.hpp"

using namespace mstraj;

TEST(Assignment2D, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    const Eigen::MatrixXd c = gen::random_matrix(rng);
    for (bool partial : {false, true}) {
      const auto ref = oracle::brute_2d(c, partial);
      if (!ref) {
        EXPECT_THROW(solve_2d_assignment(c, partial), Infeasible);
        continue;
      }
      const Assignment2D a = solve_2d_assignment(c, partial);
      EXPECT_EQ(a.total_cost, *ref) << c;
      double sum = 0.0;
      std::vector<char> used(c.cols(), 0);
      for (int i = 0; i < c.rows(); ++i) {
        const int j = a.row_to_col[i];
        if (j < 0) {
          EXPECT_TRUE(partial);
          continue;
        }
        EXPECT_FALSE(used[j]);
        used[j] = 1;
        sum += c(i, j);
      }
      EXPECT_EQ(sum, a.total_cost);
    }
  }
}

TEST(Assignment2D, MoreRowsThanColumnsIsInfeasibleWhenAllAssigned) {
  Eigen::MatrixXd c(3, 2);
  c << 1, 2, 3, 4, 5, 6;
  EXPECT_THROW(solve_2d_assignment(c, false), Infeasible);
  EXPECT_EQ(solve_2d_assignment(c, true).total_cost, 0.0);
}

TEST(Assignment2D, AllForbiddenRow) {
  Eigen::MatrixXd c(2, 2);
  c << kInf, kInf, -1, 2;
  EXPECT_THROW(solve_2d_assignment(c, false), Infeasible);
  const auto a = solve_2d_assignment(c, true);
  EXPECT_EQ(a.row_to_col[0], -1);
  EXPECT_EQ(a.row_to_col[1], 0);
  EXPECT_EQ(a.total_cost, -1.0);
}

TEST(Assignment2D, NegativeCostsPreferAssignment) {
  Eigen::MatrixXd c(2, 3);
  c << -1, 5, kInf, 4, -3, -2;
  const auto a = solve_2d_assignment(c, true);
  EXPECT_EQ(a.total_cost, -4.0);
}

TEST(MultiFrame, FeasibilityAndCost) {
  MultiFrameProblem p;
  p.scans = {{1, 2, {}}};
  p.tracks = {{1, 1, {{10, 1.0, {{1, 0}}}, {11, 3.0, {}}}},
              {2, 1, {{20, 0.5, {{1, 0}}}, {21, 2.0, {{1, 1}}}}}};
  EXPECT_TRUE(is_feasible(p, {{1, 10}, {2, 21}}));
  EXPECT_FALSE(is_feasible(p, {{1, 10}, {2, 20}}));
  EXPECT_FALSE(is_feasible(p, {{1, 10}}));
  EXPECT_EQ(solution_cost(p, {{1, 11}, {2, 20}}), 3.5);
  EXPECT_THROW(solution_cost(p, {{1, 99}, {2, 20}}), ContractViolation);
  p.equality_mode = true;
  EXPECT_FALSE(is_feasible(p, {{1, 11}, {2, 20}}));
  EXPECT_TRUE(is_feasible(p, {{1, 10}, {2, 21}}));
}

TEST(MultiFrame, RetiredMeasurementsNeedNoCover) {
  MultiFrameProblem p;
  p.equality_mode = true;
  p.scans = {{1, 2, {1, 1}}};
  p.tracks = {{1, 1, {{10, 1.0, {{1, 0}}}, {11, 3.0, {}}}}};
  EXPECT_TRUE(is_feasible(p, {{1, 11}}));
  const auto r = dual_decomposition_solve(p);
  EXPECT_EQ(r.best_primal_cost, 1.0);
}

TEST(MultiFrame, DualDecompositionMatchesExhaustiveSearch) {
  std::mt19937_64 rng(7);
  int feasible = 0;
  for (int it = 0; it < 400; ++it) {
    const MultiFrameProblem p = gen::random_problem(rng);
    const auto all = oracle::all_solutions(p);
    if (all.empty()) {
      EXPECT_THROW(dual_decomposition_solve(p), SolveFailure);
      continue;
    }
    ++feasible;
    const SolveReport r = dual_decomposition_solve(p);
    EXPECT_TRUE(is_feasible(p, r.solution));
    EXPECT_EQ(r.best_primal_cost, all.front().second);
    EXPECT_EQ(solution_cost(p, r.solution), all.front().second);
    EXPECT_TRUE(r.certified);
    EXPECT_LE(r.dual_cost, r.best_primal_cost + 1e-9);
  }
  EXPECT_GT(feasible, 200);
}

TEST(MultiFrame, LargerInstancesMatchExhaustiveSearch) {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 60; ++it) {
    const MultiFrameProblem p = gen::random_problem(rng, 6, 4, 4, 5, 0.2);
    const auto all = oracle::all_solutions(p);
    if (all.empty()) continue;
    const SolveReport r = dual_decomposition_solve(p);
    EXPECT_EQ(r.best_primal_cost, all.front().second);
  }
}

TEST(MultiFrame, EnumerationMatchesSortedBruteForce) {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 200; ++it) {
    const MultiFrameProblem p = gen::random_problem(rng);
    const auto all = oracle::all_solutions(p);
    const std::size_t want = 1 + it % 12;
    const auto got = enumerate_best_solutions(p, want, 1000000);
    ASSERT_EQ(got.size(), std::min(want, all.size()));
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].second, all[i].second);
      EXPECT_TRUE(is_feasible(p, got[i].first));
      EXPECT_EQ(solution_cost(p, got[i].first), got[i].second);
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t j = i + 1; j < got.size(); ++j) EXPECT_NE(got[i].first, got[j].first);
    }
  }
}

TEST(MultiFrame, RecoveryRespectsFixedLeaves) {
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int it = 0; it < 300; ++it) {
    const MultiFrameProblem p = gen::random_problem(rng);
    const auto& t0 = p.tracks.front();
    const HypId fixed = t0.leaves.back().id;
    std::optional<double> ref;
    for (const auto& [sol, cost] : oracle::all_solutions(p)) {
      if (sol.at(t0.id) == fixed) {
        ref = cost;
        break;
      }
    }
    if (!ref) {
      EXPECT_THROW(branch_and_bound_recover(p, {{t0.id, fixed}}), Infeasible);
      continue;
    }
    const auto r = branch_and_bound_recover(p, {{t0.id, fixed}});
    ASSERT_TRUE(r.solution.has_value());
    EXPECT_TRUE(r.exhausted);
    EXPECT_EQ(r.cost, *ref);
    EXPECT_EQ(r.solution->at(t0.id), fixed);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(MultiFrame, IncumbentFiltersWorseCompletions) {
  MultiFrameProblem p;
  p.scans = {{1, 1, {}}};
  p.tracks = {{1, 1, {{10, 1.0, {{1, 0}}}, {11, 3.0, {}}}}};
  BranchAndBoundOptions o;
  o.incumbent = 0.5;
  const auto r = branch_and_bound_recover(p, {}, o);
  EXPECT_FALSE(r.solution.has_value());
  o.incumbent = 2.0;
  EXPECT_EQ(branch_and_bound_recover(p, {}, o).cost, 1.0);
}

TEST(MultiFrame, ZeroMultipliersProjectToZero) {
  std::mt19937_64 rng(12);
  const auto p = gen::random_problem(rng);
  const auto m = Multipliers::zeros(p);
  EXPECT_EQ(m.delta.size(), p.scans.size());
  EXPECT_EQ(m.projection_error(), 0.0);
}

TEST(MultiFrame, SubproblemCostsPickCheapestLeaf) {
  MultiFrameProblem p;
  p.scans = {{1, 2, {}}, {2, 1, {}}};
  p.tracks = {{1, 1,
               {{10, 4.0, {{1, 0}}},
                {11, 2.0, {{1, 0}, {2, 0}}},
                {12, 6.0, {{1, 1}}},
                {13, 8.0, {}}}}};
  const auto c = subproblem_costs(p, 0, Multipliers::zeros(p), 2);
  // Costs are split evenly over the two subproblems.
  EXPECT_DOUBLE_EQ(c.detect(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.detect(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(c.miss[0], 4.0);
  EXPECT_DOUBLE_EQ(c.entry(0, 0), -3.0);
}
