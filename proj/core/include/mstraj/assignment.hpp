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

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mstraj/errors.hpp"
#include "mstraj/ids.hpp"

namespace mstraj {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// 2-D assignment
// ---------------------------------------------------------------------------

struct Assignment2D {
  std::vector<int> row_to_col;  // -1 when the row is unassigned
  double total_cost = 0.0;
};

/// Minimum-cost assignment of rows to columns; each column is used at most
/// once. Entries may be +inf (forbidden). When `allow_unassigned_rows` is
/// false every row must be assigned. Throws Infeasible if no assignment
/// exists. Shortest augmenting path with potentials (Jonker-Volgenant family).
Assignment2D solve_2d_assignment(const Eigen::MatrixXd& cost, bool allow_unassigned_rows);

// ---------------------------------------------------------------------------
// Multi-frame assignment problem
// ---------------------------------------------------------------------------

struct ProblemLeaf {
  HypId id = 0;
  double cost = 0.0;               // -log w
  std::vector<AssocEntry> assoc;   // full association history
};

struct ProblemTrack {
  TrackId id = 0;
  int created_at = 0;
  std::vector<ProblemLeaf> leaves;
};

struct ScanInfo {
  int scan = 0;
  int count = 0;                   // number of measurements in the scan
  std::vector<char> retired;       // measurements already resolved elsewhere
};

/// Selection of one leaf per track subject to, for every listed scan, each
/// measurement used at most once (exactly once when `equality_mode`).
struct MultiFrameProblem {
  std::vector<ProblemTrack> tracks;
  std::vector<ScanInfo> scans;
  bool equality_mode = false;
};

using Solution = std::map<TrackId, HypId>;

/// Sum of leaf costs; throws ContractViolation if a track or leaf is missing.
double solution_cost(const MultiFrameProblem& p, const Solution& s);

/// True iff `s` picks one leaf per track and satisfies every scan constraint.
bool is_feasible(const MultiFrameProblem& p, const Solution& s);

/// Lagrange multipliers, delta[s][l] for subproblem s (index into
/// problem.scans) and flat leaf index l (tracks in order, leaves in order).
struct Multipliers {
  std::vector<std::vector<double>> delta;

  static Multipliers zeros(const MultiFrameProblem& p);
  /// max over leaves of |sum_s delta[s][l]|.
  [[nodiscard]] double projection_error() const;
};

inline constexpr double kForcedSentinel = 1e9;

/// Costs of one per-scan subproblem: for measurement j and track i,
/// `detect(j, i)` is the cheapest penalized leaf of i containing (tau, j)
/// and `miss[i]` the cheapest leaf with no scan-tau measurement.
struct SubproblemCosts {
  int scan = 0;
  Eigen::MatrixXd detect;
  std::vector<double> miss;

  /// detect - miss; a track with no miss option gets -kForcedSentinel added
  /// instead of an infinite difference.
  [[nodiscard]] double entry(int j, int i) const;
};

SubproblemCosts subproblem_costs(const MultiFrameProblem& p, std::size_t scan_index,
                                 const Multipliers& delta, int horizon);

struct SolverOptions {
  double gap_tol = 0.01;
  int max_iters = 200;
  std::size_t recovery_node_limit = 100;
  std::size_t polish_node_limit = 200000;
};

struct IterationTrace {
  double dual = -kInf;
  double best_primal = kInf;
  double step = 0.0;
  double projection_error = 0.0;
};

struct SolveReport {
  double best_primal_cost = kInf;
  double dual_cost = -kInf;
  double gap = kInf;               // relative, (primal - dual) / |primal|
  int iterations = 0;
  bool certified = false;          // optimality proven (dual bound or exhaustive search)
  Solution solution;
  std::vector<IterationTrace> trace;
};

/// Thrown when no feasible primal is found; carries the partial report.
class SolveFailure : public Infeasible {
 public:
  SolveFailure(const std::string& what, SolveReport report)
      : Infeasible(what), report_(std::move(report)) {}
  [[nodiscard]] const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Dual decomposition into per-scan 2-D assignments with projected
/// subgradient updates and branch-and-bound primal recovery.
SolveReport dual_decomposition_solve(const MultiFrameProblem& p, const SolverOptions& options = {});

struct BranchAndBoundOptions {
  std::size_t node_limit = 200000;
  double incumbent = kInf;         // only completions strictly cheaper are reported
};

struct BranchAndBoundResult {
  std::optional<Solution> solution;
  double cost = kInf;
  bool exhausted = false;          // search completed within the node limit
  std::size_t nodes = 0;
};

/// Minimum-cost feasible completion of `fixed` (depth-first search, bounded
/// by a Lagrangian relaxation of the measurement constraints). Throws
/// Infeasible when the search proves that no completion exists.
BranchAndBoundResult branch_and_bound_recover(const MultiFrameProblem& p, const Solution& fixed,
                                              const BranchAndBoundOptions& options = {});

/// Up to `count` feasible solutions in nondecreasing cost order.
std::vector<std::pair<Solution, double>> enumerate_best_solutions(const MultiFrameProblem& p,
                                                                  std::size_t count,
                                                                  std::size_t node_limit);

}  // namespace mstraj
