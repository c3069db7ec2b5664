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

#include "mstraj/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <map>
#include <queue>
#include <unordered_map>

namespace mstraj {

// ---------------------------------------------------------------------------
// 2-D assignment
// ---------------------------------------------------------------------------

namespace {

// Hungarian method with row-by-row shortest augmenting paths; requires
// rows <= cols and finite costs. Returns row -> column.
std::vector<int> hungarian(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment2D solve_2d_assignment(const Eigen::MatrixXd& cost, bool allow_unassigned_rows) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  Assignment2D out;
  out.row_to_col.assign(n, -1);
  if (n == 0) return out;
  if (!allow_unassigned_rows && n > m) {
    throw Infeasible("more rows than columns with every row required");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      MSTRAJ_EXPECT(!std::isnan(cost(i, j)) && cost(i, j) != -kInf,
                    "assignment costs must be finite or +inf");
    }
  }

  // Optional rows get a private zero-cost "unassigned" column.
  const int cols = allow_unassigned_rows ? m + n : m;
  Eigen::MatrixXd work = Eigen::MatrixXd::Constant(n, cols, kInf);
  work.leftCols(m) = cost;
  if (allow_unassigned_rows) {
    for (int i = 0; i < n; ++i) work(i, m + i) = 0.0;
  }

  // Forbidden entries become a penalty larger than any finite assignment.
  double finite_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (std::isfinite(work(i, j))) finite_sum += std::abs(work(i, j));
    }
  }
  const double big = 2.0 * finite_sum + 1.0;
  Eigen::MatrixXd finite = work.unaryExpr([big](double x) { return std::isfinite(x) ? x : big; });

  const std::vector<int> r2c = hungarian(finite);
  for (int i = 0; i < n; ++i) {
    const int j = r2c[i];
    if (j < 0 || !std::isfinite(work(i, j))) throw Infeasible("no feasible 2-D assignment");
    if (j < m) {
      out.row_to_col[i] = j;
      out.total_cost += cost(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem compilation
// ---------------------------------------------------------------------------

namespace {

struct Compiled {
  int n_tracks = 0;
  int n_leaves = 0;
  int n_meas = 0;
  int n_scans = 0;
  std::vector<int> scan_offset;        // flat measurement offset per scan index
  std::vector<char> required;          // per flat measurement
  std::vector<int> leaf_begin;         // per track, size n_tracks + 1
  std::vector<int> track_of;           // per leaf
  std::vector<double> cost;            // per leaf
  std::vector<std::vector<int>> meas;  // per leaf, flat measurement ids
  std::vector<std::vector<int>> meas_at;  // [scan index][leaf] -> j or -1
};

Compiled compile(const MultiFrameProblem& p) {
  Compiled c;
  c.n_tracks = static_cast<int>(p.tracks.size());
  c.n_scans = static_cast<int>(p.scans.size());
  std::unordered_map<int, int> scan_index;
  c.scan_offset.resize(c.n_scans);
  for (int s = 0; s < c.n_scans; ++s) {
    const auto& info = p.scans[s];
    MSTRAJ_EXPECT(info.count >= 0, "negative measurement count");
    MSTRAJ_EXPECT(scan_index.emplace(info.scan, s).second, "duplicate scan in problem");
    c.scan_offset[s] = c.n_meas;
    for (int j = 0; j < info.count; ++j) {
      const bool retired = j < static_cast<int>(info.retired.size()) && info.retired[j];
      c.required.push_back(p.equality_mode && !retired ? 1 : 0);
    }
    c.n_meas += info.count;
  }
  c.leaf_begin.push_back(0);
  for (int t = 0; t < c.n_tracks; ++t) {
    for (const auto& leaf : p.tracks[t].leaves) {
      MSTRAJ_EXPECT(!std::isnan(leaf.cost) && leaf.cost != -kInf, "leaf cost must not be NaN/-inf");
      c.track_of.push_back(t);
      c.cost.push_back(leaf.cost);
      std::vector<int> ms;
      for (const auto& e : leaf.assoc) {
        auto it = scan_index.find(e.scan);
        if (it == scan_index.end()) continue;
        MSTRAJ_EXPECT(e.meas >= 0 && e.meas < p.scans[it->second].count,
                      "association references a nonexistent measurement");
        ms.push_back(c.scan_offset[it->second] + e.meas);
      }
      std::sort(ms.begin(), ms.end());
      c.meas.push_back(std::move(ms));
    }
    c.leaf_begin.push_back(static_cast<int>(c.cost.size()));
  }
  c.n_leaves = static_cast<int>(c.cost.size());
  c.meas_at.assign(c.n_scans, std::vector<int>(c.n_leaves, -1));
  for (int l = 0; l < c.n_leaves; ++l) {
    for (int f : c.meas[l]) {
      const int s = static_cast<int>(
          std::upper_bound(c.scan_offset.begin(), c.scan_offset.end(), f) -
          c.scan_offset.begin() - 1);
      MSTRAJ_EXPECT(c.meas_at[s][l] < 0, "leaf holds two measurements of one scan");
      c.meas_at[s][l] = f - c.scan_offset[s];
    }
  }
  return c;
}

double choice_cost(const Compiled& c, const std::vector<int>& choice) {
  double s = 0.0;
  for (int l : choice) s += c.cost[l];
  return s;
}

bool choice_feasible(const Compiled& c, const std::vector<int>& choice) {
  std::vector<char> used(c.n_meas, 0);
  for (int l : choice) {
    for (int f : c.meas[l]) {
      if (used[f]) return false;
      used[f] = 1;
    }
  }
  for (int f = 0; f < c.n_meas; ++f) {
    if (c.required[f] && !used[f]) return false;
  }
  return true;
}

Solution to_solution(const MultiFrameProblem& p, const Compiled& c, const std::vector<int>& choice) {
  Solution s;
  for (int t = 0; t < c.n_tracks; ++t) {
    s[p.tracks[t].id] = p.tracks[t].leaves[choice[t] - c.leaf_begin[t]].id;
  }
  return s;
}

std::vector<int> from_solution(const MultiFrameProblem& p, const Compiled& c, const Solution& s,
                               bool require_all) {
  std::vector<int> choice(c.n_tracks, -1);
  for (int t = 0; t < c.n_tracks; ++t) {
    auto it = s.find(p.tracks[t].id);
    if (it == s.end()) {
      MSTRAJ_EXPECT(!require_all, "solution does not cover every track");
      continue;
    }
    const auto& leaves = p.tracks[t].leaves;
    auto lt = std::find_if(leaves.begin(), leaves.end(),
                           [&](const ProblemLeaf& l) { return l.id == it->second; });
    MSTRAJ_EXPECT(lt != leaves.end(), "solution references an unknown hypothesis");
    choice[t] = c.leaf_begin[t] + static_cast<int>(lt - leaves.begin());
  }
  return choice;
}

// ---------------------------------------------------------------------------
// Best-first branch and bound over per-track candidate lists
// ---------------------------------------------------------------------------

struct BnbOutput {
  std::vector<std::pair<std::vector<int>, double>> solutions;
  bool complete = false;
  std::size_t nodes = 0;
};

// Depth-first branch and bound over the listed tracks only; other entries of
// the returned paths are -1. Keeps the `want` cheapest complete selections
// seen. Candidates that clash with the partial selection are blocked
// incrementally and the next track is the one with the fewest open
// candidates. The bound relaxes the one-track-per-measurement constraints
// with multipliers u (u <= 0 where a measurement may stay unused) fitted by a
// short subgradient ascent at the root:
//   g + sum of u over uncovered measurements
//     + sum over open tracks of min (cost - u over the leaf's measurements).
// When the node budget runs out the best selections found so far are
// returned with complete = false.
// Multiplier ascent lengths: short for the per-iteration primal repair, long
// where the search has to prove optimality.
constexpr int kQuickMultiplierIters = 20;
constexpr int kDeepMultiplierIters = 1000;

class DepthFirstSearch {
 public:
  DepthFirstSearch(const Compiled& c, const std::vector<std::vector<int>>& candidates,
                   const std::vector<int>& tracks, std::size_t want, std::size_t node_limit,
                   double incumbent, int multiplier_iters)
      : c_(c),
        tracks_(tracks),
        want_(want),
        node_limit_(node_limit),
        incumbent_(incumbent),
        multiplier_iters_(multiplier_iters) {
    const int T = static_cast<int>(tracks.size());
    cands_.resize(T);
    local_.assign(c.n_leaves, -1);
    pos_.assign(c.n_leaves, -1);
    blocked_.assign(c.n_leaves, 0);
    avail_.assign(c.n_meas, 0);
    covered_.assign(c.n_meas, 0);
    meas_leaves_.resize(c.n_meas);
    assigned_.assign(T, -1);
    free_.resize(T);
    free_pos_.resize(T);
    std::iota(free_.begin(), free_.end(), 0);
    std::iota(free_pos_.begin(), free_pos_.end(), 0);
    for (int d = 0; d < T; ++d) cands_[d] = candidates[tracks[d]];
    fit_multipliers();
    for (int d = 0; d < T; ++d) {
      std::stable_sort(cands_[d].begin(), cands_[d].end(),
                       [&](int a, int b) { return rc_[a] < rc_[b]; });
      open_.push_back(static_cast<int>(cands_[d].size()));
      first_.push_back(0);
      for (std::size_t i = 0; i < cands_[d].size(); ++i) {
        const int l = cands_[d][i];
        pos_[l] = static_cast<int>(i);
        local_[l] = d;
        for (int f : c.meas[l]) {
          meas_leaves_[f].push_back(l);
          ++avail_[f];
        }
      }
    }
  }

  BnbOutput run() {
    BnbOutput out;
    bool ok = true;
    for (const auto& cs : cands_) ok = ok && !cs.empty();
    if (ok) dfs(0.0, u_total_, 0);
    out.complete = !truncated_;
    out.nodes = nodes_;
    std::sort(best_.begin(), best_.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return a.first < b.first;
    });
    out.solutions = std::move(best_);
    return out;
  }

 private:
  void fit_multipliers() {
    const int T = static_cast<int>(cands_.size());
    u_.assign(c_.n_meas, 0.0);
    rc_.assign(c_.n_leaves, 0.0);
    std::vector<int> group_meas;
    {
      std::vector<char> seen(c_.n_meas, 0);
      for (const auto& cs : cands_) {
        for (int l : cs) {
          for (int f : c_.meas[l]) {
            if (!seen[f]) group_meas.push_back(f);
            seen[f] = 1;
          }
        }
      }
      std::sort(group_meas.begin(), group_meas.end());
    }
    auto evaluate = [&](std::vector<int>* pick) {
      double v = 0.0;
      for (int f : group_meas) v += u_[f];
      for (int d = 0; d < T; ++d) {
        double lo = kInf;
        int arg = -1;
        for (int l : cands_[d]) {
          double r = c_.cost[l];
          for (int f : c_.meas[l]) r -= u_[f];
          if (r < lo) {
            lo = r;
            arg = l;
          }
        }
        v += lo;
        if (pick) (*pick)[d] = arg;
      }
      return v;
    };

    bool empty = false;
    for (const auto& cs : cands_) empty = empty || cs.empty();
    std::vector<double> best_u = u_;
    if (!empty && !group_meas.empty()) {
      std::vector<int> pick(T, -1);
      std::vector<double> grad(c_.n_meas, 0.0);
      double best = -kInf;
      double eps = 0.0;
      int stall = 0;
      for (int it = 0; it < multiplier_iters_; ++it) {
        const double v = evaluate(&pick);
        if (v > best) {
          best = v;
          best_u = u_;
          stall = 0;
        } else if (++stall >= 5) {
          eps *= 0.5;
          stall = 0;
        }
        if (it == 0) eps = 0.1 * (1.0 + std::abs(v));
        // Bound already meets the incumbent, or the target has collapsed.
        if (std::isfinite(incumbent_) && best >= incumbent_ - slack(incumbent_)) break;
        if (eps < 1e-9 * (1.0 + std::abs(best))) break;
        for (int f : group_meas) grad[f] = 1.0;
        for (int d = 0; d < T; ++d) {
          for (int f : c_.meas[pick[d]]) grad[f] -= 1.0;
        }
        double norm2 = 0.0;
        for (int f : group_meas) {
          if (!c_.required[f] && u_[f] >= 0.0 && grad[f] > 0.0) grad[f] = 0.0;
          norm2 += grad[f] * grad[f];
        }
        if (norm2 == 0.0) break;  // the relaxed choice is optimal
        const double target = std::isfinite(incumbent_) ? std::min(incumbent_, best + eps) : best + eps;
        const double step = std::max(0.0, target - v) / norm2;
        if (!(step > 0.0)) break;
        for (int f : group_meas) {
          u_[f] += step * grad[f];
          if (!c_.required[f]) u_[f] = std::min(u_[f], 0.0);
        }
      }
    }
    u_ = best_u;
    u_total_ = 0.0;
    for (int f : group_meas) u_total_ += u_[f];
    for (const auto& cs : cands_) {
      for (int l : cs) {
        double r = c_.cost[l];
        for (int f : c_.meas[l]) r -= u_[f];
        rc_[l] = r;
      }
    }
  }

  double threshold() const {
    if (best_.size() < want_) return incumbent_;
    return best_.front().second;  // heap top is the worst kept
  }

  static bool heap_less(const std::pair<std::vector<int>, double>& a,
                        const std::pair<std::vector<int>, double>& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  }

  void record(double g) {
    std::vector<int> path(c_.n_tracks, -1);
    for (std::size_t d = 0; d < tracks_.size(); ++d) path[tracks_[d]] = assigned_[d];
    best_.emplace_back(std::move(path), g);
    std::push_heap(best_.begin(), best_.end(), heap_less);
    if (best_.size() > want_) {
      std::pop_heap(best_.begin(), best_.end(), heap_less);
      best_.pop_back();
    }
  }

  // Returns false when a required measurement can no longer be covered.
  bool assign(int d, int l) {
    bool alive = true;
    auto drop = [&](int leaf) {
      for (int f : c_.meas[leaf]) {
        if (--avail_[f] == 0 && c_.required[f] && !covered_[f]) alive = false;
      }
    };
    for (int f : c_.meas[l]) covered_[f] = 1;
    for (int o : cands_[d]) {
      if (blocked_[o] == 0) drop(o);
    }
    assigned_[d] = l;
    {
      const int at = free_pos_[d];
      const int last = free_.back();
      free_[at] = last;
      free_pos_[last] = at;
      free_.pop_back();
    }
    for (int f : c_.meas[l]) {
      for (int o : meas_leaves_[f]) {
        if (local_[o] == d) continue;
        if (blocked_[o]++ == 0) {
          block(o);
          if (assigned_[local_[o]] < 0) drop(o);
        }
      }
    }
    return alive;
  }

  void unassign(int d, int l) {
    for (auto it = c_.meas[l].rbegin(); it != c_.meas[l].rend(); ++it) {
      for (int o : meas_leaves_[*it]) {
        if (local_[o] == d) continue;
        if (--blocked_[o] == 0) {
          unblock(o);
          if (assigned_[local_[o]] < 0) {
            for (int f : c_.meas[o]) ++avail_[f];
          }
        }
      }
    }
    for (int f : c_.meas[l]) covered_[f] = 0;
    assigned_[d] = -1;
    {
      // Undo the swap-remove; calls unwind in LIFO order.
      const int at = free_pos_[d];
      if (at == static_cast<int>(free_.size())) {
        free_.push_back(d);
      } else {
        const int moved = free_[at];
        free_pos_[moved] = static_cast<int>(free_.size());
        free_.push_back(moved);
        free_[at] = d;
      }
    }
    for (int o : cands_[d]) {
      if (blocked_[o] == 0) {
        for (int f : c_.meas[o]) ++avail_[f];
      }
    }
  }

  // g: true cost so far; u_open: sum of u over measurements not yet covered.
  void dfs(double g, double u_open, int depth) {
    const int T = static_cast<int>(tracks_.size());
    if (depth == T) {
      if (g < threshold() - tol()) record(g);
      return;
    }
    // Bound and branching choice in one pass.
    double rest = u_open;
    int pick = -1;
    double pick_gap = -1.0;
    for (int d : free_) {
      if (open_[d] == 0) return;
      const double lo = rc_[cands_[d][first_[d]]];
      rest += lo;
      // Forced tracks first, then the largest gap to the runner-up.
      double gap = kInf;
      if (open_[d] > 1) {
        std::size_t i = first_[d] + 1;
        while (blocked_[cands_[d][i]]) ++i;
        gap = rc_[cands_[d][i]] - lo;
      }
      if (gap > pick_gap) {
        pick = d;
        pick_gap = gap;
      }
    }
    if (g + rest - slack(g + rest) >= threshold() - tol()) return;
    const double others = rest - rc_[cands_[pick][first_[pick]]];
    for (int l : cands_[pick]) {
      if (blocked_[l]) continue;
      if (truncated_) return;
      const double bound = g + rc_[l] + others;
      if (bound - slack(bound) >= threshold() - tol()) break;  // sorted by rc
      if (nodes_ >= node_limit_) {
        truncated_ = true;
        return;
      }
      ++nodes_;
      double u_next = u_open;
      for (int f : c_.meas[l]) u_next -= u_[f];
      if (assign(pick, l)) dfs(g + c_.cost[l], u_next, depth + 1);
      unassign(pick, l);
    }
  }

  // The relaxed bound is summed in a different order than true costs.
  static double slack(double b) { return 1e-9 * (1.0 + std::abs(b)); }

  void block(int l) {
    const int d = local_[l];
    --open_[d];
    if (pos_[l] == first_[d]) {
      const int n = static_cast<int>(cands_[d].size());
      int i = first_[d] + 1;
      while (i < n && blocked_[cands_[d][i]]) ++i;
      first_[d] = i;
    }
  }

  void unblock(int l) {
    const int d = local_[l];
    ++open_[d];
    first_[d] = std::min(first_[d], pos_[l]);
  }

  double tol() const { return 1e-12 * (1.0 + std::abs(std::isfinite(threshold()) ? threshold() : 0.0)); }

  const Compiled& c_;
  const std::vector<int>& tracks_;
  std::size_t want_;
  std::size_t node_limit_;
  double incumbent_;
  int multiplier_iters_;
  std::vector<std::vector<int>> cands_;
  std::vector<double> u_;      // per measurement
  std::vector<double> rc_;     // per leaf, cost minus u over its measurements
  double u_total_ = 0.0;
  std::vector<int> local_;
  std::vector<int> pos_;       // index of a leaf in its track's candidate list
  std::vector<int> open_;      // unblocked candidates per track
  std::vector<int> first_;     // first unblocked candidate per track
  std::vector<int> blocked_;
  std::vector<int> avail_;
  std::vector<char> covered_;
  std::vector<std::vector<int>> meas_leaves_;
  std::vector<int> assigned_;
  std::vector<int> free_;      // unassigned tracks
  std::vector<int> free_pos_;  // position in free_ (kept while assigned)
  std::vector<std::pair<std::vector<int>, double>> best_;
  std::size_t nodes_ = 0;
  bool truncated_ = false;
};

BnbOutput run_bnb(const Compiled& c, const std::vector<std::vector<int>>& candidates,
                  const std::vector<int>& tracks, std::size_t want, std::size_t node_limit,
                  double incumbent, int multiplier_iters) {
  return DepthFirstSearch(c, candidates, tracks, want, node_limit, incumbent, multiplier_iters)
      .run();
}

// Exact search that first splits the tracks into groups that share no
// candidate measurement, solves each group separately and merges the
// per-group ranked lists into the `want` best overall selections.
BnbOutput solve_exact(const Compiled& c, const std::vector<std::vector<int>>& candidates,
                      std::size_t want, std::size_t node_limit, double incumbent,
                      int multiplier_iters = kDeepMultiplierIters) {
  BnbOutput out;
  const int T = c.n_tracks;

  std::vector<int> parent(T);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> owner(c.n_meas, -1);
  for (int t = 0; t < T; ++t) {
    for (int l : candidates[t]) {
      for (int f : c.meas[l]) {
        if (owner[f] < 0) {
          owner[f] = t;
        } else {
          const int a = find(owner[f]);
          const int b = find(t);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  for (int f = 0; f < c.n_meas; ++f) {
    if (c.required[f] && owner[f] < 0) {
      out.complete = true;  // nobody can cover this measurement
      return out;
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int t = 0; t < T; ++t) groups[find(t)].push_back(t);

  std::vector<std::vector<std::pair<std::vector<int>, double>>> lists;
  out.complete = true;
  for (const auto& [root, members] : groups) {
    // A lone group can use the caller's incumbent directly.
    const double cut = groups.size() == 1 ? incumbent : kInf;
    BnbOutput r;
    if (members.size() == 1) {
      // A track alone in its group is feasible with any leaf that covers every
      // required measurement among its candidates; rank those directly.
      const int t = members.front();
      std::vector<int> need;
      for (int l : candidates[t]) {
        for (int f : c.meas[l]) {
          if (c.required[f]) need.push_back(f);
        }
      }
      std::sort(need.begin(), need.end());
      need.erase(std::unique(need.begin(), need.end()), need.end());
      std::vector<std::pair<double, int>> ok;
      for (int l : candidates[t]) {
        const auto& m = c.meas[l];
        const bool covers = std::all_of(need.begin(), need.end(), [&](int f) {
          return std::find(m.begin(), m.end(), f) != m.end();
        });
        if (covers && c.cost[l] < cut) ok.emplace_back(c.cost[l], l);
      }
      std::sort(ok.begin(), ok.end());
      if (ok.size() > want) ok.resize(want);
      r.complete = true;
      for (const auto& [cost, l] : ok) {
        std::vector<int> path(T, -1);
        path[t] = l;
        r.solutions.emplace_back(std::move(path), cost);
      }
    } else {
      r = run_bnb(c, candidates, members, want, node_limit, cut, multiplier_iters);
    }
    out.nodes += r.nodes;
    out.complete = out.complete && r.complete;
    if (r.solutions.empty()) {
      out.solutions.clear();
      return out;  // infeasible (or unresolved) group
    }
    lists.push_back(std::move(r.solutions));
  }

  // Best-first merge over index vectors; successors only advance positions
  // at or after the last advanced one, so each vector is generated once.
  const int G = static_cast<int>(lists.size());
  struct Combo {
    double cost;
    std::vector<int> idx;
    int last;
  };
  auto worse = [](const Combo& a, const Combo& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.idx > b.idx;
  };
  std::priority_queue<Combo, std::vector<Combo>, decltype(worse)> heap(worse);
  double base = 0.0;
  for (const auto& l : lists) base += l.front().second;
  heap.push({base, std::vector<int>(G, 0), 0});
  const double tol = 1e-12 * (1.0 + std::abs(incumbent));
  while (!heap.empty() && out.solutions.size() < want) {
    Combo top = heap.top();
    heap.pop();
    if (top.cost >= incumbent - tol) break;
    std::vector<int> choice(T, -1);
    for (int g = 0; g < G; ++g) {
      const auto& path = lists[g][top.idx[g]].first;
      for (int t = 0; t < T; ++t) {
        if (path[t] >= 0) choice[t] = path[t];
      }
    }
    out.solutions.emplace_back(std::move(choice), top.cost);
    for (int g = top.last; g < G; ++g) {
      if (top.idx[g] + 1 >= static_cast<int>(lists[g].size())) continue;
      Combo next = top;
      next.cost += lists[g][top.idx[g] + 1].second - lists[g][top.idx[g]].second;
      ++next.idx[g];
      next.last = g;
      heap.push(std::move(next));
    }
  }
  return out;
}

}  // namespace

double solution_cost(const MultiFrameProblem& p, const Solution& s) {
  const Compiled c = compile(p);
  return choice_cost(c, from_solution(p, c, s, true));
}

bool is_feasible(const MultiFrameProblem& p, const Solution& s) {
  const Compiled c = compile(p);
  if (s.size() != p.tracks.size()) return false;
  for (const auto& t : p.tracks) {
    auto it = s.find(t.id);
    if (it == s.end()) return false;
    if (std::none_of(t.leaves.begin(), t.leaves.end(),
                     [&](const ProblemLeaf& l) { return l.id == it->second; })) {
      return false;
    }
  }
  return choice_feasible(c, from_solution(p, c, s, true));
}

Multipliers Multipliers::zeros(const MultiFrameProblem& p) {
  std::size_t leaves = 0;
  for (const auto& t : p.tracks) leaves += t.leaves.size();
  Multipliers m;
  m.delta.assign(p.scans.size(), std::vector<double>(leaves, 0.0));
  return m;
}

double Multipliers::projection_error() const {
  if (delta.empty()) return 0.0;
  double worst = 0.0;
  for (std::size_t l = 0; l < delta.front().size(); ++l) {
    double s = 0.0;
    for (const auto& row : delta) s += row[l];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double SubproblemCosts::entry(int j, int i) const {
  const double d = detect(j, i);
  if (!std::isfinite(d)) return kInf;
  if (!std::isfinite(miss[i])) return d - kForcedSentinel;
  return d - miss[i];
}

SubproblemCosts subproblem_costs(const MultiFrameProblem& p, std::size_t scan_index,
                                 const Multipliers& delta, int horizon) {
  MSTRAJ_EXPECT(scan_index < p.scans.size(), "scan index out of range");
  MSTRAJ_EXPECT(horizon >= 1, "horizon must be positive");
  const Compiled c = compile(p);
  MSTRAJ_EXPECT(delta.delta.size() == p.scans.size() &&
                    delta.delta[scan_index].size() == static_cast<std::size_t>(c.n_leaves),
                "multiplier shape does not match the problem");
  const int s = static_cast<int>(scan_index);
  SubproblemCosts out;
  out.scan = p.scans[s].scan;
  out.detect = Eigen::MatrixXd::Constant(p.scans[s].count, c.n_tracks, kInf);
  out.miss.assign(c.n_tracks, kInf);
  for (int l = 0; l < c.n_leaves; ++l) {
    const int t = c.track_of[l];
    const double v = c.cost[l] / horizon + delta.delta[s][l];
    const int j = c.meas_at[s][l];
    if (j < 0) {
      out.miss[t] = std::min(out.miss[t], v);
    } else {
      out.detect(j, t) = std::min(out.detect(j, t), v);
    }
  }
  return out;
}

BranchAndBoundResult branch_and_bound_recover(const MultiFrameProblem& p, const Solution& fixed,
                                              const BranchAndBoundOptions& options) {
  const Compiled c = compile(p);
  const std::vector<int> pinned = from_solution(p, c, fixed, false);
  std::vector<std::vector<int>> candidates(c.n_tracks);
  for (int t = 0; t < c.n_tracks; ++t) {
    if (pinned[t] >= 0) {
      candidates[t] = {pinned[t]};
    } else {
      for (int l = c.leaf_begin[t]; l < c.leaf_begin[t + 1]; ++l) {
        if (std::isfinite(c.cost[l])) candidates[t].push_back(l);
      }
    }
  }
  const BnbOutput r = solve_exact(c, candidates, 1, options.node_limit, options.incumbent);
  BranchAndBoundResult out;
  out.exhausted = r.complete;
  out.nodes = r.nodes;
  if (!r.solutions.empty()) {
    out.solution = to_solution(p, c, r.solutions.front().first);
    out.cost = r.solutions.front().second;
  } else if (r.complete && !std::isfinite(options.incumbent)) {
    throw Infeasible("no feasible completion of the fixed assignment");
  }
  return out;
}

std::vector<std::pair<Solution, double>> enumerate_best_solutions(const MultiFrameProblem& p,
                                                                  std::size_t count,
                                                                  std::size_t node_limit) {
  const Compiled c = compile(p);
  std::vector<std::vector<int>> candidates(c.n_tracks);
  for (int t = 0; t < c.n_tracks; ++t) {
    for (int l = c.leaf_begin[t]; l < c.leaf_begin[t + 1]; ++l) {
      if (std::isfinite(c.cost[l])) candidates[t].push_back(l);
    }
  }
  const BnbOutput r = solve_exact(c, candidates, count, node_limit, kInf);
  std::vector<std::pair<Solution, double>> out;
  out.reserve(r.solutions.size());
  for (const auto& [choice, cost] : r.solutions) out.emplace_back(to_solution(p, c, choice), cost);
  return out;
}

// ---------------------------------------------------------------------------
// Dual decomposition
// ---------------------------------------------------------------------------

namespace {

struct SubSolution {
  std::vector<int> choice;  // leaf per track (free tracks only; -1 otherwise)
  double value = 0.0;
};

class DualSolver {
 public:
  DualSolver(const Compiled& c, std::vector<std::vector<int>> candidates,
             std::vector<char> required, std::vector<int> free_tracks, std::vector<int> scans)
      : c_(c),
        candidates_(std::move(candidates)),
        required_(std::move(required)),
        free_(std::move(free_tracks)),
        scans_(std::move(scans)) {}

  // Solves subproblem `si` (index into scans_) under multipliers `delta`.
  SubSolution solve(std::size_t si, const std::vector<double>& delta) const {
    const int s = scans_[si];
    const double K = static_cast<double>(scans_.size());
    SubSolution out;
    out.choice.assign(c_.n_tracks, -1);

    std::vector<int> active;              // positions in free_
    std::vector<int> act_miss_leaf;
    std::vector<double> act_miss;
    std::vector<std::unordered_map<int, std::pair<double, int>>> act_det;
    std::vector<int> meas_ids;            // local j values present
    std::unordered_map<int, int> meas_col;

    for (int t : free_) {
      double best_miss = kInf;
      int miss_leaf = -1;
      std::unordered_map<int, std::pair<double, int>> det;
      for (int l : candidates_[t]) {
        const double v = c_.cost[l] / K + delta[l];
        const int j = c_.meas_at[s][l];
        if (j < 0) {
          if (v < best_miss) {
            best_miss = v;
            miss_leaf = l;
          }
        } else {
          auto it = det.find(j);
          if (it == det.end() || v < it->second.first) det[j] = {v, l};
        }
      }
      if (det.empty()) {
        out.choice[t] = miss_leaf;
        out.value += best_miss;
        continue;
      }
      active.push_back(t);
      act_miss.push_back(best_miss);
      act_miss_leaf.push_back(miss_leaf);
      for (const auto& [j, vl] : det) {
        if (meas_col.emplace(j, static_cast<int>(meas_ids.size())).second) meas_ids.push_back(j);
      }
      act_det.push_back(std::move(det));
    }
    if (active.empty()) return out;

    const int A = static_cast<int>(active.size());
    const int M = static_cast<int>(meas_ids.size());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(A + M, M + A, kInf);
    for (int a = 0; a < A; ++a) {
      for (const auto& [j, vl] : act_det[a]) cost(a, meas_col[j]) = vl.first;
      cost(a, M + a) = act_miss[a];
    }
    for (int jj = 0; jj < M; ++jj) {
      const int f = c_.scan_offset[s] + meas_ids[jj];
      if (!required_[f]) cost(A + jj, jj) = 0.0;
      for (int a = 0; a < A; ++a) cost(A + jj, M + a) = 0.0;
    }
    const Assignment2D asg = solve_2d_assignment(cost, false);
    for (int a = 0; a < A; ++a) {
      const int col = asg.row_to_col[a];
      const int t = active[a];
      if (col >= M) {
        out.choice[t] = act_miss_leaf[a];
        out.value += act_miss[a];
      } else {
        const auto& vl = act_det[a].at(meas_ids[col]);
        out.choice[t] = vl.second;
        out.value += vl.first;
      }
    }
    return out;
  }

  [[nodiscard]] std::size_t num_scans() const { return scans_.size(); }

 private:
  const Compiled& c_;
  std::vector<std::vector<int>> candidates_;
  std::vector<char> required_;
  std::vector<int> free_;
  std::vector<int> scans_;
};

}  // namespace

SolveReport dual_decomposition_solve(const MultiFrameProblem& p, const SolverOptions& options) {
  MSTRAJ_EXPECT(!p.tracks.empty(), "empty multi-frame problem");
  const Compiled c = compile(p);
  SolveReport report;

  std::vector<std::vector<int>> candidates(c.n_tracks);
  for (int t = 0; t < c.n_tracks; ++t) {
    for (int l = c.leaf_begin[t]; l < c.leaf_begin[t + 1]; ++l) {
      if (std::isfinite(c.cost[l])) candidates[t].push_back(l);
    }
  }

  // Fix single-candidate tracks and drop leaves that collide with them.
  std::vector<char> is_fixed(c.n_tracks, 0);
  std::vector<char> fixed_used(c.n_meas, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < c.n_tracks; ++t) {
      if (candidates[t].empty()) throw SolveFailure("track without a feasible hypothesis", report);
      if (is_fixed[t] || candidates[t].size() != 1) continue;
      is_fixed[t] = 1;
      changed = true;
      for (int f : c.meas[candidates[t].front()]) {
        if (fixed_used[f]) throw SolveFailure("forced hypotheses collide", report);
        fixed_used[f] = 1;
      }
    }
    if (!changed) break;
    for (int t = 0; t < c.n_tracks; ++t) {
      if (is_fixed[t]) continue;
      const auto before = candidates[t].size();
      std::erase_if(candidates[t], [&](int l) {
        return std::any_of(c.meas[l].begin(), c.meas[l].end(), [&](int f) { return fixed_used[f]; });
      });
      if (candidates[t].size() != before) changed = true;
    }
  }

  std::vector<char> required(c.n_meas, 0);
  for (int f = 0; f < c.n_meas; ++f) required[f] = c.required[f] && !fixed_used[f];

  std::vector<int> free_tracks;
  for (int t = 0; t < c.n_tracks; ++t) {
    if (!is_fixed[t]) free_tracks.push_back(t);
  }
  std::vector<int> base_choice(c.n_tracks, -1);
  for (int t = 0; t < c.n_tracks; ++t) {
    if (is_fixed[t]) base_choice[t] = candidates[t].front();
  }

  // Subproblems only for scans that free leaves actually touch.
  std::vector<int> scans;
  {
    std::vector<char> touched(c.n_scans, 0);
    std::vector<char> coverable(c.n_meas, 0);
    for (int t : free_tracks) {
      for (int l : candidates[t]) {
        for (int f : c.meas[l]) coverable[f] = 1;
        for (int s = 0; s < c.n_scans; ++s) {
          if (c.meas_at[s][l] >= 0) touched[s] = 1;
        }
      }
    }
    for (int f = 0; f < c.n_meas; ++f) {
      if (required[f] && !coverable[f]) throw SolveFailure("measurement cannot be covered", report);
    }
    for (int s = 0; s < c.n_scans; ++s) {
      if (touched[s]) scans.push_back(s);
    }
  }

  auto finish = [&](const std::vector<int>& choice, double dual, bool certified) {
    report.solution = to_solution(p, c, choice);
    report.best_primal_cost = choice_cost(c, choice);
    report.dual_cost = dual;
    report.certified = certified;
    const double diff = std::max(0.0, report.best_primal_cost - dual);
    report.gap = diff == 0.0 ? 0.0 : diff / std::max(std::abs(report.best_primal_cost), 1e-300);
    return report;
  };

  if (scans.empty()) {
    // No shared measurement: every free track takes its cheapest leaf.
    std::vector<int> choice = base_choice;
    for (int t : free_tracks) {
      choice[t] = *std::min_element(candidates[t].begin(), candidates[t].end(), [&](int a, int b) {
        return c.cost[a] < c.cost[b];
      });
    }
    if (!choice_feasible(c, choice)) throw SolveFailure("unconstrained choice infeasible", report);
    return finish(choice, choice_cost(c, choice), true);
  }

  const double fixed_cost = [&] {
    double s = 0.0;
    for (int t = 0; t < c.n_tracks; ++t) {
      if (is_fixed[t]) s += c.cost[base_choice[t]];
    }
    return s;
  }();

  DualSolver solver(c, candidates, required, free_tracks, scans);
  const std::size_t S = scans.size();
  std::vector<std::vector<double>> delta(S, std::vector<double>(c.n_leaves, 0.0));
  std::vector<SubSolution> subs(S);
  std::vector<int> best_choice;
  double best_primal = kInf;
  double best_dual = -kInf;
  bool certified = false;

  auto consider = [&](const std::vector<int>& choice) {
    if (!choice_feasible(c, choice)) return;
    const double v = choice_cost(c, choice);
    if (v < best_primal) {
      best_primal = v;
      best_choice = choice;
    }
  };

  std::vector<double> g_norm_buf;
  for (int it = 0; it < options.max_iters; ++it) {
    report.iterations = it + 1;
    double dual = fixed_cost;
    for (std::size_t si = 0; si < S; ++si) {
      try {
        subs[si] = solver.solve(si, delta[si]);
      } catch (const Infeasible&) {
        throw SolveFailure("per-scan subproblem infeasible", report);
      }
      dual += subs[si].value;
    }
    best_dual = std::max(best_dual, dual);

    // Tracks on which every subproblem agrees.
    std::vector<int> agreed = base_choice;
    bool all_agree = true;
    for (int t : free_tracks) {
      const int l0 = subs[0].choice[t];
      bool same = true;
      for (std::size_t si = 1; si < S && same; ++si) same = subs[si].choice[t] == l0;
      if (same) {
        agreed[t] = l0;
      } else {
        all_agree = false;
      }
    }

    if (all_agree) {
      consider(agreed);
      if (!best_choice.empty() && best_primal <= dual + 1e-9 * std::max(1.0, std::abs(dual))) {
        certified = true;
      }
    } else {
      for (const auto& sub : subs) {
        std::vector<int> choice = base_choice;
        for (int t : free_tracks) choice[t] = sub.choice[t];
        consider(choice);
      }
      // Branch and bound over the disagreeing tracks with the rest pinned.
      {
        std::vector<std::vector<int>> cand(c.n_tracks);
        for (int t = 0; t < c.n_tracks; ++t) {
          cand[t] = agreed[t] >= 0 ? std::vector<int>{agreed[t]} : candidates[t];
        }
        const BnbOutput r = solve_exact(c, cand, 1, options.recovery_node_limit, best_primal,
                                        kQuickMultiplierIters);
        if (!r.solutions.empty()) consider(r.solutions.front().first);
      }
    }

    IterationTrace tr;
    tr.dual = dual;
    tr.best_primal = best_primal;

    const double abs_gap = best_primal - best_dual;
    if (!certified && std::isfinite(best_primal) &&
        abs_gap <= 1e-9 * std::max(1.0, std::abs(best_primal))) {
      certified = true;
    }
    if (certified) {
      report.trace.push_back(tr);
      break;
    }
    if (std::isfinite(best_primal) && abs_gap / std::max(std::abs(best_primal), 1e-300) < options.gap_tol) {
      report.trace.push_back(tr);
      break;
    }

    // Projected subgradient g_s = rho_s - mean_s' rho_s'.
    std::unordered_map<int, double> counts;
    for (const auto& sub : subs) {
      for (int t : free_tracks) counts[sub.choice[t]] += 1.0;
    }
    double norm2 = 0.0;
    for (std::size_t si = 0; si < S; ++si) {
      std::unordered_map<int, double> g;
      for (const auto& [l, n] : counts) g[l] = -n / static_cast<double>(S);
      for (int t : free_tracks) g[subs[si].choice[t]] += 1.0;
      for (const auto& [l, v] : g) norm2 += v * v;
    }
    if (norm2 <= 0.0) {
      report.trace.push_back(tr);
      break;
    }
    const double target = std::isfinite(best_primal)
                              ? best_primal
                              : dual + 0.05 * std::abs(dual) + 1e-3;
    const double alpha = std::max(0.0, target - dual) / norm2;
    tr.step = alpha;
    for (std::size_t si = 0; si < S; ++si) {
      for (const auto& [l, n] : counts) delta[si][l] -= alpha * n / static_cast<double>(S);
      for (int t : free_tracks) delta[si][subs[si].choice[t]] += alpha;
    }
    // Re-projection onto sum_s delta = 0 to remove rounding drift.
    double proj_err = 0.0;
    for (const auto& [l, n] : counts) {
      double s = 0.0;
      for (std::size_t si = 0; si < S; ++si) s += delta[si][l];
      const double mean = s / static_cast<double>(S);
      for (std::size_t si = 0; si < S; ++si) delta[si][l] -= mean;
      double s2 = 0.0;
      for (std::size_t si = 0; si < S; ++si) s2 += delta[si][l];
      proj_err = std::max(proj_err, std::abs(s2));
    }
    tr.projection_error = proj_err;
    report.trace.push_back(tr);
  }

  if (!certified) {
    // Exact search seeded with the incumbent; proves optimality when it
    // finishes inside the node budget.
    std::vector<std::vector<int>> cand(c.n_tracks);
    for (int t = 0; t < c.n_tracks; ++t) {
      cand[t] = is_fixed[t] ? std::vector<int>{base_choice[t]} : candidates[t];
    }
    const BnbOutput r = solve_exact(c, cand, 1, options.polish_node_limit, best_primal);
    if (!r.solutions.empty()) consider(r.solutions.front().first);
    if (r.complete) certified = true;
  }

  if (best_choice.empty()) throw SolveFailure("no feasible primal solution found", report);
  return finish(best_choice, best_dual, certified);
}

}  // namespace mstraj
