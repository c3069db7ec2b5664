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

#include "mstraj/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "mstraj/assignment.hpp"

namespace mstraj {

GospaResult gospa(const std::vector<Vec2>& estimates, const std::vector<Vec2>& truth,
                  const GospaParams& params) {
  MSTRAJ_EXPECT(params.alpha == 2.0, "GOSPA decomposition needs alpha = 2");
  MSTRAJ_EXPECT(params.p >= 1.0 && params.c > 0.0, "GOSPA needs p >= 1 and c > 0");
  const double cp = std::pow(params.c, params.p);
  const bool truth_rows = truth.size() <= estimates.size();
  const auto& rows = truth_rows ? truth : estimates;
  const auto& cols = truth_rows ? estimates : truth;

  double loc = 0.0;
  int pairs = 0;
  if (!rows.empty()) {
    Eigen::MatrixXd cost(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        cost(i, j) = std::min(std::pow((rows[i] - cols[j]).norm(), params.p), cp);
      }
    }
    const Assignment2D a = solve_2d_assignment(cost, false);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int j = a.row_to_col[i];
      if (j < 0) continue;
      const double d = (rows[i] - cols[j]).norm();
      if (d < params.c) {
        loc += std::pow(d, params.p);
        ++pairs;
      }
    }
  }
  GospaResult r;
  r.n_missed = static_cast<int>(truth.size()) - pairs;
  r.n_false = static_cast<int>(estimates.size()) - pairs;
  const double miss_p = r.n_missed * cp / params.alpha;
  const double false_p = r.n_false * cp / params.alpha;
  r.localization = std::pow(loc, 1.0 / params.p);
  r.missed = std::pow(miss_p, 1.0 / params.p);
  r.false_ = std::pow(false_p, 1.0 / params.p);
  r.total = std::pow(loc + miss_p + false_p, 1.0 / params.p);
  return r;
}

namespace {

std::optional<Vec2> position_at(const TrajectoryEstimate& e, int t) {
  if (t < e.beta || t > e.eps) return std::nullopt;
  const int idx = t - e.beta;
  if (idx >= static_cast<int>(e.means.size())) return std::nullopt;
  return position(e.means[idx]);
}

struct Totals {
  double loc = 0.0;
  double miss = 0.0;
  double fals = 0.0;
  double sw = 0.0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Pair {
  int i;  // truth index (global)
  int j;  // estimate index (global)
};

// Exact optimum for one interacting group over times t0..t1.
void solve_group(const std::vector<TrajectoryEstimate>& est,
                 const std::vector<TrajectoryEstimate>& truth, const std::vector<int>& xs,
                 const std::vector<int>& ys, const std::vector<Pair>& pairs, int t0, int t1,
                 const TrajMetricParams& prm, Totals& acc) {
  const double cp = std::pow(prm.c, prm.p);
  const double half = cp / 2.0;
  const double w = std::pow(prm.gamma, prm.p) / 2.0;
  const int P = static_cast<int>(pairs.size());
  if (P > 64) throw CapabilityError("too many candidate pairs in one trajectory group");

  // Enumerate partial matchings restricted to candidate pairs.
  if (xs.size() > 64 || ys.size() > 64) throw CapabilityError("trajectory group too large");
  std::vector<Pair> local = pairs;  // group-local indices
  for (auto& pr : local) {
    pr.i = static_cast<int>(std::find(xs.begin(), xs.end(), pr.i) - xs.begin());
    pr.j = static_cast<int>(std::find(ys.begin(), ys.end(), pr.j) - ys.begin());
  }
  std::vector<std::uint64_t> states;
  std::function<void(int, std::uint64_t, std::uint64_t, std::uint64_t)> rec =
      [&](int p, std::uint64_t mask, std::uint64_t used_x, std::uint64_t used_y) {
        if (states.size() > prm.max_states) return;
        if (p == P) {
          states.push_back(mask);
          return;
        }
        rec(p + 1, mask, used_x, used_y);
        const std::uint64_t bx = 1ULL << local[p].i;
        const std::uint64_t by = 1ULL << local[p].j;
        if (!(used_x & bx) && !(used_y & by)) {
          rec(p + 1, mask | (1ULL << p), used_x | bx, used_y | by);
        }
      };
  rec(0, 0, 0, 0);
  if (states.size() > prm.max_states) {
    throw CapabilityError("trajectory metric group exceeds the exact assignment limit");
  }
  std::stable_sort(states.begin(), states.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  const int S = static_cast<int>(states.size());
  std::unordered_map<std::uint64_t, int> index;
  for (int s = 0; s < S; ++s) index.emplace(states[s], s);
  std::vector<std::vector<int>> subsets(S);  // states reachable by removing one pair
  for (int s = 0; s < S; ++s) {
    for (std::uint64_t m = states[s]; m != 0; m &= m - 1) {
      const std::uint64_t bit = m & (~m + 1);
      subsets[s].push_back(index.at(states[s] ^ bit));
    }
  }

  const int T = t1 - t0 + 1;
  auto pair_cost = [&](const Pair& pr, int t, double& delta) {
    const auto x = position_at(truth[pr.i], t);
    const auto y = position_at(est[pr.j], t);
    double assigned = 0.0;
    if (x && y) {
      assigned = std::min(std::pow((*x - *y).norm(), prm.p), cp);
    } else if (x || y) {
      assigned = half;
    }
    delta = assigned - (x ? half : 0.0) - (y ? half : 0.0);
  };

  std::vector<double> delta(static_cast<std::size_t>(P) * T);
  for (int p = 0; p < P; ++p) {
    for (int t = 0; t < T; ++t) pair_cost(pairs[p], t0 + t, delta[p * T + t]);
  }
  auto state_cost = [&](int s, int t) {
    double v = 0.0;
    for (std::uint64_t m = states[s]; m != 0; m &= m - 1) {
      v += delta[std::countr_zero(m) * T + t];
    }
    return v;
  };

  std::vector<double> D(S), E(S), F(S);
  std::vector<int> Eo(S), Fo(S);
  std::vector<std::vector<int>> pred(T, std::vector<int>(S, -1));
  for (int s = 0; s < S; ++s) D[s] = state_cost(s, 0);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      E[s] = D[s];
      Eo[s] = s;
    }
    for (int s = S - 1; s >= 0; --s) {
      for (int sub : subsets[s]) {
        if (E[s] + w < E[sub]) {
          E[sub] = E[s] + w;
          Eo[sub] = Eo[s];
        }
      }
    }
    for (int s = 0; s < S; ++s) {
      F[s] = E[s];
      Fo[s] = Eo[s];
      for (int sub : subsets[s]) {
        if (F[sub] + w < F[s]) {
          F[s] = F[sub] + w;
          Fo[s] = Fo[sub];
        }
      }
    }
    for (int s = 0; s < S; ++s) {
      D[s] = state_cost(s, t) + F[s];
      pred[t][s] = Fo[s];
    }
  }
  int cur = static_cast<int>(std::min_element(D.begin(), D.end()) - D.begin());
  std::vector<int> path(T);
  for (int t = T - 1; t >= 0; --t) {
    path[t] = cur;
    if (t > 0) cur = pred[t][cur];
  }

  for (int t = 0; t < T; ++t) {
    const int tt = t0 + t;
    const std::uint64_t m = states[path[t]];
    for (int p = 0; p < P; ++p) {
      if (!(m & (1ULL << p))) continue;
      const auto x = position_at(truth[pairs[p].i], tt);
      const auto y = position_at(est[pairs[p].j], tt);
      if (x && y) {
        const double d = (*x - *y).norm();
        if (d < prm.c) {
          acc.loc += std::pow(d, prm.p);
        } else {
          acc.miss += half;
          acc.fals += half;
        }
      } else if (x) {
        acc.miss += half;
      } else if (y) {
        acc.fals += half;
      }
    }
    for (int i : xs) {
      bool matched = false;
      for (int p = 0; p < P; ++p) matched |= (m & (1ULL << p)) && pairs[p].i == i;
      if (!matched && position_at(truth[i], tt)) acc.miss += half;
    }
    for (int j : ys) {
      bool matched = false;
      for (int p = 0; p < P; ++p) matched |= (m & (1ULL << p)) && pairs[p].j == j;
      if (!matched && position_at(est[j], tt)) acc.fals += half;
    }
    if (t > 0) acc.sw += w * std::popcount(states[path[t]] ^ states[path[t - 1]]);
  }
}

}  // namespace

TrajMetricResult lp_trajectory_metric(const std::vector<TrajectoryEstimate>& estimates,
                                      const std::vector<TrajectoryEstimate>& truth, int k,
                                      const TrajMetricParams& params) {
  MSTRAJ_EXPECT(k >= 1, "evaluation time must be positive");
  MSTRAJ_EXPECT(params.p >= 1.0 && params.c > 0.0 && params.gamma > 0.0,
                "trajectory metric needs p >= 1, c > 0, gamma > 0");
  const int nx = static_cast<int>(truth.size());
  const int ny = static_cast<int>(estimates.size());
  for (const auto& e : estimates) {
    MSTRAJ_EXPECT(static_cast<int>(e.means.size()) == e.eps - e.beta + 1, "estimate length mismatch");
  }
  for (const auto& e : truth) {
    MSTRAJ_EXPECT(static_cast<int>(e.means.size()) == e.eps - e.beta + 1, "truth length mismatch");
  }
  auto span = [k](const TrajectoryEstimate& e) {
    return std::pair<int, int>{std::max(1, e.beta), std::min(k, e.eps)};
  };

  // Only pairs that are ever present together within c can lower the cost.
  std::vector<Pair> linked;
  UnionFind uf(nx + ny);
  for (int i = 0; i < nx; ++i) {
    const auto [a0, a1] = span(truth[i]);
    for (int j = 0; j < ny; ++j) {
      const auto [b0, b1] = span(estimates[j]);
      for (int t = std::max(a0, b0); t <= std::min(a1, b1); ++t) {
        const double d = (position(truth[i].means[t - truth[i].beta]) -
                          position(estimates[j].means[t - estimates[j].beta])).norm();
        if (d < params.c) {
          linked.push_back({i, j});
          uf.unite(i, nx + j);
          break;
        }
      }
    }
  }

  Totals acc;
  const double half = std::pow(params.c, params.p) / 2.0;
  std::unordered_map<std::size_t, std::vector<int>> groups;
  for (int n = 0; n < nx + ny; ++n) groups[uf.find(n)].push_back(n);
  std::vector<std::size_t> roots;
  for (const auto& [root, members] : groups) roots.push_back(root);
  std::sort(roots.begin(), roots.end());
  for (std::size_t root : roots) {
    const auto& members = groups[root];
    std::vector<int> xs, ys;
    int t0 = k + 1, t1 = 0;
    for (int n : members) {
      const auto& e = n < nx ? truth[n] : estimates[n - nx];
      const auto [a, b] = span(e);
      if (a <= b) {
        t0 = std::min(t0, a);
        t1 = std::max(t1, b);
      }
      (n < nx ? xs : ys).push_back(n < nx ? n : n - nx);
    }
    if (t0 > t1) continue;
    if (xs.empty() || ys.empty()) {
      for (int i : xs) {
        const auto [a, b] = span(truth[i]);
        acc.miss += half * std::max(0, b - a + 1);
      }
      for (int j : ys) {
        const auto [a, b] = span(estimates[j]);
        acc.fals += half * std::max(0, b - a + 1);
      }
      continue;
    }
    std::vector<Pair> pairs;
    for (const auto& pr : linked) {
      if (uf.find(pr.i) == root) pairs.push_back(pr);
    }
    solve_group(estimates, truth, xs, ys, pairs, t0, t1, params, acc);
  }

  const double inv = 1.0 / params.p;
  const double norm = std::sqrt(static_cast<double>(k));
  TrajMetricResult r;
  r.localization = std::pow(acc.loc, inv) / norm;
  r.missed = std::pow(acc.miss, inv) / norm;
  r.false_ = std::pow(acc.fals, inv) / norm;
  r.switch_ = std::pow(acc.sw, inv) / norm;
  r.total = std::pow(acc.loc + acc.miss + acc.fals + acc.sw, inv) / norm;
  return r;
}

}  // namespace mstraj
