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

#include "mstraj/smoothing.hpp"

#include <algorithm>

namespace mstraj {

int map_cardinality(const std::vector<double>& rs) {
  std::vector<double> pmf{1.0};
  for (double r : rs) {
    MSTRAJ_EXPECT(r >= 0.0 && r <= 1.0, "existence probability outside [0, 1]");
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      next[n] += pmf[n] * (1.0 - r);
      next[n + 1] += pmf[n] * r;
    }
    pmf = std::move(next);
  }
  int best = 0;
  for (std::size_t n = 1; n < pmf.size(); ++n) {
    if (pmf[n] >= pmf[best]) best = static_cast<int>(n);
  }
  return best;
}

std::vector<TrajectoryEstimate> extract_estimates(const HypothesisForest& f,
                                                  const GlobalHypothesis& a_star) {
  struct Pick {
    TrackId track;
    const BernoulliTrajectory* bern;
  };
  std::vector<Pick> picks;
  for (const auto& [tid, hid] : a_star.choice) {
    const LocalHypothesis& l = f.leaf(tid, hid);
    if (l.bern && l.bern->r > 0.0 && !l.bern->mix.components.empty()) {
      picks.push_back({tid, &*l.bern});
    }
  }
  std::vector<double> rs;
  rs.reserve(picks.size());
  for (const auto& p : picks) rs.push_back(p.bern->r);
  const int n = map_cardinality(rs);
  std::stable_sort(picks.begin(), picks.end(),
                   [](const Pick& a, const Pick& b) { return a.bern->r > b.bern->r; });

  std::vector<TrajectoryEstimate> out;
  for (int i = 0; i < n; ++i) {
    const auto& c = picks[i].bern->mix.heaviest();
    TrajectoryEstimate e;
    e.track = picks[i].track;
    e.beta = c.traj.beta;
    e.eps = c.traj.eps;
    e.means = c.traj.mean_sequence();
    out.push_back(std::move(e));
  }
  return out;
}

void fixed_lag_smooth(HypothesisForest& f, int l_cap) {
  for (auto& t : f.tracks) {
    for (auto& l : t.hyps) {
      if (!l.bern) continue;
      for (auto& c : l.bern->mix.components) {
        if (c.traj.window() > l_cap) c.traj = lscan_truncate(std::move(c.traj), l_cap);
      }
    }
  }
}

}  // namespace mstraj
