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

#include <cmath>

#include "filter_internal.hpp"

namespace mstraj::detail {

void predict_leaves(HypothesisForest& f, const MotionModel& motion, int k,
                    const FilterSettings& s) {
  for (auto& t : f.tracks) {
    for (auto& l : t.hyps) {
      if (!l.bern) continue;
      l.bern = s.variant == Variant::kCurrent ? predict_current(*l.bern, motion, s.traj)
                                              : predict_all(*l.bern, motion, k, s.traj);
    }
  }
}

std::vector<char> update_leaves(HypothesisForest& f, const std::vector<Vec2>& scan,
                                const MeasurementModel& meas, int k, const FilterSettings& s) {
  const double gate = chi_square_quantile(s.gate_prob, 2);
  std::vector<char> claimed(scan.size(), 0);
  for (auto& t : f.tracks) {
    std::vector<LocalHypothesis> children;
    children.reserve(t.hyps.size() * 2);
    for (auto& l : t.hyps) {
      auto child = [&](double delta) {
        LocalHypothesis c;
        c.id = f.new_hyp_id();
        c.parent = l.id;
        c.log_w = l.log_w + delta;
        c.assoc = l.assoc;
        c.lineage = l.lineage;
        return c;
      };
      if (!l.bern) {
        children.push_back(child(0.0));
        continue;
      }
      BernoulliUpdate miss = update_miss(*l.bern, meas, k, s.traj);
      if (std::isfinite(miss.log_weight_delta)) {
        LocalHypothesis c = child(miss.log_weight_delta);
        c.bern = std::move(miss.bern);
        children.push_back(std::move(c));
      }
      if (l.bern->r < s.r_update_min || !(l.bern->r > 0.0) || !(meas.pd > 0.0)) continue;
      for (std::size_t j = 0; j < scan.size(); ++j) {
        if (!gate_bernoulli(*l.bern, scan[j], meas, k, gate)) continue;
        BernoulliUpdate det = update_detect(*l.bern, scan[j], meas, k, s.traj);
        if (!std::isfinite(det.log_weight_delta)) continue;
        LocalHypothesis c = child(det.log_weight_delta);
        c.bern = std::move(det.bern);
        c.assoc.push_back({k, static_cast<int>(j)});
        children.push_back(std::move(c));
        claimed[j] = 1;
      }
    }
    MSTRAJ_EXPECT(!children.empty(), "track lost every hypothesis during update");
    t.hyps = std::move(children);
  }
  return claimed;
}

void close_scan(HypothesisForest& f, int k, int count) {
  for (auto& t : f.tracks) {
    for (auto& l : t.hyps) l.lineage.push_back(l.id);
  }
  f.ledger.add_scan(k, count);
  f.time = k;
}

}  // namespace mstraj::detail
