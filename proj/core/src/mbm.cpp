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

#include "mstraj/mbm.hpp"

#include <cmath>

#include "filter_internal.hpp"

namespace mstraj {

namespace {

void require_mode(const MbmPosterior& p, MbmMode mode) {
  MSTRAJ_EXPECT(p.mode == mode, "posterior mode does not match the recursion");
}

void require_multi_bernoulli(const BirthModel& birth) {
  if (birth.kind != BirthKind::kMultiBernoulli) {
    throw ModelMismatch("MBM filters need a multi-Bernoulli birth model");
  }
  birth.validate();
}

void require_binary(const HypothesisForest& f) {
  for (const auto& t : f.tracks) {
    for (const auto& l : t.hyps) {
      MSTRAJ_EXPECT(!l.bern || l.bern->r == 1.0, "MBM01 hypotheses must have r in {0, 1}");
    }
  }
}

}  // namespace

MbmPosterior mbm_predict(MbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                         const FilterSettings& s) {
  require_mode(p, MbmMode::kMbm);
  require_multi_bernoulli(birth);
  const int k = p.forest.time + 1;
  detail::predict_leaves(p.forest, motion, k, s);
  for (const auto& b : birth.components) {
    Track t;
    t.id = p.forest.new_track_id();
    t.created_at = k;
    LocalHypothesis h;
    h.id = p.forest.new_hyp_id();
    h.bern = make_bernoulli(b.weight, make_trajectory(k, b.mean, b.cov));
    t.hyps.push_back(std::move(h));
    p.forest.tracks.push_back(std::move(t));
  }
  return p;
}

MbmPosterior mbm_update(MbmPosterior p, const std::vector<Vec2>& scan,
                        const MeasurementModel& meas, const FilterSettings& s) {
  require_mode(p, MbmMode::kMbm);
  const int k = p.forest.time + 1;
  detail::update_leaves(p.forest, scan, meas, k, s);
  detail::close_scan(p.forest, k, static_cast<int>(scan.size()));
  return p;
}

MbmPosterior mbm01_predict(MbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                           const FilterSettings& s) {
  require_mode(p, MbmMode::kMbm01);
  require_multi_bernoulli(birth);
  require_binary(p.forest);
  const int k = p.forest.time + 1;

  if (s.variant == Variant::kAll) {
    detail::predict_leaves(p.forest, motion, k, s);
  } else {
    for (auto& t : p.forest.tracks) {
      std::vector<LocalHypothesis> next;
      next.reserve(t.hyps.size() * 2);
      for (auto& l : t.hyps) {
        if (!l.bern) {
          next.push_back(std::move(l));  // already dead: weight kept
          continue;
        }
        auto child = [&](double factor) {
          LocalHypothesis c;
          c.id = p.forest.new_hyp_id();
          c.parent = l.id;
          c.log_w = l.log_w + std::log(factor);
          c.assoc = l.assoc;
          c.lineage = l.lineage;
          return c;
        };
        if (motion.ps > 0.0) {
          LocalHypothesis alive = child(motion.ps);
          alive.bern = predict_current(*l.bern, motion, s.traj);
          alive.bern->r = 1.0;
          next.push_back(std::move(alive));
        }
        if (motion.ps < 1.0) next.push_back(child(1.0 - motion.ps));
      }
      t.hyps = std::move(next);
    }
  }

  for (const auto& b : birth.components) {
    Track t;
    t.id = p.forest.new_track_id();
    t.created_at = k;
    if (b.weight > 0.0) {
      LocalHypothesis born;
      born.id = p.forest.new_hyp_id();
      born.log_w = std::log(b.weight);
      born.bern = make_bernoulli(1.0, make_trajectory(k, b.mean, b.cov));
      t.hyps.push_back(std::move(born));
    }
    if (b.weight < 1.0) {
      LocalHypothesis unborn;
      unborn.id = p.forest.new_hyp_id();
      unborn.log_w = std::log1p(-b.weight);
      t.hyps.push_back(std::move(unborn));
    }
    p.forest.tracks.push_back(std::move(t));
  }
  return p;
}

MbmPosterior mbm01_update(MbmPosterior p, const std::vector<Vec2>& scan,
                          const MeasurementModel& meas, const FilterSettings& s) {
  require_mode(p, MbmMode::kMbm01);
  require_binary(p.forest);
  const int k = p.forest.time + 1;
  detail::update_leaves(p.forest, scan, meas, k, s);
  detail::close_scan(p.forest, k, static_cast<int>(scan.size()));
  return p;
}

}  // namespace mstraj
