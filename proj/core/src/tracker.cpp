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

#include "mstraj/tracker.hpp"

namespace mstraj {

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) {
  MSTRAJ_EXPECT(config_.settings.n_scan >= 0, "N must be non-negative");
  MSTRAJ_EXPECT(config_.settings.traj.l_cap >= 1, "L-scan window must be positive");
  config_.birth.validate();
  const bool poisson = config_.birth.kind == BirthKind::kPoisson;
  if ((config_.filter == FilterKind::kPmbm) != poisson) {
    throw ModelMismatch("birth model kind does not match the filter");
  }
  if (config_.filter == FilterKind::kPmbm) {
    pmbm_.emplace();
  } else {
    mbm_.emplace();
    mbm_->mode = config_.filter == FilterKind::kMbm ? MbmMode::kMbm : MbmMode::kMbm01;
  }
}

const HypothesisForest& Tracker::forest() const { return pmbm_ ? pmbm_->forest : mbm_->forest; }

const PoissonIntensity* Tracker::undetected() const { return pmbm_ ? &pmbm_->undetected : nullptr; }

ScanOutput Tracker::step(const std::vector<Vec2>& scan) {
  const auto& s = config_.settings;
  switch (config_.filter) {
    case FilterKind::kPmbm:
      *pmbm_ = pmbm_predict(std::move(*pmbm_), config_.motion, config_.birth, s);
      *pmbm_ = pmbm_update(std::move(*pmbm_), scan, config_.meas, s);
      break;
    case FilterKind::kMbm:
      *mbm_ = mbm_predict(std::move(*mbm_), config_.motion, config_.birth, s);
      *mbm_ = mbm_update(std::move(*mbm_), scan, config_.meas, s);
      break;
    case FilterKind::kMbm01:
      *mbm_ = mbm01_predict(std::move(*mbm_), config_.motion, config_.birth, s);
      *mbm_ = mbm01_update(std::move(*mbm_), scan, config_.meas, s);
      break;
  }
  HypothesisForest& f = pmbm_ ? pmbm_->forest : mbm_->forest;
  const int k = f.time;
  const bool eq = equality_mode();

  ScanOutput out;
  out.k = k;
  if (!f.tracks.empty()) {
    const MultiFrameProblem problem = build_multiframe_problem(f, k, s.n_scan, eq);
    out.solve = dual_decomposition_solve(problem, config_.solver);
    GlobalHypothesis a_star;
    a_star.choice = out.solve.solution;
    n_scan_prune(f, a_star, s.n_scan, k);
  }
  delete_resolved_tracks(f, s.n_scan, k, s.r_delete);
  normalize_track_weights(f);
  fixed_lag_smooth(f, s.traj.l_cap);
  materialize_globals(f, eq, config_.global_cap);
  out.estimates = extract_estimates(f, f.best());
  return out;
}

}  // namespace mstraj
