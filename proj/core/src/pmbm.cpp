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

#include "mstraj/pmbm.hpp"

#include <algorithm>
#include <cmath>

#include "filter_internal.hpp"

namespace mstraj {

double PoissonIntensity::total_mass() const {
  double s = 0.0;
  for (const auto& c : components) s += c.w;
  return s;
}

PmbmPosterior pmbm_predict(PmbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                           const FilterSettings& s) {
  if (birth.kind != BirthKind::kPoisson) throw ModelMismatch("PMBM needs a Poisson birth model");
  birth.validate();
  const int k = p.forest.time + 1;
  for (auto& c : p.undetected.components) {
    c.w *= motion.ps;
    c.traj = lscan_truncate(extend_trajectory(c.traj, motion), s.traj.l_cap);
  }
  for (const auto& b : birth.components) {
    p.undetected.components.push_back({b.weight, make_trajectory(k, b.mean, b.cov)});
  }
  detail::predict_leaves(p.forest, motion, k, s);
  return p;
}

namespace {

struct UpdatedComponent {
  double e = 0.0;  // pd w l
  TrajectoryGaussian traj;
};

// Moment-matched trajectory of updated components sharing one birth time.
TrajectoryGaussian moment_match(const std::vector<UpdatedComponent>& comps) {
  if (comps.size() == 1) return comps.front().traj;
  double total = 0.0;
  for (const auto& c : comps) total += c.e;
  TrajectoryGaussian out = comps.front().traj;
  out.joint.mean.setZero();
  for (auto& m : out.frozen_means) m.setZero();
  for (const auto& c : comps) {
    const double a = c.e / total;
    out.joint.mean += a * c.traj.joint.mean;
    for (std::size_t i = 0; i < out.frozen_means.size(); ++i) {
      out.frozen_means[i] += a * c.traj.frozen_means[i];
    }
  }
  out.joint.cov.setZero();
  for (const auto& c : comps) {
    const double a = c.e / total;
    const Eigen::VectorXd d = c.traj.joint.mean - out.joint.mean;
    out.joint.cov += a * (c.traj.joint.cov + d * d.transpose());
  }
  symmetrize(out.joint.cov);
  return out;
}

}  // namespace

PmbmPosterior pmbm_update(PmbmPosterior p, const std::vector<Vec2>& scan,
                          const MeasurementModel& meas, const FilterSettings& s) {
  const double lambda_fa = meas.clutter_density();
  MSTRAJ_EXPECT(lambda_fa > 0.0, "PMBM update needs a positive clutter intensity");
  const int k = p.forest.time + 1;
  const double gate = chi_square_quantile(s.gate_prob, 2);

  const std::vector<char> claimed = detail::update_leaves(p.forest, scan, meas, k, s);

  for (std::size_t j = 0; j < scan.size(); ++j) {
    std::vector<UpdatedComponent> upd;
    double e = 0.0;
    for (const auto& c : p.undetected.components) {
      if (!(c.w > 0.0)) continue;
      const auto pred = predict_measurement(c.traj.last_mean(), c.traj.last_cov(), meas);
      if (mahalanobis_squared(scan[j], pred) > gate) continue;
      KalmanUpdate ku = kalman_update(c.traj.joint, scan[j], meas);
      UpdatedComponent u;
      u.e = meas.pd * c.w * ku.likelihood;
      u.traj = c.traj;
      u.traj.joint = std::move(ku.state);
      e += u.e;
      upd.push_back(std::move(u));
    }

    Track t;
    t.id = p.forest.new_track_id();
    t.created_at = k;
    LocalHypothesis own;
    own.id = p.forest.new_hyp_id();
    own.assoc.push_back({k, static_cast<int>(j)});
    if (e > 0.0) {
      const auto lead = std::max_element(upd.begin(), upd.end(),
                                         [](const UpdatedComponent& a, const UpdatedComponent& b) {
                                           return a.e < b.e;
                                         });
      const int beta = lead->traj.beta;
      std::vector<UpdatedComponent> same;
      for (auto& u : upd) {
        if (u.traj.beta == beta) same.push_back(std::move(u));
      }
      own.bern = make_bernoulli(e / (lambda_fa + e), moment_match(same));
      own.log_w = std::log(lambda_fa + e) - std::log(lambda_fa);
    }
    // Otherwise the measurement can only be clutter: no Bernoulli, weight 1.
    t.hyps.push_back(std::move(own));
    if (claimed[j]) {
      // The measurement may instead belong to an existing track.
      t.hyps.emplace_back().id = p.forest.new_hyp_id();
    }
    p.forest.tracks.push_back(std::move(t));
  }

  for (auto& c : p.undetected.components) c.w *= (1.0 - meas.pd);
  std::erase_if(p.undetected.components,
                [&](const PoissonComponent& c) { return c.w < s.poisson_prune; });

  detail::close_scan(p.forest, k, static_cast<int>(scan.size()));
  return p;
}

}  // namespace mstraj
