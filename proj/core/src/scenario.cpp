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

#include "mstraj/scenario.hpp"

#include <algorithm>
#include <array>

namespace mstraj {

std::vector<Vec2> GroundTruth::positions(int t) const {
  std::vector<Vec2> out;
  for (const auto& tr : trajectories) {
    if (tr.alive(t)) out.push_back({tr.at(t)[0], tr.at(t)[2]});
  }
  return out;
}

std::vector<TrajectoryEstimate> GroundTruth::as_trajectories(int k, Variant variant) const {
  std::vector<TrajectoryEstimate> out;
  TrackId id = 0;
  for (const auto& tr : trajectories) {
    ++id;
    if (tr.birth > k) continue;
    if (variant == Variant::kCurrent && !tr.alive(k)) continue;
    TrajectoryEstimate e;
    e.track = id;
    e.beta = tr.birth;
    e.eps = std::min(tr.death, k);
    e.means.assign(tr.states.begin(), tr.states.begin() + (e.eps - e.beta + 1));
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

const std::array<Vec4, 4> kCorners = {Vec4(50, 0, 50, 0), Vec4(50, 0, -50, 0),
                                      Vec4(-50, 0, 50, 0), Vec4(-50, 0, -50, 0)};
constexpr std::array<int, 4> kBirths = {1, 11, 21, 31};
constexpr std::array<int, 4> kDeaths = {51, 61, 71, 81};

Mat4 birth_cov_s1() { return Vec4(4, 1, 4, 1).asDiagonal(); }

ScenarioModels common_models() {
  ScenarioModels m;
  m.motion = MotionModel::constant_velocity(1.0, 0.01, 0.99);
  m.meas = MeasurementModel::position_sensor(1.0, 0.9, 10.0);
  m.poisson_birth.kind = BirthKind::kPoisson;
  m.bernoulli_birth.kind = BirthKind::kMultiBernoulli;
  return m;
}

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vec4 sample_gaussian(const Vec4& mean, const Mat4& cov, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vec4 u;
  for (int i = 0; i < 4; ++i) u[i] = n01(rng);
  const Mat4 L = cov.llt().matrixL();
  return mean + L * u;
}

}  // namespace

ScenarioModels scenario1_models() {
  ScenarioModels m = common_models();
  for (const auto& c : kCorners) {
    m.poisson_birth.components.push_back({0.05, c, birth_cov_s1()});
    m.bernoulli_birth.components.push_back({0.05, c, birth_cov_s1()});
  }
  return m;
}

ScenarioModels scenario2_models() {
  ScenarioModels m = common_models();
  const Mat4 cov = Vec4(1e4, 1, 1e4, 1).asDiagonal();
  m.poisson_birth.components.push_back({0.05, Vec4::Zero(), cov});
  m.bernoulli_birth.components.push_back({0.05, Vec4::Zero(), cov});
  return m;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  std::uint64_t x = seed;
  std::uint64_t h = splitmix64(x);
  x = h ^ run;
  h = splitmix64(x);
  x = h ^ (stream * 0xD1B54A32D192ED03ULL);
  h = splitmix64(x);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

GroundTruth generate_scenario1(std::uint64_t seed, const MotionModel& motion) {
  auto rng = make_rng(seed, 0, kTruthStream);
  const Mat4 Lq = motion.Q.llt().matrixL();
  std::normal_distribution<double> n01;
  GroundTruth gt;
  for (int i = 0; i < 12; ++i) {
    const int b = i / 3;
    TruthTrajectory tr;
    tr.birth = kBirths[b];
    tr.death = kDeaths[b];
    // Each birth time uses three of the four corners, rotating the unused one.
    const Vec4& corner = kCorners[(i % 3 + b) % 4];
    Vec4 x = sample_gaussian(corner, birth_cov_s1(), rng);
    for (int t = tr.birth; t <= tr.death; ++t) {
      if (t > tr.birth) {
        Vec4 u;
        for (int d = 0; d < 4; ++d) u[d] = n01(rng);
        x = motion.F * x + Lq * u;
      }
      tr.states.push_back(x);
    }
    gt.trajectories.push_back(std::move(tr));
  }
  return gt;
}

GroundTruth generate_scenario2(std::uint64_t seed, std::uint64_t run, const MotionModel& motion,
                               int steps) {
  auto rng = make_rng(seed, run, kTruthStream);
  const Mat4 Lq = motion.Q.llt().matrixL();
  const Mat4 Finv = motion.F.inverse();
  const int mid = (1 + steps) / 2;
  std::normal_distribution<double> n01;
  auto noise = [&] {
    Vec4 u;
    for (int d = 0; d < 4; ++d) u[d] = n01(rng);
    return Vec4(Lq * u);
  };
  GroundTruth gt;
  for (int i = 0; i < 4; ++i) {
    TruthTrajectory tr;
    tr.birth = std::min(kBirths[i], steps);
    tr.death = std::min(kDeaths[i], steps);
    const int m = std::clamp(mid, tr.birth, tr.death);
    const Vec4 xm = sample_gaussian(Vec4::Zero(), Mat4::Identity(), rng);
    std::vector<Vec4> states(tr.death - tr.birth + 1);
    states[m - tr.birth] = xm;
    for (int t = m + 1; t <= tr.death; ++t) {
      states[t - tr.birth] = motion.F * states[t - 1 - tr.birth] + noise();
    }
    for (int t = m - 1; t >= tr.birth; --t) {
      states[t - tr.birth] = Finv * (states[t + 1 - tr.birth] - noise());
    }
    tr.states = std::move(states);
    gt.trajectories.push_back(std::move(tr));
  }
  return gt;
}

std::vector<Vec2> generate_measurements(const GroundTruth& gt, const MeasurementModel& meas,
                                        int scan, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01;
  const Mat2 Lr = meas.R.llt().matrixL();
  std::vector<Vec2> out;
  for (const auto& tr : gt.trajectories) {
    if (!tr.alive(scan)) continue;
    if (u01(rng) >= meas.pd) continue;
    const Vec2 v(n01(rng), n01(rng));
    out.push_back(meas.H * tr.at(scan) + Lr * v);
  }
  if (meas.clutter_rate > 0.0) {
    std::poisson_distribution<int> count(meas.clutter_rate);
    const int n = count(rng);
    const Region& r = meas.region;
    for (int i = 0; i < n; ++i) {
      const double x = r.x_min + (r.x_max - r.x_min) * u01(rng);
      const double y = r.y_min + (r.y_max - r.y_min) * u01(rng);
      out.emplace_back(x, y);
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace mstraj
