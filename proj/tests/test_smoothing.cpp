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

#include "mstraj/smoothing.hpp"
#include "oracles.hpp"
#include "smoother_check.hpp"

using namespace mstraj;

TEST(Smoothing, MapCardinalityMatchesEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 500; ++it) {
    std::vector<double> r(it % 10);
    for (auto& v : r) v = u(rng);
    const auto pmf = oracle::poisson_binomial_pmf(r);
    int best = 0;
    for (std::size_t n = 1; n < pmf.size(); ++n) {
      if (pmf[n] >= pmf[best]) best = static_cast<int>(n);
    }
    EXPECT_EQ(map_cardinality(r), best);
  }
}

TEST(Smoothing, MapCardinalityEdgeCases) {
  EXPECT_EQ(map_cardinality({}), 0);
  EXPECT_EQ(map_cardinality({0.5}), 1);  // tie resolved upwards
  EXPECT_EQ(map_cardinality({0.4}), 0);
  EXPECT_EQ(map_cardinality({1.0, 1.0, 0.0}), 2);
  EXPECT_THROW(map_cardinality({1.2}), ContractViolation);
}

TEST(Smoothing, ExtractReportsMostLikelyTracks) {
  HypothesisForest f;
  auto add = [&](TrackId id, double r, int beta) {
    Track t;
    t.id = id;
    LocalHypothesis l;
    l.id = id * 10;
    auto tr = make_trajectory(beta, Vec4::Constant(double(id)), Mat4::Identity());
    l.bern = make_bernoulli(r, tr);
    t.hyps.push_back(l);
    f.tracks.push_back(t);
  };
  add(1, 0.3, 1);
  add(2, 0.95, 2);
  add(3, 0.9, 3);
  add(4, 0.0, 1);
  GlobalHypothesis g;
  for (const auto& t : f.tracks) g.choice[t.id] = t.hyps[0].id;
  const auto est = extract_estimates(f, g);
  ASSERT_EQ(est.size(), 2u);
  EXPECT_EQ(est[0].track, 2u);
  EXPECT_EQ(est[1].track, 3u);
  EXPECT_EQ(est[1].beta, 3);
  EXPECT_EQ(est[1].means.size(), 1u);
}

TEST(Smoothing, FixedLagSmoothTruncatesLongWindows) {
  HypothesisForest f;
  Track t;
  t.id = 1;
  LocalHypothesis l;
  l.id = 1;
  auto tr = make_trajectory(1, Vec4::Zero(), Mat4::Identity());
  const auto m = MotionModel::constant_velocity(1.0, 0.01, 1.0);
  for (int i = 0; i < 9; ++i) tr = extend_trajectory(tr, m);
  l.bern = make_bernoulli(1.0, tr);
  t.hyps.push_back(l);
  f.tracks.push_back(t);
  fixed_lag_smooth(f, 4);
  const auto& out = f.tracks[0].hyps[0].bern->mix.components[0].traj;
  EXPECT_EQ(out.window(), 4);
  EXPECT_EQ(out.frozen_means.size(), 6u);
  EXPECT_EQ(out.length(), 10);
}

TEST(Smoothing, FullWindowEqualsForwardBackwardSmoother) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = smoothcheck::run(12, 64, seed);
    ASSERT_TRUE(r.single_estimate);
    EXPECT_LT(r.max_err, 1e-6);
  }
}

TEST(Smoothing, ShortWindowEqualsFixedLagSmoother) {
  for (std::uint64_t seed : {4, 5}) {
    const auto r = smoothcheck::run(15, 4, seed);
    ASSERT_TRUE(r.single_estimate);
    EXPECT_LT(r.max_err, 1e-6);
  }
}
