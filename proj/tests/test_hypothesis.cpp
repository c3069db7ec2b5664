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

#include <cmath>

#include "mstraj/hypothesis.hpp"
#include "oracles.hpp"

using namespace mstraj;

namespace {

LocalHypothesis leaf(HypId id, double log_w, std::vector<AssocEntry> assoc,
                     std::vector<HypId> lineage, double r = 0.9) {
  LocalHypothesis l;
  l.id = id;
  l.log_w = log_w;
  l.assoc = std::move(assoc);
  l.lineage = std::move(lineage);
  if (r > 0.0) l.bern = make_bernoulli(r, make_trajectory(2, Vec4::Zero(), Mat4::Identity()));
  return l;
}

// Two tracks over two scans with two measurements each.
HypothesisForest sample_forest() {
  HypothesisForest f;
  f.ledger.add_scan(1, 2);
  f.ledger.add_scan(2, 2);
  f.time = 2;
  Track a;
  a.id = 1;
  a.created_at = 1;
  a.hyps.push_back(leaf(11, -1.0, {{1, 0}, {2, 0}}, {100, 11}));
  a.hyps.push_back(leaf(12, -2.0, {{1, 0}}, {100, 12}));
  a.hyps.push_back(leaf(13, -3.5, {}, {101, 13}));
  Track b;
  b.id = 2;
  b.created_at = 1;
  b.hyps.push_back(leaf(21, -0.5, {{1, 1}, {2, 1}}, {200, 21}));
  b.hyps.push_back(leaf(22, -0.25, {{1, 0}, {2, 1}}, {201, 22}));
  b.hyps.push_back(leaf(23, -4.0, {{2, 0}}, {202, 23}));
  f.tracks = {a, b};
  return f;
}

MultiFrameProblem full_problem(const HypothesisForest& f, bool eq) {
  MultiFrameProblem p;
  p.equality_mode = eq;
  for (const auto& [scan, count] : f.ledger.counts) p.scans.push_back({scan, count, {}});
  for (const auto& t : f.tracks) {
    ProblemTrack pt{t.id, t.created_at, {}};
    for (const auto& l : t.hyps) pt.leaves.push_back({l.id, -l.log_w, l.assoc});
    p.tracks.push_back(pt);
  }
  return p;
}

}  // namespace

TEST(Hypothesis, GlobalWeightSumsLeafWeights) {
  const auto f = sample_forest();
  GlobalHypothesis g;
  g.choice = {{1, 11}, {2, 21}};
  EXPECT_DOUBLE_EQ(global_weight(g, f.tracks), -1.5);
  g.choice.erase(2);
  EXPECT_THROW(global_weight(g, f.tracks), ContractViolation);
  g.choice[2] = 99;
  EXPECT_THROW(global_weight(g, f.tracks), ContractViolation);
}

TEST(Hypothesis, NormalizeGlobals) {
  std::vector<GlobalHypothesis> gs(3);
  gs[0].log_w = -1000.0;
  gs[1].log_w = -1001.0;
  gs[2].log_w = -1003.0;
  normalize_globals(gs);
  double s = 0.0;
  for (const auto& g : gs) s += std::exp(g.log_w);
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(gs[0].log_w - gs[1].log_w, 1.0, 1e-12);
}

TEST(Hypothesis, MaterializeMatchesEnumeration) {
  for (bool eq : {false, true}) {
    auto f = sample_forest();
    const auto all = oracle::all_solutions(full_problem(f, eq));
    ASSERT_FALSE(all.empty());
    materialize_globals(f, eq, 100);
    ASSERT_EQ(f.globals.size(), all.size());
    double lse = 0.0;
    for (const auto& [sol, cost] : all) lse += std::exp(-cost);
    for (std::size_t i = 0; i < all.size(); ++i) {
      EXPECT_NEAR(std::exp(f.globals[i].log_w), std::exp(-all[i].second) / lse, 1e-12);
    }
    EXPECT_EQ(f.best().choice, all.front().first);
    EXPECT_TRUE(check_forest(f, eq).empty());
  }
}

TEST(Hypothesis, MaterializeRespectsCap) {
  auto f = sample_forest();
  materialize_globals(f, false, 2);
  ASSERT_EQ(f.globals.size(), 2u);
  EXPECT_NEAR(std::exp(f.globals[0].log_w) + std::exp(f.globals[1].log_w), 1.0, 1e-12);
}

TEST(Hypothesis, MaterializeThrowsWhenInfeasible) {
  HypothesisForest f;
  f.ledger.add_scan(1, 1);
  f.time = 1;
  Track a{1, 1, {leaf(11, 0.0, {{1, 0}}, {11})}};
  Track b{2, 1, {leaf(21, 0.0, {{1, 0}}, {21})}};
  f.tracks = {a, b};
  EXPECT_THROW(materialize_globals(f, false), Infeasible);
}

TEST(Hypothesis, ProblemCoversWindowAndDisagreeingScans) {
  const auto f = sample_forest();
  auto p = build_multiframe_problem(f, 2, 0, false);
  // Scan 1 is outside the window, but the leaves of both tracks disagree there.
  ASSERT_EQ(p.scans.size(), 2u);
  EXPECT_EQ(p.tracks[0].leaves[0].cost, 1.0);
  EXPECT_EQ(p.tracks[1].leaves[2].assoc.size(), 1u);
}

TEST(Hypothesis, NScanPruneKeepsBestBranch) {
  auto f = sample_forest();
  materialize_globals(f, false);
  GlobalHypothesis a_star;
  a_star.choice = {{1, 12}, {2, 21}};
  n_scan_prune(f, a_star, 1, 2);
  ASSERT_EQ(f.tracks[0].hyps.size(), 2u);  // 11 and 12 share ancestor 100
  EXPECT_EQ(f.tracks[0].hyps[0].id, 11u);
  ASSERT_EQ(f.tracks[1].hyps.size(), 1u);
  EXPECT_EQ(f.tracks[1].hyps[0].id, 21u);
  double s = 0.0;
  for (const auto& g : f.globals) {
    s += std::exp(g.log_w);
    EXPECT_NE(g.choice.at(1), 13u);
    EXPECT_EQ(g.choice.at(2), 21u);
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Hypothesis, NScanPruneBeforeHorizonIsNoop) {
  auto f = sample_forest();
  GlobalHypothesis a_star;
  a_star.choice = {{1, 12}, {2, 21}};
  n_scan_prune(f, a_star, 3, 2);
  EXPECT_EQ(f.tracks[0].hyps.size(), 3u);
}

TEST(Hypothesis, DeleteRetiresMeasurements) {
  HypothesisForest f;
  f.ledger.add_scan(1, 2);
  f.ledger.add_scan(2, 1);
  f.ledger.add_scan(3, 1);
  f.time = 3;
  Track dead{1, 1, {leaf(11, 0.0, {{1, 1}}, {11, 11, 11}, 1e-6)}};
  Track alive{2, 1, {leaf(21, 0.0, {{1, 0}}, {21, 21, 21}, 0.9)}};
  Track recent{3, 1, {leaf(31, 0.0, {{3, 0}}, {31, 31, 31}, 1e-6)}};
  f.tracks = {dead, alive, recent};
  const auto removed = delete_resolved_tracks(f, 1, 3, 1e-4);
  ASSERT_EQ(removed.size(), 1u);
  EXPECT_EQ(removed[0], 1u);
  EXPECT_TRUE(f.ledger.is_retired({1, 1}));
  EXPECT_FALSE(f.ledger.is_retired({1, 0}));
  EXPECT_EQ(f.tracks.size(), 2u);
}

TEST(Hypothesis, NormalizeTrackWeights) {
  auto f = sample_forest();
  normalize_track_weights(f);
  EXPECT_EQ(f.tracks[0].hyps[0].log_w, 0.0);
  EXPECT_EQ(f.tracks[1].hyps[1].log_w, 0.0);
  EXPECT_DOUBLE_EQ(f.tracks[1].hyps[0].log_w, -0.25);
}

TEST(Hypothesis, CheckForestFlagsViolations) {
  auto f = sample_forest();
  materialize_globals(f, false);
  ASSERT_TRUE(check_forest(f, false).empty());

  auto g = f;
  g.globals.push_back({{{1, 11}, {2, 22}}, -1.0});  // (1,0) used twice, weights off
  EXPECT_GE(check_forest(g, false).size(), 2u);

  auto h = f;
  h.tracks[0].hyps[0].bern->r = 1.5;
  EXPECT_FALSE(check_forest(h, false).empty());

  auto n = f;
  n.tracks[0].hyps[0].bern->mix.components[0].traj.joint.cov(0, 0) = -1.0;
  EXPECT_FALSE(check_forest(n, false).empty());
}

TEST(Hypothesis, LedgerRejectsDuplicates) {
  MeasurementLedger l;
  l.add_scan(1, 3);
  EXPECT_THROW(l.add_scan(1, 3), ContractViolation);
  EXPECT_THROW(l.retire({{2, 0}}), ContractViolation);
  l.retire({{1, 2}});
  EXPECT_TRUE(l.is_retired({1, 2}));
}

TEST(Hypothesis, AncestorLookup) {
  const auto f = sample_forest();
  EXPECT_EQ(f.tracks[0].hyps[0].ancestor_at(1, 1), std::optional<HypId>(100));
  EXPECT_EQ(f.tracks[0].hyps[0].ancestor_at(3, 1), std::nullopt);
  EXPECT_TRUE(dump_forest(f).find("\"track\"") != std::string::npos);
}
