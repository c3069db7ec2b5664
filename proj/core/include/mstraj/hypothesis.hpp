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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mstraj/assignment.hpp"
#include "mstraj/ids.hpp"
#include "mstraj/trajectory.hpp"

namespace mstraj {

/// One single-trajectory hypothesis (a leaf of a track's hypothesis tree).
struct LocalHypothesis {
  HypId id = 0;
  std::optional<HypId> parent;
  double log_w = 0.0;
  std::optional<BernoulliTrajectory> bern;  // absent: the target does not exist
  std::vector<AssocEntry> assoc;            // ordered by scan
  // lineage[t - created_at] is the ancestor leaf that existed right after
  // the update at scan t (the last entry is this hypothesis itself).
  std::vector<HypId> lineage;

  [[nodiscard]] double existence() const { return bern ? bern->r : 0.0; }
  [[nodiscard]] std::optional<HypId> ancestor_at(int scan, int created_at) const;
};

struct Track {
  TrackId id = 0;
  int created_at = 0;
  std::vector<LocalHypothesis> hyps;

  [[nodiscard]] const LocalHypothesis* find(HypId h) const;
};

struct GlobalHypothesis {
  std::map<TrackId, HypId> choice;
  double log_w = 0.0;  // normalized over the global set
};

/// Measurement counts per scan plus measurements claimed by tracks that
/// have since been removed.
struct MeasurementLedger {
  std::map<int, int> counts;
  std::map<int, std::vector<char>> retired;

  void add_scan(int scan, int count);
  void retire(const std::vector<AssocEntry>& entries);
  [[nodiscard]] bool is_retired(const AssocEntry& e) const;
};

struct HypothesisForest {
  std::vector<Track> tracks;
  std::vector<GlobalHypothesis> globals;
  MeasurementLedger ledger;
  int time = 0;
  TrackId next_track = 1;
  HypId next_hyp = 1;

  TrackId new_track_id() { return next_track++; }
  HypId new_hyp_id() { return next_hyp++; }
  [[nodiscard]] const Track* find_track(TrackId id) const;
  /// Leaf `h` of track `t`; throws ContractViolation if absent.
  [[nodiscard]] const LocalHypothesis& leaf(TrackId t, HypId h) const;
  /// Highest-weight global hypothesis; throws ContractViolation if none.
  [[nodiscard]] const GlobalHypothesis& best() const;
};

/// Unnormalized log weight sum_i log w^{i,a^i}. Throws ContractViolation if
/// the choice misses a track or names an unknown leaf.
double global_weight(const GlobalHypothesis& g, const std::vector<Track>& tracks);

/// Log-sum-exp normalization of global log weights.
void normalize_globals(std::vector<GlobalHypothesis>& globals);

/// Multi-frame problem over the unresolved scans (k-N .. k, plus any older
/// scan on which a track's leaves still disagree). Leaf cost is -log_w.
MultiFrameProblem build_multiframe_problem(const HypothesisForest& f, int k, int n_scan,
                                           bool equality_mode);

/// Keeps, per track, only the leaves that share a_star's ancestor at scan
/// k-N; drops globals that select a removed leaf and renormalizes the rest.
void n_scan_prune(HypothesisForest& f, const GlobalHypothesis& a_star, int n_scan, int k);

/// Removes tracks whose resolved outcome carries no target: a single leaf
/// with existence below `r_min` (or never associated and older than N
/// scans) and no association inside the unresolved window. Their
/// measurements are retired in the ledger. Returns the removed ids.
std::vector<TrackId> delete_resolved_tracks(HypothesisForest& f, int n_scan, int k, double r_min);

/// Shifts every track's leaf log weights so the largest is zero (global
/// weights are unchanged after normalization).
void normalize_track_weights(HypothesisForest& f);

/// Replaces the global set by the `cap` best feasible globals, normalized.
/// Throws Infeasible if none exists.
void materialize_globals(HypothesisForest& f, bool equality_mode, std::size_t cap = 100,
                         std::size_t node_limit = 400000);

/// Structural checks: global weights sum to one, every global selects one
/// leaf per track, association histories are disjoint (and, in equality
/// mode, cover every non-retired measurement), r in [0,1], covariances
/// PSD. Returns human-readable violations (empty when consistent).
std::vector<std::string> check_forest(const HypothesisForest& f, bool equality_mode,
                                      double weight_tol = 1e-9, double psd_tol = 1e-8);

/// JSON dump: one record per leaf with track id, ancestry, cost and
/// association history.
std::string dump_forest(const HypothesisForest& f);

}  // namespace mstraj
