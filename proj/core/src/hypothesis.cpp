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

#include "mstraj/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace mstraj {

std::optional<HypId> LocalHypothesis::ancestor_at(int scan, int created_at) const {
  const int idx = scan - created_at;
  if (idx < 0 || idx >= static_cast<int>(lineage.size())) return std::nullopt;
  return lineage[idx];
}

const LocalHypothesis* Track::find(HypId h) const {
  auto it = std::find_if(hyps.begin(), hyps.end(), [h](const LocalHypothesis& l) { return l.id == h; });
  return it == hyps.end() ? nullptr : &*it;
}

void MeasurementLedger::add_scan(int scan, int count) {
  MSTRAJ_EXPECT(count >= 0, "negative measurement count");
  MSTRAJ_EXPECT(!counts.contains(scan), "scan recorded twice");
  counts[scan] = count;
  retired[scan] = std::vector<char>(count, 0);
}

void MeasurementLedger::retire(const std::vector<AssocEntry>& entries) {
  for (const auto& e : entries) {
    auto it = retired.find(e.scan);
    MSTRAJ_EXPECT(it != retired.end() && e.meas >= 0 &&
                      e.meas < static_cast<int>(it->second.size()),
                  "retiring an unknown measurement");
    it->second[e.meas] = 1;
  }
}

bool MeasurementLedger::is_retired(const AssocEntry& e) const {
  auto it = retired.find(e.scan);
  return it != retired.end() && e.meas >= 0 && e.meas < static_cast<int>(it->second.size()) &&
         it->second[e.meas];
}

const Track* HypothesisForest::find_track(TrackId id) const {
  auto it = std::lower_bound(tracks.begin(), tracks.end(), id,
                             [](const Track& t, TrackId v) { return t.id < v; });
  if (it != tracks.end() && it->id == id) return &*it;
  // Track ids are issued in increasing order, but stay robust to any order.
  auto lin = std::find_if(tracks.begin(), tracks.end(), [id](const Track& t) { return t.id == id; });
  return lin == tracks.end() ? nullptr : &*lin;
}

const LocalHypothesis& HypothesisForest::leaf(TrackId t, HypId h) const {
  const Track* tr = find_track(t);
  MSTRAJ_EXPECT(tr != nullptr, "unknown track id");
  const LocalHypothesis* l = tr->find(h);
  MSTRAJ_EXPECT(l != nullptr, "unknown local hypothesis id");
  return *l;
}

const GlobalHypothesis& HypothesisForest::best() const {
  MSTRAJ_EXPECT(!globals.empty(), "no global hypotheses");
  return *std::max_element(globals.begin(), globals.end(),
                           [](const GlobalHypothesis& a, const GlobalHypothesis& b) {
                             return a.log_w < b.log_w;
                           });
}

double global_weight(const GlobalHypothesis& g, const std::vector<Track>& tracks) {
  MSTRAJ_EXPECT(g.choice.size() == tracks.size(), "global hypothesis must cover every track");
  double s = 0.0;
  for (const auto& t : tracks) {
    auto it = g.choice.find(t.id);
    MSTRAJ_EXPECT(it != g.choice.end(), "global hypothesis misses a track");
    const LocalHypothesis* l = t.find(it->second);
    MSTRAJ_EXPECT(l != nullptr, "global hypothesis names an unknown leaf");
    s += l->log_w;
  }
  return s;
}

void normalize_globals(std::vector<GlobalHypothesis>& globals) {
  if (globals.empty()) return;
  double m = -kInf;
  for (const auto& g : globals) m = std::max(m, g.log_w);
  MSTRAJ_EXPECT(std::isfinite(m), "global weights are all zero");
  double s = 0.0;
  for (const auto& g : globals) s += std::exp(g.log_w - m);
  const double lse = m + std::log(s);
  for (auto& g : globals) g.log_w -= lse;
}

MultiFrameProblem build_multiframe_problem(const HypothesisForest& f, int k, int n_scan,
                                           bool equality_mode) {
  std::set<int> scans;
  for (const auto& [scan, count] : f.ledger.counts) {
    if (scan >= std::max(1, k - n_scan) && scan <= k) scans.insert(scan);
  }
  // Older scans where leaves of one track still disagree.
  for (const auto& t : f.tracks) {
    if (t.hyps.size() < 2) continue;
    std::map<int, std::set<int>> seen;
    std::map<int, std::size_t> hits;
    for (const auto& l : t.hyps) {
      for (const auto& e : l.assoc) {
        if (scans.contains(e.scan)) continue;
        seen[e.scan].insert(e.meas);
        ++hits[e.scan];
      }
    }
    for (const auto& [scan, ms] : seen) {
      if (ms.size() > 1 || hits[scan] != t.hyps.size()) scans.insert(scan);
    }
  }

  MultiFrameProblem p;
  p.equality_mode = equality_mode;
  for (int s : scans) {
    ScanInfo info;
    info.scan = s;
    info.count = f.ledger.counts.at(s);
    info.retired = f.ledger.retired.at(s);
    p.scans.push_back(std::move(info));
  }
  for (const auto& t : f.tracks) {
    ProblemTrack pt;
    pt.id = t.id;
    pt.created_at = t.created_at;
    for (const auto& l : t.hyps) {
      ProblemLeaf pl;
      pl.id = l.id;
      pl.cost = -l.log_w;
      for (const auto& e : l.assoc) {
        if (scans.contains(e.scan)) pl.assoc.push_back(e);
      }
      pt.leaves.push_back(std::move(pl));
    }
    p.tracks.push_back(std::move(pt));
  }
  return p;
}

void n_scan_prune(HypothesisForest& f, const GlobalHypothesis& a_star, int n_scan, int k) {
  MSTRAJ_EXPECT(n_scan >= 0, "N must be non-negative");
  const int tau = k - n_scan;
  if (tau < 1) return;
  for (auto& t : f.tracks) {
    auto it = a_star.choice.find(t.id);
    MSTRAJ_EXPECT(it != a_star.choice.end(), "best global hypothesis misses a track");
    const LocalHypothesis* best = t.find(it->second);
    MSTRAJ_EXPECT(best != nullptr, "best global hypothesis names an unknown leaf");
    const auto anc = best->ancestor_at(tau, t.created_at);
    if (!anc) continue;  // track younger than the resolved horizon
    std::erase_if(t.hyps, [&](const LocalHypothesis& l) { return l.ancestor_at(tau, t.created_at) != anc; });
  }
  std::erase_if(f.globals, [&](const GlobalHypothesis& g) {
    for (const auto& [tid, hid] : g.choice) {
      const Track* t = f.find_track(tid);
      if (t == nullptr || t->find(hid) == nullptr) return true;
    }
    return false;
  });
  normalize_globals(f.globals);
}

std::vector<TrackId> delete_resolved_tracks(HypothesisForest& f, int n_scan, int k, double r_min) {
  std::vector<TrackId> removed;
  std::erase_if(f.tracks, [&](const Track& t) {
    if (t.hyps.size() != 1) return false;
    const auto& l = t.hyps.front();
    const bool in_window =
        std::any_of(l.assoc.begin(), l.assoc.end(), [&](const AssocEntry& e) { return e.scan > k - n_scan; });
    if (in_window) return false;
    const bool absent = l.existence() < r_min;
    const bool stale = l.assoc.empty() && k - t.created_at > n_scan;
    if (!absent && !stale) return false;
    f.ledger.retire(l.assoc);
    removed.push_back(t.id);
    return true;
  });
  if (!removed.empty()) {
    for (auto& g : f.globals) {
      for (TrackId id : removed) g.choice.erase(id);
    }
  }
  return removed;
}

void normalize_track_weights(HypothesisForest& f) {
  for (auto& t : f.tracks) {
    double m = -kInf;
    for (const auto& l : t.hyps) m = std::max(m, l.log_w);
    if (!std::isfinite(m)) continue;
    for (auto& l : t.hyps) l.log_w -= m;
  }
}

void materialize_globals(HypothesisForest& f, bool equality_mode, std::size_t cap,
                         std::size_t node_limit) {
  f.globals.clear();
  if (f.tracks.empty()) {
    f.globals.push_back(GlobalHypothesis{});
    return;
  }
  // Leaves agree on every scan outside this problem, so it is exact.
  const MultiFrameProblem p = build_multiframe_problem(f, f.time, 0, equality_mode);
  const auto best = enumerate_best_solutions(p, cap, node_limit);
  if (best.empty()) throw Infeasible("no feasible global hypothesis");
  for (const auto& [sol, cost] : best) {
    GlobalHypothesis g;
    g.choice = sol;
    g.log_w = -cost;
    f.globals.push_back(std::move(g));
  }
  normalize_globals(f.globals);
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

std::vector<std::string> check_forest(const HypothesisForest& f, bool equality_mode,
                                      double weight_tol, double psd_tol) {
  std::vector<std::string> bad;
  auto report = [&bad](const std::string& s) { bad.push_back(s); };

  if (f.globals.empty()) report("no global hypotheses");
  double total = 0.0;
  for (const auto& g : f.globals) total += std::exp(g.log_w);
  if (!f.globals.empty() && std::abs(total - 1.0) > weight_tol) {
    report("global weights sum to " + std::to_string(total));
  }

  for (const auto& t : f.tracks) {
    if (t.hyps.empty()) report("track " + std::to_string(t.id) + " has no leaves");
    for (const auto& l : t.hyps) {
      if (!l.bern) continue;
      const double r = l.bern->r;
      if (!(r >= 0.0 && r <= 1.0)) report("existence out of range on leaf " + std::to_string(l.id));
      double wsum = 0.0;
      for (const auto& c : l.bern->mix.components) {
        wsum += c.w;
        const auto& P = c.traj.joint.cov;
        if (!P.allFinite() || min_eigenvalue(P) < -psd_tol) {
          report("covariance not PSD on leaf " + std::to_string(l.id));
        }
      }
      if (r > 0.0 && std::abs(wsum - 1.0) > 1e-9) {
        report("mixture weights of leaf " + std::to_string(l.id) + " sum to " + std::to_string(wsum));
      }
      for (std::size_t i = 1; i < l.assoc.size(); ++i) {
        if (l.assoc[i].scan <= l.assoc[i - 1].scan) {
          report("leaf " + std::to_string(l.id) + " has two entries for one scan");
        }
      }
    }
  }

  for (std::size_t gi = 0; gi < f.globals.size(); ++gi) {
    const auto& g = f.globals[gi];
    const std::string tag = "global " + std::to_string(gi) + ": ";
    if (g.choice.size() != f.tracks.size()) report(tag + "does not cover every track");
    std::map<int, std::vector<char>> used;
    for (const auto& [scan, count] : f.ledger.counts) used[scan].assign(count, 0);
    for (const auto& [tid, hid] : g.choice) {
      const Track* t = f.find_track(tid);
      const LocalHypothesis* l = t ? t->find(hid) : nullptr;
      if (l == nullptr) {
        report(tag + "unknown leaf");
        continue;
      }
      for (const auto& e : l->assoc) {
        auto it = used.find(e.scan);
        if (it == used.end() || e.meas < 0 || e.meas >= static_cast<int>(it->second.size())) {
          report(tag + "association references a nonexistent measurement");
          continue;
        }
        if (it->second[e.meas] || f.ledger.is_retired(e)) {
          report(tag + "measurement (" + std::to_string(e.scan) + "," + std::to_string(e.meas) +
                 ") used twice");
        }
        it->second[e.meas] = 1;
      }
    }
    if (equality_mode) {
      for (const auto& [scan, flags] : used) {
        for (std::size_t j = 0; j < flags.size(); ++j) {
          if (!flags[j] && !f.ledger.is_retired({scan, static_cast<int>(j)})) {
            report(tag + "measurement (" + std::to_string(scan) + "," + std::to_string(j) +
                   ") not covered");
          }
        }
      }
    }
  }
  return bad;
}

std::string dump_forest(const HypothesisForest& f) {
  using nlohmann::json;
  json doc;
  doc["time"] = f.time;
  json leaves = json::array();
  for (const auto& t : f.tracks) {
    for (const auto& l : t.hyps) {
      json rec;
      rec["track"] = t.id;
      rec["created_at"] = t.created_at;
      rec["id"] = l.id;
      rec["parent"] = l.parent ? json(*l.parent) : json(nullptr);
      rec["lineage"] = l.lineage;
      rec["cost"] = -l.log_w;
      rec["r"] = l.existence();
      json assoc = json::array();
      for (const auto& e : l.assoc) assoc.push_back({e.scan, e.meas});
      rec["assoc"] = std::move(assoc);
      leaves.push_back(std::move(rec));
    }
  }
  doc["leaves"] = std::move(leaves);
  json globals = json::array();
  for (const auto& g : f.globals) {
    json rec;
    rec["log_w"] = g.log_w;
    json choice = json::object();
    for (const auto& [tid, hid] : g.choice) choice[std::to_string(tid)] = hid;
    rec["choice"] = std::move(choice);
    globals.push_back(std::move(rec));
  }
  doc["globals"] = std::move(globals);
  return doc.dump(2);
}

}  // namespace mstraj
