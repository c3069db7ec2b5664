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

#include "mstraj/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mstraj {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& v) { return v.is_null() ? kInf : v.get<double>(); }

json estimate_json(int run, const TrajectoryEstimate& e) {
  json rec;
  rec["run"] = run;
  rec["track"] = e.track;
  rec["beta"] = e.beta;
  rec["eps"] = e.eps;
  json means = json::array();
  for (const auto& m : e.means) means.push_back({m[0], m[1], m[2], m[3]});
  rec["means"] = std::move(means);
  return rec;
}

}  // namespace

std::string problem_to_json(const MultiFrameProblem& p) {
  json doc;
  doc["equality_mode"] = p.equality_mode;
  json scans = json::array();
  for (const auto& s : p.scans) {
    json rec;
    rec["scan"] = s.scan;
    rec["count"] = s.count;
    json retired = json::array();
    for (std::size_t j = 0; j < s.retired.size(); ++j) {
      if (s.retired[j]) retired.push_back(j);
    }
    rec["retired"] = std::move(retired);
    scans.push_back(std::move(rec));
  }
  doc["scans"] = std::move(scans);
  json tracks = json::array();
  for (const auto& t : p.tracks) {
    json rec;
    rec["id"] = t.id;
    rec["created_at"] = t.created_at;
    json leaves = json::array();
    for (const auto& l : t.leaves) {
      json lr;
      lr["id"] = l.id;
      lr["cost"] = number_or_null(l.cost);
      json assoc = json::array();
      for (const auto& e : l.assoc) assoc.push_back({e.scan, e.meas});
      lr["assoc"] = std::move(assoc);
      leaves.push_back(std::move(lr));
    }
    rec["leaves"] = std::move(leaves);
    tracks.push_back(std::move(rec));
  }
  doc["tracks"] = std::move(tracks);
  return doc.dump(1);
}

MultiFrameProblem problem_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("problem snapshot is not valid JSON: ") + e.what());
  }
  MultiFrameProblem p;
  try {
    p.equality_mode = doc.value("equality_mode", false);
    for (const auto& rec : doc.at("scans")) {
      ScanInfo s;
      s.scan = rec.at("scan").get<int>();
      s.count = rec.at("count").get<int>();
      s.retired.assign(s.count, 0);
      if (rec.contains("retired")) {
        for (const auto& j : rec["retired"]) {
          const int idx = j.get<int>();
          MSTRAJ_EXPECT(idx >= 0 && idx < s.count, "retired index out of range");
          s.retired[idx] = 1;
        }
      }
      p.scans.push_back(std::move(s));
    }
    for (const auto& rec : doc.at("tracks")) {
      ProblemTrack t;
      t.id = rec.at("id").get<TrackId>();
      t.created_at = rec.value("created_at", 0);
      for (const auto& lr : rec.at("leaves")) {
        ProblemLeaf l;
        l.id = lr.at("id").get<HypId>();
        l.cost = number_or_inf(lr.at("cost"));
        for (const auto& e : lr.at("assoc")) l.assoc.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        t.leaves.push_back(std::move(l));
      }
      p.tracks.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed problem snapshot: ") + e.what());
  }
  return p;
}

std::string report_to_json(const SolveReport& r) {
  json doc;
  doc["best_primal_cost"] = number_or_null(r.best_primal_cost);
  doc["dual_cost"] = number_or_null(r.dual_cost);
  doc["gap"] = number_or_null(r.gap);
  doc["iterations"] = r.iterations;
  doc["certified"] = r.certified;
  json sol = json::object();
  for (const auto& [t, h] : r.solution) sol[std::to_string(t)] = h;
  doc["solution"] = std::move(sol);
  return doc.dump(2);
}

std::string estimate_to_jsonl(int run, const TrajectoryEstimate& e) {
  return estimate_json(run, e).dump();
}

std::vector<RunTrajectories> trajectories_from_jsonl(const std::string& text) {
  std::vector<RunTrajectories> out;
  std::map<int, std::size_t> slot;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      TrajectoryEstimate e;
      const int run = rec.value("run", 0);
      e.track = rec.value("track", TrackId{0});
      e.beta = rec.at("beta").get<int>();
      e.eps = rec.at("eps").get<int>();
      for (const auto& m : rec.at("means")) {
        e.means.emplace_back(m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>(),
                             m.at(3).get<double>());
      }
      MSTRAJ_EXPECT(static_cast<int>(e.means.size()) == e.eps - e.beta + 1,
                    "trajectory length does not match beta/eps on line " + std::to_string(lineno));
      auto [it, fresh] = slot.emplace(run, out.size());
      if (fresh) out.push_back({run, {}});
      out[it->second].trajectories.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ContractViolation("bad trajectory record on line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

std::string truth_to_jsonl(int run, const GroundTruth& gt) {
  std::string out;
  TrackId id = 0;
  for (const auto& tr : gt.trajectories) {
    TrajectoryEstimate e;
    e.track = ++id;
    e.beta = tr.birth;
    e.eps = tr.death;
    e.means = tr.states;
    out += estimate_json(run, e).dump();
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mstraj
