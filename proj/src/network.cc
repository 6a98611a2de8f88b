/**
 * Copyright 2026 The resmal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "resmal/network.h"

#include <cmath>
#include <set>
#include <utility>

namespace resmal {

namespace {

[[noreturn]] void Invalid(const std::string &what) { throw Error(ErrorCode::kInvalidArgument, what); }

void CheckNode(const NodeProfile &n) {
  if (n.id.empty()) Invalid("node id must be non-empty");
  if (!(n.speed_flops_per_sec > 0.0) || !std::isfinite(n.speed_flops_per_sec)) {
    Invalid("node " + n.id + ": speed_flops_per_sec must be positive");
  }
  if (!(n.workload_frac >= 0.0 && n.workload_frac <= 1.0)) Invalid("node " + n.id + ": workload_frac outside [0, 1]");
  if (!std::isfinite(n.x) || !std::isfinite(n.y)) Invalid("node " + n.id + ": non-finite position");
}

std::pair<std::string, std::string> Key(const std::string &a, const std::string &b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

void NetworkScenario::Validate() const {
  std::set<std::string> ids;
  for (const NodeProfile &n : nodes) {
    CheckNode(n);
    if (!ids.insert(n.id).second) Invalid("duplicate node id " + n.id);
  }
  if (!ids.count(parent_id)) Invalid("parent '" + parent_id + "' is not a node");
  if (!(radius_R >= 0.0)) Invalid("radius_R must be >= 0");
  if (max_nodes == 0) Invalid("max_nodes must be >= 1");
  std::set<std::pair<std::string, std::string>> pairs;
  for (const LinkProfile &l : links) {
    if (!ids.count(l.a) || !ids.count(l.b)) Invalid("link " + l.a + "-" + l.b + " references an unknown node");
    if (l.a == l.b) Invalid("self link on " + l.a);
    if (!(l.latency_sec >= 0.0) || !(l.bandwidth_bytes_per_sec > 0.0)) {
      Invalid("link " + l.a + "-" + l.b + ": latency must be >= 0 and bandwidth > 0");
    }
    if (!pairs.insert(Key(l.a, l.b)).second) Invalid("duplicate link " + l.a + "-" + l.b);
  }
  for (const ScenarioCase &c : cases) {
    for (const NodeOverride &o : c.overrides) {
      if (!ids.count(o.id)) Invalid("case " + c.name + " overrides unknown node " + o.id);
    }
  }
}

const NodeProfile *NetworkScenario::FindNode(const std::string &id) const {
  for (const NodeProfile &n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

NodeProfile *NetworkScenario::FindNode(const std::string &id) {
  return const_cast<NodeProfile *>(std::as_const(*this).FindNode(id));
}

const LinkProfile *NetworkScenario::FindLink(const std::string &a, const std::string &b) const {
  for (const LinkProfile &l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

const NodeProfile &NetworkScenario::Parent() const {
  const NodeProfile *p = FindNode(parent_id);
  if (!p) Invalid("parent '" + parent_id + "' is not a node");
  return *p;
}

NetworkScenario NetworkScenario::WithCase(const std::string &case_name) const {
  for (const ScenarioCase &c : cases) {
    if (c.name != case_name) continue;
    NetworkScenario out = *this;
    out.cases.clear();
    out.name = name.empty() ? c.name : name + "/" + c.name;
    if (c.max_nodes) out.max_nodes = *c.max_nodes;
    for (const NodeOverride &o : c.overrides) {
      NodeProfile *n = out.FindNode(o.id);
      if (!n) Invalid("case " + c.name + " overrides unknown node " + o.id);
      if (o.mem_free_bytes) n->mem_free_bytes = *o.mem_free_bytes;
      if (o.speed_flops_per_sec) n->speed_flops_per_sec = *o.speed_flops_per_sec;
      if (o.workload_frac) n->workload_frac = *o.workload_frac;
      if (o.online) n->online = *o.online;
    }
    out.Validate();
    return out;
  }
  Invalid("scenario has no case named '" + case_name + "'");
}

double Distance(const NodeProfile &a, const NodeProfile &b) { return std::hypot(a.x - b.x, a.y - b.y); }

Json ScenarioToJson(const NetworkScenario &s) {
  Json nodes = Json::array();
  for (const NodeProfile &n : s.nodes) {
    nodes.push_back({{"id", n.id},
                     {"mem_free_bytes", n.mem_free_bytes},
                     {"speed_flops_per_sec", n.speed_flops_per_sec},
                     {"workload_frac", n.workload_frac},
                     {"position", {n.x, n.y}},
                     {"online", n.online}});
  }
  Json links = Json::array();
  for (const LinkProfile &l : s.links) {
    links.push_back({{"endpoints", {l.a, l.b}},
                     {"latency_sec", l.latency_sec},
                     {"bandwidth_bytes_per_sec", l.bandwidth_bytes_per_sec}});
  }
  Json out = {{"name", s.name},         {"parent_id", s.parent_id}, {"radius_R", s.radius_R},
              {"max_nodes", s.max_nodes}, {"inputs", s.inputs},       {"nodes", nodes},
              {"links", links}};
  if (!s.cases.empty()) {
    Json cases = Json::array();
    for (const ScenarioCase &c : s.cases) {
      Json overrides = Json::object();
      for (const NodeOverride &o : c.overrides) {
        Json f = Json::object();
        if (o.mem_free_bytes) f["mem_free_bytes"] = *o.mem_free_bytes;
        if (o.speed_flops_per_sec) f["speed_flops_per_sec"] = *o.speed_flops_per_sec;
        if (o.workload_frac) f["workload_frac"] = *o.workload_frac;
        if (o.online) f["online"] = *o.online;
        overrides[o.id] = f;
      }
      Json jc = {{"name", c.name}, {"nodes", overrides}};
      if (c.max_nodes) jc["max_nodes"] = *c.max_nodes;
      cases.push_back(jc);
    }
    out["cases"] = cases;
  }
  return out;
}

namespace {

template <typename T>
std::optional<T> Maybe(const Json &obj, const char *key) {
  if (!obj.contains(key)) return std::nullopt;
  return Require<T>(obj, key);
}

}  // namespace

NetworkScenario ScenarioFromJson(const Json &json) {
  NetworkScenario s;
  s.name = Optional<std::string>(json, "name", "");
  s.parent_id = Require<std::string>(json, "parent_id");
  s.radius_R = Require<double>(json, "radius_R");
  s.max_nodes = Optional<size_t>(json, "max_nodes", 4);
  s.inputs = Optional<size_t>(json, "inputs", 1);
  for (const Json &jn : Require<Json>(json, "nodes")) {
    NodeProfile n;
    n.id = Require<std::string>(jn, "id");
    n.mem_free_bytes = Require<uint64_t>(jn, "mem_free_bytes");
    n.speed_flops_per_sec = Require<double>(jn, "speed_flops_per_sec");
    n.workload_frac = Optional<double>(jn, "workload_frac", 0.0);
    const auto pos = Optional<std::vector<double>>(jn, "position", {0.0, 0.0});
    if (pos.size() != 2) throw Error(ErrorCode::kParse, "node " + n.id + ": position must be [x, y]");
    n.x = pos[0];
    n.y = pos[1];
    n.online = Optional<bool>(jn, "online", true);
    s.nodes.push_back(n);
  }
  const Json links = Optional<Json>(json, "links", Json::array());
  for (const Json &jl : links) {
    LinkProfile l;
    const auto ends = Require<std::vector<std::string>>(jl, "endpoints");
    if (ends.size() != 2) throw Error(ErrorCode::kParse, "link endpoints must name two nodes");
    l.a = ends[0];
    l.b = ends[1];
    l.latency_sec = Require<double>(jl, "latency_sec");
    l.bandwidth_bytes_per_sec = Require<double>(jl, "bandwidth_bytes_per_sec");
    s.links.push_back(l);
  }
  const Json cases = Optional<Json>(json, "cases", Json::array());
  for (const Json &jc : cases) {
    ScenarioCase c;
    c.name = Require<std::string>(jc, "name");
    c.max_nodes = Maybe<size_t>(jc, "max_nodes");
    const Json overrides = Optional<Json>(jc, "nodes", Json::object());
    for (const auto &[id, f] : overrides.items()) {
      NodeOverride o;
      o.id = id;
      o.mem_free_bytes = Maybe<uint64_t>(f, "mem_free_bytes");
      o.speed_flops_per_sec = Maybe<double>(f, "speed_flops_per_sec");
      o.workload_frac = Maybe<double>(f, "workload_frac");
      o.online = Maybe<bool>(f, "online");
      c.overrides.push_back(o);
    }
    s.cases.push_back(c);
  }
  s.Validate();
  return s;
}

NetworkScenario LoadScenario(const std::filesystem::path &path) { return ScenarioFromJson(ReadJsonFile(path)); }

}  // namespace resmal
