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
#include "resmal/partition.h"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

namespace resmal {

double ParentLinkCost(const NetworkScenario &network, const std::string &parent_id, const std::string &node_id) {
  if (node_id == parent_id) return 0.0;
  const LinkProfile *link = network.FindLink(parent_id, node_id);
  if (!link) return std::numeric_limits<double>::infinity();
  return link->TransferSeconds(kProbeTransferBytes);
}

NodeSelection SelectNodes(const NetworkScenario &network, const std::string &parent_id, double radius_R,
                          uint64_t model_bytes, size_t max_nodes) {
  if (max_nodes == 0) throw Error(ErrorCode::kInvalidArgument, "max_nodes must be >= 1");
  const NodeProfile *parent = network.FindNode(parent_id);
  if (!parent) throw Error(ErrorCode::kInvalidArgument, "parent '" + parent_id + "' is not in the network");
  if (!parent->online) throw Error(ErrorCode::kInvalidArgument, "parent '" + parent_id + "' is offline");

  struct Ranked {
    double cost;
    double workload;
    const NodeProfile *node;
  };
  std::vector<Ranked> ranked;
  for (const NodeProfile &n : network.nodes) {
    if (n.id == parent_id || !n.online || Distance(*parent, n) > radius_R) continue;
    ranked.push_back({ParentLinkCost(network, parent_id, n.id), n.workload_frac, &n});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked &a, const Ranked &b) {
    return std::tie(a.cost, a.workload, a.node->id) < std::tie(b.cost, b.workload, b.node->id);
  });

  NodeSelection sel;
  sel.candidates.push_back(parent_id);
  for (const Ranked &r : ranked) sel.candidates.push_back(r.node->id);

  sel.chosen.push_back(parent_id);
  sel.chosen_bytes = parent->mem_free_bytes;
  for (size_t i = 1; i < sel.candidates.size() && sel.chosen_bytes < model_bytes && sel.chosen.size() < max_nodes;
       ++i) {
    sel.chosen.push_back(sel.candidates[i]);
    sel.chosen_bytes += network.FindNode(sel.candidates[i])->mem_free_bytes;
  }
  if (sel.chosen_bytes < model_bytes) {
    throw Error(ErrorCode::kInsufficientResources,
                "the first " + std::to_string(sel.chosen.size()) + " candidate node(s) offer " +
                    std::to_string(sel.chosen_bytes) + " bytes, model needs " + std::to_string(model_bytes));
  }
  for (size_t i = 1; i < sel.chosen.size(); ++i) {
    if (!network.FindLink(parent_id, sel.chosen[i])) {
      throw Error(ErrorCode::kNoRoute, "chosen node " + sel.chosen[i] + " has no link to parent " + parent_id);
    }
  }
  return sel;
}

namespace {

// Greedy longest-prefix cover of layers [pos, L) by nodes [j, k). Greedy is
// optimal for this question: taking more layers never hurts later nodes.
bool Coverable(const std::vector<uint64_t> &bytes, size_t pos, const std::vector<PartitionNode> &nodes, size_t j) {
  for (; j < nodes.size() && pos < bytes.size(); ++j) {
    uint64_t used = 0;
    while (pos < bytes.size() && used + bytes[pos] <= nodes[j].mem_free_bytes) used += bytes[pos++];
  }
  return pos == bytes.size();
}

}  // namespace

Placement PartitionLayers(const ModelSpec &spec, const std::vector<PartitionNode> &nodes, const MemoryQuery &query) {
  if (nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "no nodes to partition over");
  const std::vector<uint64_t> bytes = EstimateLayerMemory(query);
  const size_t num_layers = bytes.size();
  if (num_layers != spec.layers.size()) {
    throw Error(ErrorCode::kInvalidArgument, "memory profile does not match the spec's layer count");
  }
  if (!Coverable(bytes, 0, nodes, 0)) {
    throw Error(ErrorCode::kInfeasiblePartition,
                "the layers cannot be split into contiguous ranges that fit the chosen nodes");
  }

  Placement placement;
  placement.parent_id = nodes.front().id;
  size_t pos = 0;
  for (size_t j = 0; j < nodes.size() && pos < num_layers; ++j) {
    size_t fit = 0;
    uint64_t used = 0;
    while (pos + fit < num_layers && used + bytes[pos + fit] <= nodes[j].mem_free_bytes) used += bytes[pos + fit++];
    const size_t later = nodes.size() - 1 - j;
    const size_t reserve = std::min(later, num_layers - pos - 1);
    size_t take = 0;
    for (size_t t = std::min(fit, num_layers - pos - reserve); t >= 1; --t) {
      if (Coverable(bytes, pos + t, nodes, j + 1)) {
        take = t;
        break;
      }
    }
    if (take == 0) {
      for (size_t t = fit; t >= 1; --t) {
        if (Coverable(bytes, pos + t, nodes, j + 1)) {
          take = t;
          break;
        }
      }
    }
    if (take == 0) continue;
    placement.assignments.push_back({nodes[j].id, pos, pos + take});
    pos += take;
  }
  placement.cut_bytes = CutBytes(spec, placement);
  return placement;
}

Placement PartitionLayers(const ModelSpec &spec, const NetworkScenario &network,
                          const std::vector<std::string> &chosen, const MemoryQuery &query) {
  std::vector<PartitionNode> nodes;
  for (const std::string &id : chosen) {
    const NodeProfile *n = network.FindNode(id);
    if (!n) throw Error(ErrorCode::kInvalidArgument, "unknown node " + id);
    nodes.push_back({n->id, n->mem_free_bytes});
  }
  return PartitionLayers(spec, nodes, query);
}

std::vector<uint64_t> CutBytes(const ModelSpec &spec, const Placement &placement) {
  const std::vector<Shape> shapes = ActivationShapes(spec);
  std::vector<uint64_t> cuts;
  for (size_t i = 0; i + 1 < placement.assignments.size(); ++i) {
    const size_t boundary = placement.assignments[i].end;
    if (boundary >= shapes.size()) throw Error(ErrorCode::kInvalidArgument, "placement range beyond the model");
    cuts.push_back(uint64_t{ElementCount(shapes[boundary])} * sizeof(float));
  }
  return cuts;
}

std::string_view ViolationName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kCoverageGap: return "CoverageGap";
    case ViolationKind::kOverlap: return "Overlap";
    case ViolationKind::kMemoryExceeded: return "MemoryExceeded";
    case ViolationKind::kNodeOffline: return "NodeOffline";
    case ViolationKind::kUnknownNode: return "UnknownNode";
    case ViolationKind::kMissingLink: return "MissingLink";
    case ViolationKind::kEntryNotParent: return "EntryNotParent";
    case ViolationKind::kCutMismatch: return "CutMismatch";
  }
  return "?";
}

std::vector<Violation> ValidatePlacement(const Placement &placement, const NetworkScenario &network,
                                         const ModelSpec &spec, const MemoryQuery &query) {
  std::vector<Violation> out;
  auto report = [&out](ViolationKind kind, std::string detail) { out.push_back({kind, std::move(detail)}); };
  const size_t num_layers = spec.layers.size();
  const auto &as = placement.assignments;

  if (as.empty()) {
    report(ViolationKind::kCoverageGap, "no assignments; layers [0, " + std::to_string(num_layers) + ") uncovered");
    return out;
  }
  if (placement.parent_id != network.parent_id) {
    report(ViolationKind::kEntryNotParent,
           "placement parent " + placement.parent_id + " but network parent is " + network.parent_id);
  }
  if (as.front().node_id != network.parent_id) {
    report(ViolationKind::kEntryNotParent, "first range runs on " + as.front().node_id + ", not the parent");
  }

  size_t expect = 0;
  for (size_t i = 0; i < as.size(); ++i) {
    const Assignment &a = as[i];
    const std::string range = a.node_id + " [" + std::to_string(a.first) + ", " + std::to_string(a.end) + ")";
    if (a.end <= a.first) report(ViolationKind::kCoverageGap, "empty range " + range);
    if (a.first > expect) {
      report(ViolationKind::kCoverageGap,
             "layers [" + std::to_string(expect) + ", " + std::to_string(a.first) + ") unassigned before " + range);
    } else if (a.first < expect) {
      report(ViolationKind::kOverlap, range + " overlaps the previous range ending at " + std::to_string(expect));
    }
    if (a.end > num_layers) report(ViolationKind::kCoverageGap, range + " runs past the last layer");
    expect = std::max(expect, a.end);
  }
  if (expect < num_layers) {
    report(ViolationKind::kCoverageGap,
           "layers [" + std::to_string(expect) + ", " + std::to_string(num_layers) + ") unassigned");
  }

  const std::vector<uint64_t> bytes = EstimateLayerMemory(query);
  std::map<std::string, uint64_t> held;
  for (const Assignment &a : as) {
    for (size_t l = a.first; l < std::min(a.end, bytes.size()); ++l) held[a.node_id] += bytes[l];
  }
  std::vector<std::string> seen;
  for (const Assignment &a : as) {
    if (std::find(seen.begin(), seen.end(), a.node_id) != seen.end()) continue;
    seen.push_back(a.node_id);
    const NodeProfile *n = network.FindNode(a.node_id);
    if (!n) {
      report(ViolationKind::kUnknownNode, "node " + a.node_id + " is not in the network");
      continue;
    }
    if (!n->online) report(ViolationKind::kNodeOffline, "node " + a.node_id + " is offline");
    if (held[a.node_id] > n->mem_free_bytes) {
      report(ViolationKind::kMemoryExceeded, "node " + a.node_id + " holds " + std::to_string(held[a.node_id]) +
                                                 " bytes but has " + std::to_string(n->mem_free_bytes) + " free");
    }
  }

  for (size_t i = 0; i + 1 < as.size(); ++i) {
    const std::string &from = as[i].node_id;
    const std::string &to = as[i + 1].node_id;
    if (from != to && network.FindNode(from) && network.FindNode(to) && !network.FindLink(from, to)) {
      report(ViolationKind::kMissingLink, "no link " + from + " -> " + to);
    }
  }

  bool ranges_ok = true;
  for (const Assignment &a : as) ranges_ok = ranges_ok && a.end <= num_layers && a.end > 0;
  if (ranges_ok) {
    const std::vector<uint64_t> cuts = CutBytes(spec, placement);
    if (cuts != placement.cut_bytes) {
      report(ViolationKind::kCutMismatch, "cut_bytes differ from the activation sizes at the boundaries");
    }
  }
  return out;
}

MemoryQuery QueryFor(const ModelSpec &spec, uint64_t n_batches, uint64_t batch_size, uint64_t kb_per_param) {
  return MemoryQuery{CountModelParams(spec), n_batches, batch_size, kb_per_param};
}

uint64_t ModelBytes(const ModelSpec &spec, uint64_t n_batches, uint64_t batch_size, uint64_t kb_per_param) {
  return EstimateModelMemory(QueryFor(spec, n_batches, batch_size, kb_per_param));
}

Json PlacementToJson(const Placement &placement) {
  Json as = Json::array();
  for (const Assignment &a : placement.assignments) {
    as.push_back({{"node_id", a.node_id}, {"layers", {a.first, a.end}}});
  }
  return Json{{"parent_id", placement.parent_id}, {"assignments", as}, {"cut_bytes", placement.cut_bytes}};
}

Placement PlacementFromJson(const Json &json) {
  Placement p;
  p.parent_id = Require<std::string>(json, "parent_id");
  for (const Json &ja : Require<Json>(json, "assignments")) {
    Assignment a;
    a.node_id = Require<std::string>(ja, "node_id");
    const auto range = Require<std::vector<size_t>>(ja, "layers");
    if (range.size() != 2) throw Error(ErrorCode::kParse, "assignment layers must be [first, end)");
    a.first = range[0];
    a.end = range[1];
    p.assignments.push_back(a);
  }
  p.cut_bytes = Optional<std::vector<uint64_t>>(json, "cut_bytes", {});
  return p;
}

}  // namespace resmal
