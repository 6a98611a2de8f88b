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
#ifndef RESMAL_PARTITION_H_
#define RESMAL_PARTITION_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "resmal/network.h"
#include "resmal/nnkernel.h"
#include "resmal/resware.h"

namespace resmal {

inline constexpr uint64_t kProbeTransferBytes = uint64_t{1} << 20;

/// Seconds to move one MiB over the direct link to the parent; +inf when
/// there is no such link.
double ParentLinkCost(const NetworkScenario &network, const std::string &parent_id, const std::string &node_id);

struct NodeSelection {
  std::vector<std::string> candidates;  // parent first, then sorted online nodes within radius
  std::vector<std::string> chosen;      // greedy prefix of `candidates`
  uint64_t chosen_bytes = 0;            // combined mem_free_bytes of `chosen`
};

/// Candidates are online nodes within `radius_R` of the parent, ordered by
/// (one-MiB transfer cost on the parent link, workload_frac, id) with the
/// parent always first. The chosen prefix grows until the combined free
/// memory reaches `model_bytes`, capped at `max_nodes`.
NodeSelection SelectNodes(const NetworkScenario &network, const std::string &parent_id, double radius_R,
                          uint64_t model_bytes, size_t max_nodes);

struct Assignment {
  std::string node_id;
  size_t first = 0;  // layer range [first, end)
  size_t end = 0;

  friend bool operator==(const Assignment &, const Assignment &) = default;
};

struct Placement {
  std::string parent_id;
  std::vector<Assignment> assignments;
  std::vector<uint64_t> cut_bytes;  // one per boundary

  friend bool operator==(const Placement &, const Placement &) = default;
};

struct PartitionNode {
  std::string id;
  uint64_t mem_free_bytes = 0;
};

/// Assigns contiguous layer ranges front to back. Each node takes the longest
/// run of remaining layers that fits its free bytes, leaving at least one
/// layer for every later node while the remainder can still be covered. A
/// node that cannot take any layer without breaking coverage gets none and
/// is left out of the placement. Throws InfeasiblePartition when no
/// assignment covers every layer.
Placement PartitionLayers(const ModelSpec &spec, const std::vector<PartitionNode> &nodes, const MemoryQuery &query);

/// Same, with the free bytes looked up in `network`; the first node is the parent.
Placement PartitionLayers(const ModelSpec &spec, const NetworkScenario &network,
                          const std::vector<std::string> &chosen, const MemoryQuery &query);

/// Activation bytes (elements * 4) crossing each boundary of `placement`.
std::vector<uint64_t> CutBytes(const ModelSpec &spec, const Placement &placement);

enum class ViolationKind {
  kCoverageGap,
  kOverlap,
  kMemoryExceeded,
  kNodeOffline,
  kUnknownNode,
  kMissingLink,
  kEntryNotParent,
  kCutMismatch,
};

std::string_view ViolationName(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

/// Every violated constraint, in a deterministic order; empty means valid.
/// Memory is checked per node over all ranges it holds.
std::vector<Violation> ValidatePlacement(const Placement &placement, const NetworkScenario &network,
                                         const ModelSpec &spec, const MemoryQuery &query);

/// Model bytes under `query` for the spec's profile.
uint64_t ModelBytes(const ModelSpec &spec, uint64_t n_batches = 1, uint64_t batch_size = 1, uint64_t kb_per_param = 1);

MemoryQuery QueryFor(const ModelSpec &spec, uint64_t n_batches = 1, uint64_t batch_size = 1, uint64_t kb_per_param = 1);

// {"parent_id": "P", "assignments": [{"node_id": "P", "layers": [0, 2]}], "cut_bytes": [...]}
Json PlacementToJson(const Placement &placement);
Placement PlacementFromJson(const Json &json);

}  // namespace resmal

#endif  // RESMAL_PARTITION_H_
