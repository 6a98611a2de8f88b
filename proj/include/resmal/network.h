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
#ifndef RESMAL_NETWORK_H_
#define RESMAL_NETWORK_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resmal/io.h"

namespace resmal {

struct NodeProfile {
  std::string id;
  uint64_t mem_free_bytes = 0;
  double speed_flops_per_sec = 1.0;
  double workload_frac = 0.0;  // share of capacity already busy
  double x = 0.0;              // position, meters
  double y = 0.0;
  bool online = true;

  // Flops per second left over for our work.
  double effective_speed() const { return speed_flops_per_sec * (1.0 - workload_frac); }
  friend bool operator==(const NodeProfile &, const NodeProfile &) = default;
};

struct LinkProfile {
  std::string a;
  std::string b;
  double latency_sec = 0.0;
  double bandwidth_bytes_per_sec = 1.0;

  double TransferSeconds(uint64_t bytes) const {
    return latency_sec + static_cast<double>(bytes) / bandwidth_bytes_per_sec;
  }
  friend bool operator==(const LinkProfile &, const LinkProfile &) = default;
};

/// Per-node field overrides applied on top of a base scenario, e.g. the same
/// fleet observed with different free memory or background load.
struct NodeOverride {
  std::string id;
  std::optional<uint64_t> mem_free_bytes;
  std::optional<double> speed_flops_per_sec;
  std::optional<double> workload_frac;
  std::optional<bool> online;
};

struct ScenarioCase {
  std::string name;
  std::optional<size_t> max_nodes;
  std::vector<NodeOverride> overrides;
};

struct NetworkScenario {
  std::string name;
  std::vector<NodeProfile> nodes;
  std::vector<LinkProfile> links;  // undirected; at most one per pair
  double radius_R = 0.0;
  std::string parent_id;
  size_t max_nodes = 4;
  size_t inputs = 1;                // default input count for simulation runs
  std::vector<ScenarioCase> cases;  // optional named variants

  // Throws InvalidArgument on duplicate ids, bad ranges, unknown link
  // endpoints or duplicate links.
  void Validate() const;

  const NodeProfile *FindNode(const std::string &id) const;
  NodeProfile *FindNode(const std::string &id);
  const LinkProfile *FindLink(const std::string &a, const std::string &b) const;
  const NodeProfile &Parent() const;

  /// Copy of the scenario with the named case applied and `cases` cleared.
  NetworkScenario WithCase(const std::string &case_name) const;
};

double Distance(const NodeProfile &a, const NodeProfile &b);

Json ScenarioToJson(const NetworkScenario &scenario);
NetworkScenario ScenarioFromJson(const Json &json);
NetworkScenario LoadScenario(const std::filesystem::path &path);

}  // namespace resmal

#endif  // RESMAL_NETWORK_H_
