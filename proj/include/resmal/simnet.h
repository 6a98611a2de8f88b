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
#ifndef RESMAL_SIMNET_H_
#define RESMAL_SIMNET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resmal/network.h"
#include "resmal/nnkernel.h"
#include "resmal/partition.h"

namespace resmal {

struct FaultEvent {
  std::string node_id;
  double time_sec = 0.0;

  friend bool operator==(const FaultEvent &, const FaultEvent &) = default;
};

// {"faults": [{"node_id": "C1", "time_sec": 12.5}]}
std::vector<FaultEvent> FaultsFromJson(const Json &json);
Json FaultsToJson(std::span<const FaultEvent> faults);

enum class SimEventKind {
  kTaskStart,
  kTaskEnd,
  kTaskAbort,
  kTransferStart,
  kTransferEnd,
  kFault,
  kRedispatch,
  kOutput,
};

std::string_view SimEventName(SimEventKind kind);
SimEventKind ParseSimEventKind(std::string_view name);

struct SimEvent {
  double time_sec = 0.0;
  std::string node;  // executing node, or the sender for transfers
  SimEventKind kind = SimEventKind::kTaskStart;
  uint64_t bytes = 0;
  size_t stage = 0;
  size_t input = 0;
  std::string peer;  // receiver for transfers

  friend bool operator==(const SimEvent &, const SimEvent &) = default;
};

struct NodeReport {
  std::string node_id;
  bool is_parent = false;
  double busy_sec = 0.0;  // compute time, including work lost to a fault
  double tx_sec = 0.0;    // time spent sending cut activations
  uint64_t layers_executed = 0;
  uint64_t own_bytes = 0;      // parameters of the ranges originally assigned here
  uint64_t replica_bytes = 0;  // parent only: copies of every child range
  uint64_t buffer_bytes = 0;   // parent only: activation buffers for every cut
  uint64_t bytes_consumed = 0;

  friend bool operator==(const NodeReport &, const NodeReport &) = default;
};

struct SimReport {
  std::string scenario;
  std::string parent_id;
  std::vector<NodeReport> per_node;  // parent first, then placement order
  double total_latency_max_sec = 0.0;
  double total_latency_pipeline_sec = 0.0;
  double makespan_sec = 0.0;
  std::vector<std::vector<double>> outputs;
  std::optional<double> speedup_vs_baseline;
  size_t faults_handled = 0;
  bool parent_over_capacity = false;
  std::vector<SimEvent> events;

  const NodeReport *FindNode(const std::string &id) const;
  friend bool operator==(const SimReport &, const SimReport &) = default;
};

struct SimOptions {
  uint64_t n_batches = 1;
  uint64_t batch_size = 1;
  uint64_t kb_per_param = 1;
  bool record_events = true;
};

/// Whole model on one node. busy = sum of layer flops / effective speed per
/// input. Throws InsufficientResources when the node lacks the model bytes.
SimReport SimulateOnDevice(const NetworkScenario &scenario, const std::string &node_id, const Model &model,
                           std::span<const Tensor> inputs, const SimOptions &options = {});

/// Discrete-event run of `placement`. All inputs are queued at the parent at
/// t = 0; a node works on its highest-stage ready task first, then the
/// lowest input index. Each directed link carries one transfer at a time.
/// When a node fails, the parent takes over its ranges; tasks queued or
/// running there are re-sent from the node that produced their input (or
/// recomputed by the parent if that node is gone too).
///
/// Headline latency is the largest per-node busy + send time; the
/// single-input pipeline latency and the makespan are reported alongside.
SimReport SimulateInference(const NetworkScenario &scenario, const Placement &placement, const Model &model,
                            std::span<const Tensor> inputs, std::span<const FaultEvent> faults = {},
                            const SimOptions &options = {});

/// Element-wise mean over the online replicas.
std::vector<double> AggregateGradients(std::span<const std::vector<double>> replica_gradients,
                                       const std::vector<bool> &online_mask);

struct ResourceRow {
  std::string node_id;
  std::string role;  // "parent" or "child"
  uint64_t own_bytes = 0;
  uint64_t replica_bytes = 0;
  uint64_t buffer_bytes = 0;
  uint64_t total_bytes = 0;
};

std::vector<ResourceRow> ResourceReport(const SimReport &report);

/// baseline.total_latency_max_sec / parallel.total_latency_max_sec.
double Speedup(const SimReport &baseline, const SimReport &parallel);

Json SimReportToJson(const SimReport &report, bool include_events = false);
SimReport SimReportFromJson(const Json &json);

/// time_sec,node,event,bytes,stage,input,peer
std::string EventLogCsv(const SimReport &report);

}  // namespace resmal

#endif  // RESMAL_SIMNET_H_
