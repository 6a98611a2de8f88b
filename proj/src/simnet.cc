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
#include "resmal/simnet.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace resmal {

std::vector<FaultEvent> FaultsFromJson(const Json &json) {
  std::vector<FaultEvent> faults;
  for (const Json &jf : Require<Json>(json, "faults")) {
    faults.push_back({Require<std::string>(jf, "node_id"), Require<double>(jf, "time_sec")});
  }
  return faults;
}

Json FaultsToJson(std::span<const FaultEvent> faults) {
  Json arr = Json::array();
  for (const FaultEvent &f : faults) arr.push_back({{"node_id", f.node_id}, {"time_sec", f.time_sec}});
  return Json{{"faults", arr}};
}

std::string_view SimEventName(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::kTaskStart: return "task_start";
    case SimEventKind::kTaskEnd: return "task_end";
    case SimEventKind::kTaskAbort: return "task_abort";
    case SimEventKind::kTransferStart: return "transfer_start";
    case SimEventKind::kTransferEnd: return "transfer_end";
    case SimEventKind::kFault: return "fault";
    case SimEventKind::kRedispatch: return "redispatch";
    case SimEventKind::kOutput: return "output";
  }
  return "?";
}

SimEventKind ParseSimEventKind(std::string_view name) {
  for (const SimEventKind k : {SimEventKind::kTaskStart, SimEventKind::kTaskEnd, SimEventKind::kTaskAbort,
                               SimEventKind::kTransferStart, SimEventKind::kTransferEnd, SimEventKind::kFault,
                               SimEventKind::kRedispatch, SimEventKind::kOutput}) {
    if (SimEventName(k) == name) return k;
  }
  throw Error(ErrorCode::kParse, "unknown event kind '" + std::string(name) + "'");
}

const NodeReport *SimReport::FindNode(const std::string &id) const {
  for (const NodeReport &n : per_node) {
    if (n.node_id == id) return &n;
  }
  return nullptr;
}

namespace {

struct Stage {
  size_t first = 0;
  size_t end = 0;
  std::string original;
  std::string owner;
  uint64_t flops = 0;
};

// Higher stage first, then lower input index.
struct TaskOrder {
  bool operator()(const std::pair<size_t, size_t> &a, const std::pair<size_t, size_t> &b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  }
};

struct NodeState {
  const NodeProfile *profile = nullptr;
  bool online = true;
  bool running = false;
  size_t run_stage = 0;
  size_t run_input = 0;
  double run_start = 0.0;
  uint64_t token = 0;
  std::set<std::pair<size_t, size_t>, TaskOrder> queue;
  double busy = 0.0;
  double tx = 0.0;
  uint64_t layers = 0;
};

enum class Kind { kTaskDone, kArrive, kFault };

struct Pending {
  double time;
  uint64_t seq;
  Kind kind;
  std::string node;  // executing node / receiver / failing node
  std::string from;  // sender for arrivals
  size_t stage = 0;
  size_t input = 0;
  uint64_t token = 0;
  uint64_t bytes = 0;

  bool operator>(const Pending &o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

class Engine {
 public:
  Engine(const NetworkScenario &scenario, const Placement &placement, const Model &model,
         std::span<const Tensor> inputs, const SimOptions &options)
      : scenario_(scenario), placement_(placement), model_(model), inputs_(inputs), options_(options) {
    shapes_ = ActivationShapes(model.spec);
    const std::vector<uint64_t> flops = ModelLayerFlops(model.spec);
    for (const Assignment &a : placement.assignments) {
      Stage s{a.first, a.end, a.node_id, a.node_id, 0};
      for (size_t l = a.first; l < a.end; ++l) s.flops += flops[l];
      stages_.push_back(s);
      if (!nodes_.count(a.node_id)) nodes_[a.node_id].profile = scenario.FindNode(a.node_id);
    }
    nodes_[placement.parent_id].profile = scenario.FindNode(placement.parent_id);
    for (auto &[id, st] : nodes_) {
      if (!st.profile) throw Error(ErrorCode::kInvalidArgument, "node " + id + " is not in the scenario");
    }
    entering_.assign(stages_.size(), std::vector<Tensor>(inputs.size()));
    producer_.assign(stages_.size(), std::vector<std::string>(inputs.size()));
    outputs_.assign(inputs.size(), {});
    done_.assign(inputs.size(), false);
  }

  SimReport Run(std::span<const FaultEvent> faults) {
    for (const FaultEvent &f : faults) Push({f.time_sec, 0, Kind::kFault, f.node_id, "", 0, 0, 0, 0});
    for (size_t m = 0; m < inputs_.size(); ++m) {
      entering_[0][m] = inputs_[m];
      producer_[0][m] = placement_.parent_id;
      nodes_[stages_[0].owner].queue.insert({0, m});
    }
    TryStart(stages_[0].owner);
    while (!events_.empty()) {
      const Pending ev = events_.top();
      events_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case Kind::kTaskDone: TaskDone(ev); break;
        case Kind::kArrive: Arrive(ev); break;
        case Kind::kFault: Fault(ev.node); break;
      }
    }
    for (size_t m = 0; m < inputs_.size(); ++m) {
      if (!done_[m]) throw Error(ErrorCode::kInvalidArgument, "input " + std::to_string(m) + " never completed");
    }
    return Finish();
  }

 private:
  void Push(Pending p) {
    p.seq = seq_++;
    events_.push(std::move(p));
  }

  void Log(double t, const std::string &node, SimEventKind kind, uint64_t bytes, size_t stage, size_t input,
           const std::string &peer = "") {
    if (options_.record_events) log_.push_back({t, node, kind, bytes, stage, input, peer});
  }

  void TryStart(const std::string &id) {
    NodeState &n = nodes_.at(id);
    if (!n.online || n.running || n.queue.empty()) return;
    const auto [s, m] = *n.queue.begin();
    n.queue.erase(n.queue.begin());
    const double speed = n.profile->effective_speed();
    if (!(speed > 0.0)) throw Error(ErrorCode::kInvalidArgument, "node " + id + " has no spare capacity (workload 1)");
    n.running = true;
    n.run_stage = s;
    n.run_input = m;
    n.run_start = now_;
    Log(now_, id, SimEventKind::kTaskStart, 0, s, m);
    Push({now_ + static_cast<double>(stages_[s].flops) / speed, 0, Kind::kTaskDone, id, "", s, m, n.token, 0});
  }

  void TaskDone(const Pending &ev) {
    NodeState &n = nodes_.at(ev.node);
    if (!n.running || ev.token != n.token) return;  // aborted by a fault
    n.running = false;
    ++n.token;
    n.busy += now_ - n.run_start;
    const Stage &st = stages_[ev.stage];
    n.layers += st.end - st.first;
    Log(now_, ev.node, SimEventKind::kTaskEnd, 0, ev.stage, ev.input);
    const size_t last = model_.spec.layers.size() - 1;
    if (st.end == model_.spec.layers.size()) {
      const Tensor hidden = RunLayers(model_, st.first, last, entering_[ev.stage][ev.input]);
      outputs_[ev.input] = OutputProbabilities(model_.spec.layers[last], model_.params[last], hidden);
      done_[ev.input] = true;
      Log(now_, ev.node, SimEventKind::kOutput, 0, ev.stage, ev.input);
      makespan_ = std::max(makespan_, now_);
    } else {
      const size_t next = ev.stage + 1;
      entering_[next][ev.input] = RunLayers(model_, st.first, st.end, entering_[ev.stage][ev.input]);
      producer_[next][ev.input] = ev.node;
      Send(ev.node, stages_[next].owner, next, ev.input);
    }
    TryStart(ev.node);
  }

  uint64_t CutBytesInto(size_t stage) const {
    return uint64_t{ElementCount(shapes_[stages_[stage].first])} * sizeof(float);
  }

  void Send(const std::string &from, const std::string &to, size_t stage, size_t input) {
    if (from == to) {
      Enqueue(to, stage, input);
      return;
    }
    const LinkProfile *link = scenario_.FindLink(from, to);
    if (!link) throw Error(ErrorCode::kUnroutableTransfer, "no link " + from + " -> " + to);
    const uint64_t bytes = CutBytesInto(stage);
    double &free_at = link_free_[{from, to}];
    const double start = std::max(now_, free_at);
    const double duration = link->TransferSeconds(bytes);
    free_at = start + duration;
    nodes_.at(from).tx += duration;
    Log(start, from, SimEventKind::kTransferStart, bytes, stage, input, to);
    Push({start + duration, 0, Kind::kArrive, to, from, stage, input, 0, bytes});
  }

  void Enqueue(const std::string &id, size_t stage, size_t input) {
    nodes_.at(id).queue.insert({stage, input});
    TryStart(id);
  }

  void Arrive(const Pending &ev) {
    Log(now_, ev.from, SimEventKind::kTransferEnd, ev.bytes, ev.stage, ev.input, ev.node);
    if (!nodes_.at(ev.node).online) {
      Redispatch(ev.stage, ev.input);
      return;
    }
    Enqueue(ev.node, ev.stage, ev.input);
  }

  void Redispatch(size_t stage, size_t input) {
    const std::string &parent = placement_.parent_id;
    Log(now_, parent, SimEventKind::kRedispatch, 0, stage, input);
    const std::string &src = producer_[stage][input];
    if (stage == 0 || nodes_.at(src).online) {
      Send(src, stages_[stage].owner, stage, input);
    } else {
      Redispatch(stage - 1, input);
    }
  }

  void Fault(const std::string &id) {
    auto it = nodes_.find(id);
    Log(now_, id, SimEventKind::kFault, 0, 0, 0);
    if (it == nodes_.end() || !it->second.online) return;
    NodeState &n = it->second;
    n.online = false;
    ++faults_handled_;
    for (Stage &s : stages_) {
      if (s.owner == id) s.owner = placement_.parent_id;
    }
    std::vector<std::pair<size_t, size_t>> orphans;
    if (n.running) {
      n.running = false;
      ++n.token;
      n.busy += now_ - n.run_start;
      Log(now_, id, SimEventKind::kTaskAbort, 0, n.run_stage, n.run_input);
      orphans.push_back({n.run_stage, n.run_input});
    }
    orphans.insert(orphans.end(), n.queue.begin(), n.queue.end());
    n.queue.clear();
    for (const auto &[s, m] : orphans) Redispatch(s, m);
  }

  SimReport Finish() {
    SimReport r;
    r.scenario = scenario_.name;
    r.parent_id = placement_.parent_id;
    r.outputs = std::move(outputs_);
    r.faults_handled = faults_handled_;
    r.makespan_sec = makespan_;

    const std::vector<uint64_t> layer_bytes = EstimateLayerMemory(
        {CountModelParams(model_.spec), options_.n_batches, options_.batch_size, options_.kb_per_param});
    auto range_bytes = [&layer_bytes](const Stage &s) {
      uint64_t b = 0;
      for (size_t l = s.first; l < s.end; ++l) b += layer_bytes[l];
      return b;
    };
    std::vector<std::string> order{placement_.parent_id};
    for (const Stage &s : stages_) {
      if (std::find(order.begin(), order.end(), s.original) == order.end()) order.push_back(s.original);
    }
    uint64_t buffers = 0;
    for (size_t s = 1; s < stages_.size(); ++s) buffers += CutBytesInto(s);
    uint64_t parent_exec = 0;
    for (const std::string &id : order) {
      const NodeState &st = nodes_.at(id);
      NodeReport nr;
      nr.node_id = id;
      nr.is_parent = id == placement_.parent_id;
      nr.busy_sec = st.busy;
      nr.tx_sec = st.tx;
      nr.layers_executed = st.layers;
      for (const Stage &s : stages_) {
        if (s.original == id) nr.own_bytes += range_bytes(s);
        if (nr.is_parent && s.original != id) nr.replica_bytes += range_bytes(s);
        if (nr.is_parent && s.owner == id) parent_exec += range_bytes(s);
      }
      if (nr.is_parent) nr.buffer_bytes = buffers;
      nr.bytes_consumed = nr.own_bytes + nr.replica_bytes + nr.buffer_bytes;
      r.total_latency_max_sec = std::max(r.total_latency_max_sec, nr.busy_sec + nr.tx_sec);
      r.per_node.push_back(nr);
    }
    r.parent_over_capacity = parent_exec > nodes_.at(placement_.parent_id).profile->mem_free_bytes;

    for (size_t s = 0; s < stages_.size(); ++s) {
      const NodeProfile *p = nodes_.at(stages_[s].original).profile;
      r.total_latency_pipeline_sec += static_cast<double>(stages_[s].flops) / p->effective_speed();
      if (s + 1 < stages_.size() && stages_[s].original != stages_[s + 1].original) {
        const LinkProfile *link = scenario_.FindLink(stages_[s].original, stages_[s + 1].original);
        if (link) r.total_latency_pipeline_sec += link->TransferSeconds(CutBytesInto(s + 1));
      }
    }
    std::stable_sort(log_.begin(), log_.end(),
                     [](const SimEvent &a, const SimEvent &b) { return a.time_sec < b.time_sec; });
    r.events = std::move(log_);
    return r;
  }

  const NetworkScenario &scenario_;
  const Placement &placement_;
  const Model &model_;
  std::span<const Tensor> inputs_;
  SimOptions options_;
  std::vector<Shape> shapes_;
  std::vector<Stage> stages_;
  std::map<std::string, NodeState> nodes_;
  std::map<std::pair<std::string, std::string>, double> link_free_;
  std::vector<std::vector<Tensor>> entering_;
  std::vector<std::vector<std::string>> producer_;
  std::vector<std::vector<double>> outputs_;
  std::vector<bool> done_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> events_;
  std::vector<SimEvent> log_;
  uint64_t seq_ = 0;
  double now_ = 0.0;
  double makespan_ = 0.0;
  size_t faults_handled_ = 0;
};

void CheckInputs(const Model &model, std::span<const Tensor> inputs) {
  if (inputs.empty()) throw Error(ErrorCode::kInvalidArgument, "simulation needs at least one input");
  for (const Tensor &t : inputs) {
    if (t.shape() != model.spec.input_shape) {
      throw Error(ErrorCode::kShapeMismatch, "input shape " + ShapeToString(t.shape()) + ", model expects " +
                                                 ShapeToString(model.spec.input_shape));
    }
  }
}

}  // namespace

SimReport SimulateOnDevice(const NetworkScenario &scenario, const std::string &node_id, const Model &model,
                           std::span<const Tensor> inputs, const SimOptions &options) {
  CheckInputs(model, inputs);
  const NodeProfile *node = scenario.FindNode(node_id);
  if (!node) throw Error(ErrorCode::kInvalidArgument, "node " + node_id + " is not in the scenario");
  if (!node->online) throw Error(ErrorCode::kInvalidArgument, "node " + node_id + " is offline");
  const uint64_t need = ModelBytes(model.spec, options.n_batches, options.batch_size, options.kb_per_param);
  if (node->mem_free_bytes < need) {
    throw Error(ErrorCode::kInsufficientResources, "node " + node_id + " has " +
                                                       std::to_string(node->mem_free_bytes) +
                                                       " free bytes, model needs " + std::to_string(need));
  }
  Placement single{node_id, {{node_id, 0, model.spec.layers.size()}}, {}};
  return Engine(scenario, single, model, inputs, options).Run({});
}

SimReport SimulateInference(const NetworkScenario &scenario, const Placement &placement, const Model &model,
                            std::span<const Tensor> inputs, std::span<const FaultEvent> faults,
                            const SimOptions &options) {
  CheckInputs(model, inputs);
  const auto violations = ValidatePlacement(
      placement, scenario, model.spec,
      QueryFor(model.spec, options.n_batches, options.batch_size, options.kb_per_param));
  if (!violations.empty()) {
    std::string msg = "invalid placement:";
    for (const Violation &v : violations) msg += " " + std::string(ViolationName(v.kind)) + " (" + v.detail + ");";
    throw Error(ErrorCode::kInvalidArgument, msg);
  }
  for (const FaultEvent &f : faults) {
    if (!scenario.FindNode(f.node_id)) throw Error(ErrorCode::kInvalidArgument, "fault on unknown node " + f.node_id);
    if (f.node_id == placement.parent_id) throw Error(ErrorCode::kInvalidArgument, "the parent cannot fail");
    if (!(f.time_sec >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "fault time must be >= 0");
  }
  return Engine(scenario, placement, model, inputs, options).Run(faults);
}

std::vector<double> AggregateGradients(std::span<const std::vector<double>> replica_gradients,
                                       const std::vector<bool> &online_mask) {
  if (online_mask.size() != replica_gradients.size()) {
    throw Error(ErrorCode::kInvalidArgument, "online mask length differs from replica count");
  }
  std::vector<double> sum;
  size_t online = 0;
  for (size_t r = 0; r < replica_gradients.size(); ++r) {
    if (!replica_gradients.empty() && replica_gradients[r].size() != replica_gradients[0].size()) {
      throw Error(ErrorCode::kShapeMismatch, "replica gradients differ in length");
    }
    if (!online_mask[r]) continue;
    if (sum.empty()) sum.assign(replica_gradients[r].size(), 0.0);
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += replica_gradients[r][i];
    ++online;
  }
  if (online == 0) throw Error(ErrorCode::kAllReplicasOffline, "no replica is online");
  for (double &v : sum) v /= static_cast<double>(online);
  return sum;
}

std::vector<ResourceRow> ResourceReport(const SimReport &report) {
  std::vector<ResourceRow> rows;
  for (const NodeReport &n : report.per_node) {
    rows.push_back({n.node_id, n.is_parent ? "parent" : "child", n.own_bytes, n.replica_bytes, n.buffer_bytes,
                    n.bytes_consumed});
  }
  return rows;
}

double Speedup(const SimReport &baseline, const SimReport &parallel) {
  if (!(parallel.total_latency_max_sec > 0.0)) {
    throw Error(ErrorCode::kDivisionByZero, "parallel run has zero latency");
  }
  return baseline.total_latency_max_sec / parallel.total_latency_max_sec;
}

Json SimReportToJson(const SimReport &r, bool include_events) {
  Json nodes = Json::array();
  for (const NodeReport &n : r.per_node) {
    nodes.push_back({{"node_id", n.node_id},
                     {"role", n.is_parent ? "parent" : "child"},
                     {"busy_sec", n.busy_sec},
                     {"tx_sec", n.tx_sec},
                     {"layers_executed", n.layers_executed},
                     {"own_bytes", n.own_bytes},
                     {"replica_bytes", n.replica_bytes},
                     {"buffer_bytes", n.buffer_bytes},
                     {"bytes_consumed", n.bytes_consumed}});
  }
  Json out = {{"scenario", r.scenario},
              {"parent_id", r.parent_id},
              {"per_node", nodes},
              {"total_latency_max_sec", r.total_latency_max_sec},
              {"total_latency_pipeline_sec", r.total_latency_pipeline_sec},
              {"makespan_sec", r.makespan_sec},
              {"faults_handled", r.faults_handled},
              {"parent_over_capacity", r.parent_over_capacity},
              {"speedup_vs_baseline", r.speedup_vs_baseline ? Json(*r.speedup_vs_baseline) : Json(nullptr)},
              {"gradient_aggregation", "mean over online replicas"},
              {"outputs", r.outputs}};
  if (include_events) {
    Json ev = Json::array();
    for (const SimEvent &e : r.events) {
      ev.push_back({{"time_sec", e.time_sec},
                    {"node", e.node},
                    {"event", SimEventName(e.kind)},
                    {"bytes", e.bytes},
                    {"stage", e.stage},
                    {"input", e.input},
                    {"peer", e.peer}});
    }
    out["events"] = ev;
  }
  return out;
}

SimReport SimReportFromJson(const Json &json) {
  SimReport r;
  r.scenario = Optional<std::string>(json, "scenario", "");
  r.parent_id = Require<std::string>(json, "parent_id");
  for (const Json &jn : Require<Json>(json, "per_node")) {
    NodeReport n;
    n.node_id = Require<std::string>(jn, "node_id");
    n.is_parent = Require<std::string>(jn, "role") == "parent";
    n.busy_sec = Require<double>(jn, "busy_sec");
    n.tx_sec = Optional<double>(jn, "tx_sec", 0.0);
    n.layers_executed = Require<uint64_t>(jn, "layers_executed");
    n.own_bytes = Optional<uint64_t>(jn, "own_bytes", 0);
    n.replica_bytes = Optional<uint64_t>(jn, "replica_bytes", 0);
    n.buffer_bytes = Optional<uint64_t>(jn, "buffer_bytes", 0);
    n.bytes_consumed = Require<uint64_t>(jn, "bytes_consumed");
    r.per_node.push_back(n);
  }
  r.total_latency_max_sec = Require<double>(json, "total_latency_max_sec");
  r.total_latency_pipeline_sec = Optional<double>(json, "total_latency_pipeline_sec", 0.0);
  r.makespan_sec = Optional<double>(json, "makespan_sec", 0.0);
  r.faults_handled = Optional<size_t>(json, "faults_handled", 0);
  r.parent_over_capacity = Optional<bool>(json, "parent_over_capacity", false);
  if (json.contains("speedup_vs_baseline") && !json.at("speedup_vs_baseline").is_null()) {
    r.speedup_vs_baseline = Require<double>(json, "speedup_vs_baseline");
  }
  r.outputs = Optional<std::vector<std::vector<double>>>(json, "outputs", {});
  for (const Json &je : Optional<Json>(json, "events", Json::array())) {
    SimEvent e;
    e.time_sec = Require<double>(je, "time_sec");
    e.node = Require<std::string>(je, "node");
    e.kind = ParseSimEventKind(Require<std::string>(je, "event"));
    e.bytes = Optional<uint64_t>(je, "bytes", 0);
    e.stage = Optional<size_t>(je, "stage", 0);
    e.input = Optional<size_t>(je, "input", 0);
    e.peer = Optional<std::string>(je, "peer", "");
    r.events.push_back(std::move(e));
  }
  return r;
}

std::string EventLogCsv(const SimReport &report) {
  std::ostringstream os;
  os << "time_sec,node,event,bytes,stage,input,peer\n";
  char buf[64];
  for (const SimEvent &e : report.events) {
    std::snprintf(buf, sizeof(buf), "%.9f", e.time_sec);
    os << buf << ',' << e.node << ',' << SimEventName(e.kind) << ',' << e.bytes << ',' << e.stage << ','
       << e.input << ',' << e.peer << '\n';
  }
  return os.str();
}

}  // namespace resmal
