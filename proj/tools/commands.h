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
#ifndef RESMAL_TOOLS_COMMANDS_H_
#define RESMAL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace resmal::cli {

struct Globals {
  uint64_t seed = 42;
  std::string out;
  bool quiet = false;
};

struct GenCorpusArgs {
  size_t per_class = 200;
  size_t classes = 6;
  size_t events = 16;
  size_t planted = 4;
  double noise = 1.0;
  size_t k = 0;  // 0 keeps every event in the images
};

struct RankEventsArgs {
  std::string traces;
  std::string manifest;
  size_t k = 0;
};

struct TrainArgs {
  std::string corpus;
  std::string model;
  std::string metrics;
  size_t epochs = 10;
  size_t batch_size = 16;
  double learning_rate = 0.005;
  double momentum = 0.9;
  double train_frac = 0.7;
  std::string init = "fan-in";
  bool regressor = false;
  size_t samples = 2000;
};

struct MemoryArgs {
  uint64_t n_batches = 1;
  uint64_t batch_size = 1;
  uint64_t kb_per_param = 1;
};

struct EstimateArgs {
  std::string model;
  std::string regressor;
  uint64_t node_free = 0;
  MemoryArgs memory;
};

struct PartitionArgs {
  std::string scenario;
  std::string scenario_case;
  std::string model;
  double radius = -1.0;  // < 0: use the scenario's
  size_t max_nodes = 0;  // 0: use the scenario's
  MemoryArgs memory;
};

struct SimulateArgs {
  std::vector<std::string> scenarios;
  std::string scenario_case;
  std::string placement;
  std::string nodes = "auto";
  std::string model;
  std::string weights;
  std::string corpus;
  std::string faults;
  std::string event_log;
  std::string baseline;
  size_t inputs = 0;  // 0: the scenario's default
  size_t threads = 0;
  MemoryArgs memory;
};

struct ReportArgs {
  std::string pred;
  std::string manifest;
};

int GenCorpus(const Globals &g, const GenCorpusArgs &a);
int RankEvents(const Globals &g, const RankEventsArgs &a);
int Train(const Globals &g, const TrainArgs &a);
int Estimate(const Globals &g, const EstimateArgs &a);
int Partition(const Globals &g, const PartitionArgs &a);
int Simulate(const Globals &g, const SimulateArgs &a);
int Report(const Globals &g, const ReportArgs &a);

}  // namespace resmal::cli

#endif  // RESMAL_TOOLS_COMMANDS_H_
