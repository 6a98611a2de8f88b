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
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.h"
#include "resmal/error.h"

namespace {

using namespace resmal::cli;

void AddMemory(CLI::App *cmd, MemoryArgs &m) {
  cmd->add_option("--batches", m.n_batches, "Number of batches N in the memory estimate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", m.batch_size, "Batch size in the memory estimate")->check(CLI::PositiveNumber);
  cmd->add_option("--kb-per-param", m.kb_per_param, "Kilobytes per parameter")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"resmal: resource-aware model-parallel malware detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--out", g.out, "Output file (directory for gen-corpus); stdout when omitted");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  GenCorpusArgs gen;
  auto *gen_cmd = app.add_subcommand("gen-corpus", "Generate the seeded synthetic corpus (traces, images, manifest)");
  gen_cmd->add_option("--per-class", gen.per_class, "Samples per class")->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes, "Number of classes")->capture_default_str();
  gen_cmd->add_option("--events", gen.events, "HPC events per trace")->capture_default_str();
  gen_cmd->add_option("--planted", gen.planted, "Discriminative events")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Noise level")->capture_default_str();
  gen_cmd->add_option("--k", gen.k, "Keep only the top-k ranked events in the images (0 = all)");

  RankEventsArgs rank;
  auto *rank_cmd = app.add_subcommand("rank-events", "Rank HPC events by Pearson correlation with the classes");
  rank_cmd->add_option("--traces", rank.traces, "Trace CSV")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--manifest", rank.manifest, "Corpus manifest (for class names)");
  rank_cmd->add_option("--k", rank.k, "Number of events to select (0 = all)");

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train the CNN on a corpus, or fit the offload regressor");
  train_cmd->add_option("--corpus", train.corpus, "Corpus directory or manifest");
  train_cmd->add_option("--model", train.model, "Model spec JSON (default: built-in CNN)");
  train_cmd->add_option("--metrics", train.metrics, "Write loss/accuracy JSON here");
  train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--momentum", train.momentum)->capture_default_str();
  train_cmd->add_option("--train-frac", train.train_frac, "Share of each class used for training")
      ->capture_default_str();
  train_cmd->add_option("--init", train.init, "Weight init: fan-in or uniform")->capture_default_str();
  train_cmd->add_flag("--regressor", train.regressor, "Fit the offload regressor instead of the CNN");
  train_cmd->add_option("--samples", train.samples, "Regressor dataset size")->capture_default_str();

  EstimateArgs est;
  auto *est_cmd = app.add_subcommand("estimate", "Estimate model memory and decide on-device vs offload");
  est_cmd->add_option("--model", est.model, "Model spec JSON (default: built-in CNN)");
  est_cmd->add_option("--node-free", est.node_free, "Free bytes on the node")->required();
  est_cmd->add_option("--regressor", est.regressor, "Fitted regressor JSON (default: fit one from --seed)");
  AddMemory(est_cmd, est.memory);

  PartitionArgs part;
  auto *part_cmd = app.add_subcommand("partition", "Select nodes and split the model into layer ranges");
  part_cmd->add_option("--scenario", part.scenario, "Network scenario JSON")->required()->check(CLI::ExistingFile);
  part_cmd->add_option("--case", part.scenario_case, "Named scenario case");
  part_cmd->add_option("--model", part.model, "Model spec JSON (default: built-in CNN)");
  part_cmd->add_option("--radius", part.radius, "Override radius_R (meters)");
  part_cmd->add_option("--max-nodes", part.max_nodes, "Override max_nodes");
  AddMemory(part_cmd, part.memory);

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Run the discrete-event inference simulation");
  sim_cmd->add_option("--scenario", sim.scenarios, "Scenario JSON; repeat to run several in parallel")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--case", sim.scenario_case, "Named scenario case, or 'all'");
  sim_cmd->add_option("--placement", sim.placement, "Placement JSON (default: select + partition)");
  sim_cmd->add_option("--nodes", sim.nodes, "auto or parent-only")->capture_default_str();
  sim_cmd->add_option("--model", sim.model, "Model spec JSON (default: built-in CNN)");
  sim_cmd->add_option("--weights", sim.weights, "Weights JSON (default: seeded init)");
  sim_cmd->add_option("--corpus", sim.corpus, "Use corpus images as inputs");
  sim_cmd->add_option("--inputs", sim.inputs, "Number of inputs (default: the scenario's)");
  sim_cmd->add_option("--faults", sim.faults, "Fault schedule JSON");
  sim_cmd->add_option("--event-log", sim.event_log, "Write the event log CSV here");
  sim_cmd->add_option("--baseline", sim.baseline, "Report JSON whose latency is the speedup baseline");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads for several runs");
  AddMemory(sim_cmd, sim.memory);

  ReportArgs rep;
  auto *rep_cmd = app.add_subcommand("report", "Render latency/resource tables and detection metrics");
  rep_cmd->add_option("--pred", rep.pred, "Simulation report or {\"predictions\": [...]}")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--manifest", rep.manifest, "Corpus manifest with the true labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (*gen_cmd && g.out.empty()) {
    std::cerr << "error: gen-corpus needs --out DIR\n\n" << gen_cmd->help();
    return 2;
  }
  try {
    if (*gen_cmd) return GenCorpus(g, gen);
    if (*rank_cmd) return RankEvents(g, rank);
    if (*train_cmd) return Train(g, train);
    if (*est_cmd) return Estimate(g, est);
    if (*part_cmd) return Partition(g, part);
    if (*sim_cmd) return Simulate(g, sim);
    if (*rep_cmd) return Report(g, rep);
  } catch (const resmal::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return resmal::IsConfigError(e.code()) ? 2 : 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
