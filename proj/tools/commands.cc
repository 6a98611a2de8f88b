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
#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "resmal/corpus_io.h"
#include "resmal/featurize.h"
#include "resmal/metrics.h"
#include "resmal/model_io.h"
#include "resmal/nnkernel.h"
#include "resmal/partition.h"
#include "resmal/resware.h"
#include "resmal/rng.h"
#include "resmal/simnet.h"

namespace resmal::cli {

namespace fs = std::filesystem;

namespace {

void Emit(const Globals &g, const Json &value) {
  if (g.out.empty()) {
    std::cout << value.dump(2) << "\n";
  } else {
    WriteJsonFile(g.out, value);
  }
}

void Note(const Globals &g, const std::string &line) {
  if (!g.quiet) std::cerr << line << "\n";
}

ModelSpec SpecOrDefault(const std::string &path) { return path.empty() ? DefaultModelSpec() : LoadModelSpec(path); }

// A corpus argument may name the directory or its manifest.
fs::path ManifestPath(const std::string &corpus) {
  fs::path p(corpus);
  if (fs::is_directory(p)) p /= "manifest.json";
  return p;
}

MemoryQuery Query(const ModelSpec &spec, const MemoryArgs &m) {
  return QueryFor(spec, m.n_batches, m.batch_size, m.kb_per_param);
}

std::string Fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

int GenCorpus(const Globals &g, const GenCorpusArgs &a) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out DIR is required");
  CorpusConfig config;
  config.classes = a.classes;
  config.samples_per_class = a.per_class;
  config.events = a.events;
  config.planted_events = a.planted;
  config.noise = a.noise;
  config.seed = g.seed;
  if (a.per_class == 0 || a.classes < 2 || a.events == 0 || a.planted > a.events) {
    throw Error(ErrorCode::kInvalidArgument, "need per-class >= 1, classes >= 2, 1 <= planted <= events");
  }
  const SyntheticCorpus corpus = GenSyntheticCorpus(config);

  std::vector<size_t> columns(corpus.traces.num_events());
  for (size_t e = 0; e < columns.size(); ++e) columns[e] = e;
  if (a.k > 0) {
    const auto top = SelectTopEvents(RankEvents(corpus.traces), a.k);
    columns = EventIndices(corpus.traces, top);
  }

  const fs::path dir(g.out);
  fs::create_directories(dir / "images");
  CorpusManifest manifest;
  manifest.class_names = corpus.traces.class_names;
  manifest.side = kModelSide;
  manifest.traces_file = "traces.csv";
  for (const size_t c : columns) manifest.image_events.push_back(corpus.traces.event_names[c]);
  manifest.generator = {{"seed", g.seed},         {"classes", a.classes}, {"per_class", a.per_class},
                        {"events", a.events},     {"planted", a.planted}, {"noise", a.noise},
                        {"planted_events", corpus.planted}};
  for (size_t i = 0; i < corpus.traces.num_samples(); ++i) {
    std::vector<double> values;
    for (const size_t c : columns) values.push_back(corpus.traces.rows[i][c]);
    const GrayImage img = Downsample(ToGrayscale(values, corpus.blobs[i], corpus.traces.labels[i]));
    char name[32];
    std::snprintf(name, sizeof(name), "images/%05zu.pgm", i);
    WriteFileAtomic(dir / name, ImageToPgm(img));
    manifest.entries.push_back({name, img.label});
  }
  WriteFileAtomic(dir / "traces.csv", TracesToCsv(corpus.traces));
  WriteJsonFile(dir / "manifest.json", ManifestToJson(manifest));
  Note(g, "wrote " + std::to_string(manifest.entries.size()) + " images to " + dir.string());
  return 0;
}

int RankEvents(const Globals &g, const RankEventsArgs &a) {
  std::vector<std::string> names;
  if (!a.manifest.empty()) names = LoadManifest(ManifestPath(a.manifest)).class_names;
  const TraceSet traces = TracesFromCsv(ReadTextFile(a.traces), names);
  const RankedEvents ranked = resmal::RankEvents(traces);
  Json events = Json::array();
  for (const RankedEvent &e : ranked) events.push_back({{"name", e.name}, {"rho", e.rho}, {"rank", e.rank}});
  Json out = {{"events", events}};
  out["selected"] = SelectTopEvents(ranked, a.k == 0 ? ranked.size() : a.k);
  Emit(g, out);
  return 0;
}

namespace {

int TrainRegressor(const Globals &g, const TrainArgs &a) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out FILE is required");
  const RegressorModel model = FitRegressor(BuildRegressorDataset(g.seed, a.samples));
  WriteJsonFile(g.out, RegressorToJson(model));
  Note(g, "regressor fitted on " + std::to_string(a.samples) + " samples");
  return 0;
}

}  // namespace

int Train(const Globals &g, const TrainArgs &a) {
  if (a.regressor) return TrainRegressor(g, a);
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out FILE is required");
  if (a.corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "--corpus is required");
  InitScheme scheme;
  if (a.init == "fan-in") {
    scheme = InitScheme::kFanInScaled;
  } else if (a.init == "uniform") {
    scheme = InitScheme::kUniform;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--init must be fan-in or uniform");
  }
  const fs::path manifest_path = ManifestPath(a.corpus);
  const CorpusManifest manifest = LoadManifest(manifest_path);
  const std::vector<LabeledSample> all = ImagesToSamples(LoadManifestImages(manifest_path, manifest));
  std::vector<size_t> labels;
  for (const LabeledSample &s : all) labels.push_back(s.label);
  const Split split = StratifiedSplit(labels, a.train_frac, g.seed);
  std::vector<LabeledSample> train, test;
  for (const size_t i : split.train) train.push_back(all[i]);
  for (const size_t i : split.test) test.push_back(all[i]);

  TrainConfig config;
  config.epochs = a.epochs;
  config.batch_size = a.batch_size;
  config.learning_rate = a.learning_rate;
  config.momentum = a.momentum;
  config.seed = g.seed;
  const ModelSpec spec = SpecOrDefault(a.model);
  const TrainResult result = TrainModel(BuildModel(spec, g.seed, scheme), train, config);
  WriteJsonFile(g.out, WeightsToJson(result.model));

  const double train_acc = Accuracy(result.model, train);
  const double test_acc = test.empty() ? 0.0 : Accuracy(result.model, test);
  if (!a.metrics.empty()) {
    WriteJsonFile(a.metrics, Json{{"epoch_loss", result.epoch_loss},
                                  {"train_accuracy", train_acc},
                                  {"test_accuracy", test.empty() ? Json(nullptr) : Json(test_acc)},
                                  {"train_size", train.size()},
                                  {"test_size", test.size()}});
  }
  Note(g, "final loss " + Fixed(result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back(), 4) + ", train accuracy " +
              Fixed(train_acc, 4) + ", test accuracy " + Fixed(test_acc, 4));
  return 0;
}

int Estimate(const Globals &g, const EstimateArgs &a) {
  const ModelSpec spec = SpecOrDefault(a.model);
  const RegressorModel reg =
      a.regressor.empty() ? FitRegressor(BuildRegressorDataset(g.seed, 2000)) : RegressorFromJson(ReadJsonFile(a.regressor));
  const MemoryQuery q = Query(spec, a.memory);
  const uint64_t model_bytes = EstimateModelMemory(q);
  const OffloadDecision d = PredictOffload(reg, spec, a.node_free, a.memory.n_batches, a.memory.batch_size,
                                           a.memory.kb_per_param);
  const FeatureVector x =
      OffloadFeatures(spec, a.node_free, a.memory.n_batches, a.memory.batch_size, a.memory.kb_per_param);
  Json features = Json::object();
  for (size_t j = 0; j < kNumFeatures; ++j) features[FeatureNames()[j]] = x[j];
  Emit(g, Json{{"verdict", VerdictName(d.verdict)},
               {"score", d.score},
               {"ground_truth", VerdictName(FitsOnDevice(model_bytes, a.node_free) ? Verdict::kOnDevice
                                                                                    : Verdict::kOffload)},
               {"model_bytes", model_bytes},
               {"node_free_bytes", a.node_free},
               {"total_params", q.profile.total},
               {"per_layer_params", q.profile.per_layer},
               {"n_batches", a.memory.n_batches},
               {"batch_size", a.memory.batch_size},
               {"kb_per_param", a.memory.kb_per_param},
               {"features", features}});
  return 0;
}

namespace {

NetworkScenario ScenarioFor(const std::string &path, const std::string &case_name) {
  const NetworkScenario base = LoadScenario(path);
  return case_name.empty() ? base : base.WithCase(case_name);
}

struct Planned {
  NodeSelection selection;
  Placement placement;
};

Planned Plan(const NetworkScenario &s, const ModelSpec &spec, const MemoryQuery &q, double radius, size_t max_nodes) {
  Planned p;
  p.selection = SelectNodes(s, s.parent_id, radius < 0 ? s.radius_R : radius, EstimateModelMemory(q),
                            max_nodes == 0 ? s.max_nodes : max_nodes);
  p.placement = PartitionLayers(spec, s, p.selection.chosen, q);
  return p;
}

}  // namespace

int Partition(const Globals &g, const PartitionArgs &a) {
  const NetworkScenario s = ScenarioFor(a.scenario, a.scenario_case);
  const ModelSpec spec = SpecOrDefault(a.model);
  const MemoryQuery q = Query(spec, a.memory);
  const Planned p = Plan(s, spec, q, a.radius, a.max_nodes);
  Json out = PlacementToJson(p.placement);
  out["candidates"] = p.selection.candidates;
  out["chosen"] = p.selection.chosen;
  out["model_bytes"] = EstimateModelMemory(q);
  out["chosen_free_bytes"] = p.selection.chosen_bytes;
  Emit(g, out);
  return 0;
}

namespace {

struct Job {
  std::string scenario_path;
  std::string case_name;
};

struct Outcome {
  std::optional<SimReport> report;
  std::optional<Error> error;
};

}  // namespace

int Simulate(const Globals &g, const SimulateArgs &a) {
  if (a.scenarios.empty()) throw Error(ErrorCode::kInvalidArgument, "--scenario is required");
  if (a.nodes != "auto" && a.nodes != "parent-only") {
    throw Error(ErrorCode::kInvalidArgument, "--nodes must be auto or parent-only");
  }
  std::vector<Job> jobs;
  for (const std::string &path : a.scenarios) {
    if (a.scenario_case == "all") {
      const NetworkScenario base = LoadScenario(path);
      if (base.cases.empty()) throw Error(ErrorCode::kInvalidArgument, path + " defines no cases");
      for (const ScenarioCase &c : base.cases) jobs.push_back({path, c.name});
    } else {
      jobs.push_back({path, a.scenario_case});
    }
  }
  if (jobs.size() > 1 && (!a.placement.empty() || !a.event_log.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--placement and --event-log need a single scenario run");
  }

  const ModelSpec spec = SpecOrDefault(a.model);
  const Model model = a.weights.empty() ? BuildModel(spec, g.seed) : ModelFromWeightsJson(spec, ReadJsonFile(a.weights));
  const MemoryQuery q = Query(spec, a.memory);
  const std::vector<FaultEvent> faults = a.faults.empty() ? std::vector<FaultEvent>{} : FaultsFromJson(ReadJsonFile(a.faults));
  const std::optional<Placement> fixed =
      a.placement.empty() ? std::nullopt : std::optional<Placement>(PlacementFromJson(ReadJsonFile(a.placement)));

  // Inputs: the first N corpus images, or seeded uniform noise images.
  std::vector<Tensor> corpus_inputs;
  if (!a.corpus.empty()) {
    const fs::path mp = ManifestPath(a.corpus);
    for (const LabeledSample &s : ImagesToSamples(LoadManifestImages(mp, LoadManifest(mp)))) {
      corpus_inputs.push_back(s.input);
    }
  }
  auto inputs_for = [&](const NetworkScenario &s) {
    const size_t n = a.inputs ? a.inputs : s.inputs;
    if (!corpus_inputs.empty()) {
      if (n > corpus_inputs.size()) throw Error(ErrorCode::kInvalidArgument, "corpus has fewer images than --inputs");
      return std::vector<Tensor>(corpus_inputs.begin(), corpus_inputs.begin() + static_cast<std::ptrdiff_t>(n));
    }
    SplitMix64 rng(MixSeed(g.seed, 0x51));
    std::vector<Tensor> inputs;
    for (size_t i = 0; i < n; ++i) {
      Tensor t(spec.input_shape);
      for (float &v : t.data()) v = static_cast<float>(rng.Uniform());
      inputs.push_back(std::move(t));
    }
    return inputs;
  };

  SimOptions options;
  options.n_batches = a.memory.n_batches;
  options.batch_size = a.memory.batch_size;
  options.kb_per_param = a.memory.kb_per_param;
  options.record_events = !a.event_log.empty();

  auto run = [&](const Job &job) {
    const NetworkScenario s = ScenarioFor(job.scenario_path, job.case_name);
    const std::vector<Tensor> inputs = inputs_for(s);
    if (a.nodes == "parent-only") return SimulateOnDevice(s, s.parent_id, model, inputs, options);
    const Placement placement = fixed ? *fixed : Plan(s, spec, q, -1.0, 0).placement;
    return SimulateInference(s, placement, model, inputs, faults, options);
  };

  std::vector<Outcome> outcomes(jobs.size());
  const size_t workers =
      std::min(jobs.size(), a.threads ? a.threads : std::max<size_t>(1, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t j = w; j < jobs.size(); j += workers) {
        try {
          outcomes[j].report = run(jobs[j]);
        } catch (const Error &e) {
          outcomes[j].error = e;
        }
      }
    });
  }
  for (std::thread &t : pool) t.join();
  for (const Outcome &o : outcomes) {
    if (o.error) throw *o.error;
  }

  std::optional<double> baseline;
  if (!a.baseline.empty()) baseline = SimReportFromJson(ReadJsonFile(a.baseline)).total_latency_max_sec;
  if (!baseline && a.scenario_case == "all") baseline = outcomes.front().report->total_latency_max_sec;
  std::vector<Json> reports;
  for (Outcome &o : outcomes) {
    SimReport &r = *o.report;
    if (baseline && r.total_latency_max_sec > 0.0) r.speedup_vs_baseline = *baseline / r.total_latency_max_sec;
    reports.push_back(SimReportToJson(r));
    Note(g, (r.scenario.empty() ? std::string("scenario") : r.scenario) + ": latency " +
                Fixed(r.total_latency_max_sec) + " s" +
                (r.speedup_vs_baseline ? ", speedup " + Fixed(*r.speedup_vs_baseline, 2) : std::string()) +
                (r.faults_handled ? ", faults handled " + std::to_string(r.faults_handled) : std::string()));
  }
  if (!a.event_log.empty()) WriteFileAtomic(a.event_log, EventLogCsv(*outcomes.front().report));
  Emit(g, reports.size() == 1 ? reports.front() : Json{{"reports", reports}});
  return 0;
}

namespace {

std::vector<Json> RunsOf(const Json &pred) {
  if (pred.contains("reports")) return pred.at("reports").get<std::vector<Json>>();
  if (pred.contains("per_node")) return {pred};
  return {};
}

std::vector<size_t> PredictionsOf(const Json &pred) {
  if (pred.contains("predictions")) return Require<std::vector<size_t>>(pred, "predictions");
  const std::vector<Json> runs = RunsOf(pred);
  if (runs.empty()) throw Error(ErrorCode::kParse, "prediction file has neither 'predictions' nor a report");
  std::vector<size_t> out;
  for (const auto &probs : Require<std::vector<std::vector<double>>>(runs.front(), "outputs")) {
    out.push_back(ArgMax(probs));
  }
  return out;
}

}  // namespace

int Report(const Globals &g, const ReportArgs &a) {
  const Json pred = ReadJsonFile(a.pred);
  Json out = Json::object();
  std::string text;

  const std::vector<Json> runs = RunsOf(pred);
  if (!runs.empty()) {
    Json rows = Json::array();
    text += "run                         latency_s  pipeline_s  makespan_s  speedup  faults\n";
    for (const Json &jr : runs) {
      const SimReport r = SimReportFromJson(jr);
      char line[160];
      std::snprintf(line, sizeof(line), "%-26s %10.3f  %10.3f  %10.3f  %7s  %6zu\n", r.scenario.c_str(),
                    r.total_latency_max_sec, r.total_latency_pipeline_sec, r.makespan_sec,
                    r.speedup_vs_baseline ? Fixed(*r.speedup_vs_baseline, 2).c_str() : "-", r.faults_handled);
      text += line;
      Json resources = Json::array();
      for (const ResourceRow &row : ResourceReport(r)) {
        resources.push_back({{"node_id", row.node_id},
                             {"role", row.role},
                             {"own_bytes", row.own_bytes},
                             {"replica_bytes", row.replica_bytes},
                             {"buffer_bytes", row.buffer_bytes},
                             {"total_bytes", row.total_bytes}});
      }
      rows.push_back({{"scenario", r.scenario},
                      {"total_latency_max_sec", r.total_latency_max_sec},
                      {"total_latency_pipeline_sec", r.total_latency_pipeline_sec},
                      {"makespan_sec", r.makespan_sec},
                      {"speedup_vs_baseline", r.speedup_vs_baseline ? Json(*r.speedup_vs_baseline) : Json(nullptr)},
                      {"faults_handled", r.faults_handled},
                      {"resources", resources}});
    }
    text += "\nnode      role     busy_s      tx_s   bytes_consumed   (" + runs.back().value("scenario", "") + ")\n";
    const SimReport last = SimReportFromJson(runs.back());
    for (const NodeReport &n : last.per_node) {
      char line[160];
      std::snprintf(line, sizeof(line), "%-8s  %-6s %8.3f  %8.3f  %15llu\n", n.node_id.c_str(),
                    n.is_parent ? "parent" : "child", n.busy_sec, n.tx_sec,
                    static_cast<unsigned long long>(n.bytes_consumed));
      text += line;
    }
    out["runs"] = rows;
  }

  if (!a.manifest.empty()) {
    const CorpusManifest manifest = LoadManifest(ManifestPath(a.manifest));
    const std::vector<size_t> predicted = PredictionsOf(pred);
    if (predicted.size() > manifest.entries.size()) {
      throw Error(ErrorCode::kInvalidArgument, "more predictions than manifest samples");
    }
    std::vector<size_t> truth;
    for (size_t i = 0; i < predicted.size(); ++i) truth.push_back(manifest.entries[i].label);
    const ClassificationMetrics m = Classify(predicted, truth, manifest.class_names.size());
    Json per_class = Json::array();
    for (size_t k = 0; k < m.per_class.size(); ++k) {
      per_class.push_back({{"class", manifest.class_names[k]},
                           {"precision", m.per_class[k].precision},
                           {"recall", m.per_class[k].recall},
                           {"f1", m.per_class[k].f1},
                           {"support", m.per_class[k].support}});
    }
    out["metrics"] = {{"samples", predicted.size()},
                      {"accuracy", m.accuracy},
                      {"f1", m.macro_f1},
                      {"recall", m.macro_recall},
                      {"averaging", "macro"},
                      {"classes_scored", m.classes_scored},
                      {"per_class", per_class},
                      {"confusion", m.confusion}};
    text += "\nsamples " + std::to_string(predicted.size()) + "  accuracy " + Fixed(m.accuracy, 4) + "  macro F1 " +
            Fixed(m.macro_f1, 4) + "  macro recall " + Fixed(m.macro_recall, 4) + "\n";
  }
  if (runs.empty() && a.manifest.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to report: pass a simulation report or --manifest");
  }
  if (!g.quiet) std::cout << text;
  if (!g.out.empty()) WriteJsonFile(g.out, out);
  return 0;
}

}  // namespace resmal::cli
