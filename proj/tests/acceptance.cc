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
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "resmal/error.h"
#include "resmal/featurize.h"
#include "resmal/io.h"
#include "resmal/metrics.h"
#include "resmal/network.h"
#include "resmal/nnkernel.h"
#include "resmal/partition.h"
#include "resmal/resware.h"
#include "resmal/simnet.h"
#include "resmal/specgen.h"
#include "test_support.h"

namespace {

using namespace resmal;
using resmal::testing::Mesh;
using resmal::testing::RandomInputs;
using resmal::testing::RandomPlacement;

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void Check(int id, const std::string &name, double bound_sec, const std::function<Outcome()> &fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception &e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < bound_sec;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s [%2d] %-34s %s (%.2f s, bound %.0f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs, bound_sec);
  std::fflush(stdout);
}

std::string Fmt(const char *fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::vector<std::vector<double>> Reference(const Model &m, const std::vector<Tensor> &inputs) {
  std::vector<std::vector<double>> out;
  for (const Tensor &x : inputs) out.push_back(Forward(m, x));
  return out;
}

Outcome ParamCounts() {
  SplitMix64 rng(1001);
  size_t exact = 0;
  const size_t n = 200;
  for (size_t i = 0; i < n; ++i) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const Model m = BuildModel(spec, i);
    const ParamProfile p = CountModelParams(spec);
    bool ok = p.per_layer.size() == m.params.size();
    uint64_t total = 0;
    for (size_t l = 0; ok && l < m.params.size(); ++l) {
      const uint64_t elements = m.params[l].weight.size() + m.params[l].bias.size();
      ok = CountLayerParams(spec.layers[l]) == elements && p.per_layer[l] == elements;
      total += elements;
    }
    exact += ok && total == p.total;
  }
  return {exact == n, Fmt("%zu/%zu specs exact", exact, n)};
}

Outcome DistributedExactness() {
  SplitMix64 rng(1002);
  size_t exact = 0, with_faults = 0;
  const size_t n = 100;
  for (size_t i = 0; i < n; ++i) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const Model m = BuildModel(spec, rng.Next(), InitScheme::kFanInScaled);
    const size_t k = 1 + rng.Below(5);
    const NetworkScenario net = Mesh(k, rng);
    const Placement p = RandomPlacement(spec, k, rng);
    const auto inputs = RandomInputs(spec.input_shape, 1 + rng.Below(8), rng);
    const SimReport clean = SimulateInference(net, p, m, inputs);
    std::vector<FaultEvent> faults;
    for (size_t a = 1; a < p.assignments.size(); ++a) {
      if (rng.Below(2)) faults.push_back({p.assignments[a].node_id, rng.Uniform(0.0, clean.makespan_sec)});
    }
    with_faults += !faults.empty();
    const SimReport r = SimulateInference(net, p, m, inputs, faults);
    exact += clean.outputs == Reference(m, inputs) && r.outputs == clean.outputs;
  }
  return {exact == n, Fmt("%zu/%zu tuples bit-identical (%zu with faults)", exact, n, with_faults)};
}

Outcome GradientCheck() {
  SplitMix64 rng(1003);
  RandomSpecOptions opts;
  opts.max_side = 7;
  double worst = 0.0;
  const size_t n = 20;
  for (size_t i = 0; i < n; ++i) {
    const ModelSpec spec = RandomModelSpec(rng, opts);
    const Model m = BuildModel(spec, rng.Next(), InitScheme::kFanInScaled);
    const Tensor x = resmal::testing::RandomTensor(spec.input_shape, rng);
    worst = std::max(worst, BackwardCheck(m, x, rng.Below(m.num_classes())));
  }
  return {worst <= 1e-4, Fmt("max relative error %.2e over %zu models (<= 1e-4)", worst, n)};
}

Outcome RegressorFidelity() {
  const RegressorModel reg = FitRegressor(BuildRegressorDataset(42, 2000));
  // Held-out cases drawn here, independently of the training generator.
  SplitMix64 rng(1004);
  size_t agree = 0, boundary = 0;
  const size_t n = 1000;
  for (size_t i = 0; i < n; ++i) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const uint64_t nb = 1 + rng.Below(4), bs = 1 + rng.Below(32);
    const uint64_t bytes = ModelBytes(spec, nb, bs);
    uint64_t node = 0;
    switch (rng.Below(4)) {
      case 0: node = bytes; ++boundary; break;
      case 1: node = uint64_t(double(bytes) * rng.Uniform(1.0, 10.0)); break;
      case 2: node = uint64_t(double(bytes) * rng.Uniform(0.0, 1.0)); break;
      default: node = rng.Below(2) ? 0 : uint64_t(double(bytes) * rng.Uniform(0.5, 2.0)); break;
    }
    const bool truth = FitsOnDevice(bytes, node);
    agree += (PredictOffload(reg, spec, node, nb, bs).verdict == Verdict::kOnDevice) == truth;
  }
  const double rate = double(agree) / double(n);
  return {rate >= 0.95, Fmt("%.1f%% agreement on %zu held-out cases, %zu on the boundary (>= 95%%)", 100 * rate, n,
                            boundary)};
}

Outcome MinimalPrefix() {
  SplitMix64 rng(1005);
  size_t match = 0;
  const size_t n = 500;
  for (size_t i = 0; i < n; ++i) {
    const NetworkScenario net = resmal::testing::RandomNetwork(rng, 1 + rng.Below(10));
    const uint64_t model = rng.Below(2500);
    const size_t max_nodes = 1 + rng.Below(net.nodes.size() + 1);
    const auto want = resmal::testing::ShortestCoveringPrefix(net, model, max_nodes);
    try {
      const NodeSelection got = SelectNodes(net, net.parent_id, net.radius_R, model, max_nodes);
      match += want && got.chosen == *want;
    } catch (const Error &e) {
      if (e.code() == ErrorCode::kInsufficientResources) {
        match += !want;
      } else if (e.code() == ErrorCode::kNoRoute && want) {
        bool unlinked = false;
        for (const auto &id : *want) unlinked = unlinked || (id != net.parent_id && !net.FindLink(net.parent_id, id));
        match += unlinked;
      }
    }
  }
  return {match == n, Fmt("%zu/%zu selections equal the brute-force prefix", match, n)};
}

Outcome DetectionAccuracy() {
  const CorpusConfig config;  // 6 classes x 200 samples, seed 42
  const SyntheticCorpus corpus = GenSyntheticCorpus(config);
  std::vector<LabeledSample> all;
  for (size_t i = 0; i < corpus.traces.num_samples(); ++i) {
    all.push_back({ImageToTensor(CorpusImage(corpus, i)), corpus.traces.labels[i]});
  }
  const Split split = StratifiedSplit(corpus.traces.labels, 0.7, config.seed);
  std::vector<LabeledSample> train, test;
  for (size_t i : split.train) train.push_back(all[i]);
  for (size_t i : split.test) test.push_back(all[i]);
  const TrainConfig tc;
  const TrainResult r = TrainModel(BuildModel(DefaultModelSpec(), tc.seed, InitScheme::kFanInScaled), train, tc);
  const double acc = Accuracy(r.model, test);
  return {acc >= 0.90, Fmt("test accuracy %.4f on %zu held-out images (>= 0.90)", acc, test.size())};
}

struct CaseRun {
  std::string name;
  SimReport report;
};

std::vector<CaseRun> RunAllCases(const NetworkScenario &base, const Model &model) {
  SplitMix64 rng(1007);
  const auto inputs = RandomInputs({32, 32, 1}, base.inputs, rng);
  std::vector<CaseRun> runs;
  for (const ScenarioCase &c : base.cases) {
    runs.push_back({c.name, resmal::testing::RunAuto(base.WithCase(c.name), model, inputs)});
  }
  return runs;
}

std::vector<std::filesystem::path> ShippedScenarios() {
  std::vector<std::filesystem::path> out;
  for (const auto &e : std::filesystem::directory_iterator(resmal::testing::DataDir())) {
    if (e.path().extension() != ".json") continue;
    const Json j = ReadJsonFile(e.path());
    if (j.is_object() && j.contains("nodes") && j.contains("links")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome CalibratedLatency() {
  const Model model = BuildModel(DefaultModelSpec(), 42, InitScheme::kFanInScaled);
  const auto runs = RunAllCases(LoadScenario(resmal::testing::DataDir() / "paper_fig2.json"), model);
  const SimReport *one = nullptr, *two = nullptr, *four = nullptr;
  for (const CaseRun &r : runs) {
    if (r.report.per_node.size() == 1) one = &r.report;
    if (r.report.per_node.size() == 2) two = &r.report;
    if (r.report.per_node.size() == 4) four = &r.report;
  }
  if (!one || !two || !four) return {false, "paper_fig2 lacks 1/2/4-node runs"};
  const double base = one->total_latency_max_sec;
  const double s2 = Speedup(*one, *two), s4 = Speedup(*one, *four);
  bool ok = std::abs(base - 98.0) <= 0.98 && std::abs(s2 - 4.0) <= 0.4 && std::abs(s4 - 9.8) <= 0.98;

  size_t monotone = 0, scenarios = 0;
  for (const auto &path : ShippedScenarios()) {
    const NetworkScenario s = LoadScenario(path);
    if (s.cases.empty()) continue;
    ++scenarios;
    auto all = RunAllCases(s, model);
    std::sort(all.begin(), all.end(), [](const CaseRun &a, const CaseRun &b) {
      return a.report.per_node.size() < b.report.per_node.size();
    });
    bool mono = true;
    for (size_t i = 1; i < all.size(); ++i) {
      mono = mono && all[i].report.total_latency_max_sec <= all[i - 1].report.total_latency_max_sec;
    }
    monotone += mono;
  }
  ok = ok && scenarios > 0 && monotone == scenarios;
  return {ok, Fmt("parent-only %.2f s, 2-node x%.2f, 4-node x%.2f, monotone %zu/%zu", base, s2, s4, monotone,
                  scenarios)};
}

Outcome ResourceShape() {
  size_t runs = 0, good = 0;
  auto check = [&](const SimReport &r) {
    if (r.per_node.size() < 2) return;
    ++runs;
    const auto rows = ResourceReport(r);
    bool ok = rows.front().role == "parent";
    for (size_t i = 1; i < rows.size(); ++i) ok = ok && rows.front().total_bytes > rows[i].total_bytes;
    good += ok;
  };
  const Model model = BuildModel(DefaultModelSpec(), 42);
  for (const CaseRun &r : RunAllCases(LoadScenario(resmal::testing::DataDir() / "paper_fig2.json"), model)) {
    check(r.report);
  }
  SplitMix64 rng(1008);
  for (size_t i = 0; i < 100; ++i) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const Model m = BuildModel(spec, i);
    const size_t k = 2 + rng.Below(3);
    check(SimulateInference(Mesh(k, rng), RandomPlacement(spec, k, rng), m, RandomInputs(spec.input_shape, 2, rng)));
  }

  // Single-node: Input(63) -> Softmax(64) is 4,096 parameters, 4 MiB at 1 KiB each.
  const ModelSpec small{{63}, {resmal::testing::Input(), resmal::testing::Head(64)}};
  const Model m4 = BuildModel(small, 1);
  const uint64_t bytes = ModelBytes(m4.spec);
  NetworkScenario solo;
  solo.name = "solo";
  solo.parent_id = "P";
  solo.nodes.push_back({"P", bytes, 1e6, 0.0, 0.0, 0.0, true});
  const auto rows = ResourceReport(SimulateOnDevice(solo, "P", m4, RandomInputs({63}, 1, rng)));
  const bool single = rows.size() == 1 && rows[0].total_bytes == bytes && bytes == 4194304;
  return {good == runs && runs > 0 && single,
          Fmt("parent heaviest in %zu/%zu multi-node runs; single node %llu bytes", good, runs,
              static_cast<unsigned long long>(rows.empty() ? 0 : rows[0].total_bytes))};
}

double TwoPass(const std::vector<double> &x, const std::vector<double> &y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

Outcome EventRanking() {
  size_t first = 0;
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    CorpusConfig cfg;
    cfg.events = 17;
    cfg.planted_events = 1;
    cfg.samples_per_class = 50;
    cfg.seed = seed;
    const SyntheticCorpus c = GenSyntheticCorpus(cfg);
    const RankedEvents ranked = RankEvents(c.traces);
    first += ranked.front().name == c.traces.event_names[c.planted.front()];
    for (const RankedEvent &e : ranked) {
      const size_t col = EventIndices(c.traces, std::vector<std::string>{e.name}).front();
      const auto x = c.traces.Column(col);
      double best = 0.0;
      for (size_t k = 0; k < cfg.classes; ++k) {
        std::vector<double> z;
        for (size_t l : c.traces.labels) z.push_back(l == k ? 1.0 : 0.0);
        const double rho = TwoPass(x, z);
        if (std::abs(rho) > std::abs(best)) best = rho;
      }
      worst = std::max(worst, std::abs(best - e.rho));
    }
  }
  return {first >= 95 && worst <= 1e-9,
          Fmt("planted event first in %zu/100 seeds (>= 95); max |rho - oracle| %.1e (<= 1e-9)", first, worst)};
}

Outcome FaultResilience() {
  SplitMix64 rng(1010);
  size_t ok = 0;
  const size_t n = 50;
  for (size_t i = 0; i < n; ++i) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const Model m = BuildModel(spec, rng.Next(), InitScheme::kFanInScaled);
    const size_t k = 2 + rng.Below(3);
    const NetworkScenario net = Mesh(k, rng);
    Placement p;
    do {
      p = RandomPlacement(spec, k, rng);
    } while (p.assignments.size() < 2);
    const auto inputs = RandomInputs(spec.input_shape, 2 + rng.Below(6), rng);
    const SimReport clean = SimulateInference(net, p, m, inputs);
    const std::string victim = p.assignments[1 + rng.Below(p.assignments.size() - 1)].node_id;
    const std::vector<FaultEvent> faults = {{victim, rng.Uniform(0.05, 0.95) * clean.makespan_sec}};
    const SimReport r = SimulateInference(net, p, m, inputs, faults);
    ok += r.outputs == Reference(m, inputs) && r.faults_handled == 1;
  }
  return {ok == n, Fmt("%zu/%zu single-child-fault trials exact with faults_handled = 1", ok, n)};
}

}  // namespace

int main() {
  Check(1, "parameter-count oracle", 5, ParamCounts);
  Check(2, "distributed-inference exactness", 60, DistributedExactness);
  Check(3, "gradient check", 60, GradientCheck);
  Check(4, "regressor fidelity", 60, RegressorFidelity);
  Check(5, "greedy minimal prefix", 60, MinimalPrefix);
  Check(6, "detection accuracy stand-in", 600, DetectionAccuracy);
  Check(7, "calibrated latency reproduction", 60, CalibratedLatency);
  Check(8, "resource-report shape", 60, ResourceShape);
  Check(9, "event-ranking recovery", 300, EventRanking);
  Check(10, "fault resilience", 60, FaultResilience);
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
