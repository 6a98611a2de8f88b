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
#include <gtest/gtest.h>

#include <numeric>

#include "resmal/error.h"
#include "resmal/network.h"
#include "resmal/partition.h"
#include "resmal/resware.h"
#include "resmal/specgen.h"
#include "test_support.h"

namespace resmal {
namespace {

using testing::Dense;
using testing::Flatten;
using testing::Head;
using testing::Input;
using testing::Pool;

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

constexpr uint64_t kMiB = 1 << 20;

NetworkScenario Star(size_t children, uint64_t parent_mem, uint64_t child_mem) {
  NetworkScenario net;
  net.name = "star";
  net.parent_id = "P";
  net.radius_R = 100.0;
  net.nodes.push_back({"P", parent_mem, 1e6, 0.0, 0.0, 0.0, true});
  for (size_t i = 1; i <= children; ++i) {
    const std::string id = "C" + std::to_string(i);
    net.nodes.push_back({id, child_mem, 1e6, 0.0, double(i), 0.0, true});
    net.links.push_back({"P", id, 0.001 * double(i), 1e8});
  }
  return net;
}

std::vector<ViolationKind> Kinds(const std::vector<Violation> &v) {
  std::vector<ViolationKind> out;
  for (const Violation &x : v) out.push_back(x.kind);
  return out;
}

bool Has(const std::vector<Violation> &v, ViolationKind kind) {
  for (const Violation &x : v)
    if (x.kind == kind) return true;
  return false;
}

TEST(SelectNodes, ParentAloneSuffices) {
  const NodeSelection s = SelectNodes(Star(4, 4 * kMiB, 2 * kMiB), "P", 100.0, 4 * kMiB, 4);
  EXPECT_EQ(s.chosen, std::vector<std::string>{"P"});
  EXPECT_EQ(s.candidates.size(), 5u);
  EXPECT_EQ(s.chosen_bytes, 4 * kMiB);
}

TEST(SelectNodes, GreedyStopsAtCoverage) {
  const NodeSelection s = SelectNodes(Star(3, 2 * kMiB, 2 * kMiB), "P", 100.0, 4 * kMiB, 4);
  EXPECT_EQ(s.chosen, (std::vector<std::string>{"P", "C1"}));
}

TEST(SelectNodes, OrderByCostThenWorkloadThenId) {
  NetworkScenario net = Star(3, 0, 10);
  net.links[0].latency_sec = 0.003;  // P-C1 now as slow as P-C3
  net.FindNode("C3")->workload_frac = 0.5;
  const NodeSelection s = SelectNodes(net, "P", 100.0, 1, 4);
  EXPECT_EQ(s.candidates, (std::vector<std::string>{"P", "C2", "C1", "C3"}));
}

TEST(SelectNodes, RadiusAndOnlineFilter) {
  NetworkScenario net = Star(3, 0, 10);
  net.FindNode("C2")->online = false;
  net.FindNode("C3")->x = 500.0;
  EXPECT_EQ(SelectNodes(net, "P", 100.0, 1, 4).candidates, (std::vector<std::string>{"P", "C1"}));
}

TEST(SelectNodes, Errors) {
  NetworkScenario net = Star(2, 0, 10);
  for (auto &n : net.nodes)
    if (n.id != "P") n.online = false;
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 1, 4); }), ErrorCode::kInsufficientResources);
  net = Star(2, 0, 10);
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 25, 4); }), ErrorCode::kInsufficientResources);
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 15, 2); }), ErrorCode::kInsufficientResources);
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 1, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "Q", 100.0, 1, 4); }), ErrorCode::kInvalidArgument);
  net.nodes[0].online = false;
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 1, 4); }), ErrorCode::kInvalidArgument);

  // A reachable-by-radius node without a parent link sorts last; when the
  // prefix needs it, the selection has no route.
  net = Star(2, 0, 10);
  net.links.pop_back();
  EXPECT_EQ(CodeOf([&] { SelectNodes(net, "P", 100.0, 15, 4); }), ErrorCode::kNoRoute);
}

TEST(SelectNodes, MatchesShortestPrefixOracle) {
  SplitMix64 rng(5150);
  size_t covered = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + rng.Below(10);
    const NetworkScenario net = testing::RandomNetwork(rng, n);
    const uint64_t model = rng.Below(2500);
    const size_t max_nodes = 1 + rng.Below(n + 1);
    const auto want = testing::ShortestCoveringPrefix(net, model, max_nodes);
    try {
      const NodeSelection got = SelectNodes(net, net.parent_id, net.radius_R, model, max_nodes);
      ASSERT_TRUE(want.has_value()) << "trial " << trial;
      EXPECT_EQ(got.chosen, *want) << "trial " << trial;
      ++covered;
    } catch (const Error &e) {
      if (e.code() == ErrorCode::kNoRoute) {
        ASSERT_TRUE(want.has_value());
        bool missing = false;
        for (const auto &id : *want) missing = missing || (id != "N0" && !net.FindLink("N0", id));
        EXPECT_TRUE(missing) << "trial " << trial;
      } else {
        EXPECT_EQ(e.code(), ErrorCode::kInsufficientResources);
        EXPECT_FALSE(want.has_value()) << "trial " << trial;
      }
    }
  }
  EXPECT_GT(covered, 100u);
}

TEST(PartitionLayers, SingleNodeTakesEverything) {
  const ModelSpec spec = DefaultModelSpec();
  const MemoryQuery q = QueryFor(spec);
  const Placement p = PartitionLayers(spec, {{"P", EstimateModelMemory(q)}}, q);
  ASSERT_EQ(p.assignments.size(), 1u);
  EXPECT_EQ(p.assignments[0], (Assignment{"P", 0, 11}));
  EXPECT_TRUE(p.cut_bytes.empty());
}

TEST(PartitionLayers, DefaultSpecOnTwoEqualNodes) {
  const ModelSpec spec = DefaultModelSpec();
  const MemoryQuery q = QueryFor(spec);
  const auto bytes = EstimateLayerMemory(q);
  const uint64_t total = EstimateModelMemory(q);
  const uint64_t each = total - 1;
  // Oracle: the longest prefix within `each`; the rest must fit too.
  size_t k = 0;
  uint64_t used = 0;
  while (k < bytes.size() && used + bytes[k] <= each) used += bytes[k++];
  const uint64_t rest = std::accumulate(bytes.begin() + k, bytes.end(), uint64_t{0});
  ASSERT_LE(rest, each);
  const Placement p = PartitionLayers(spec, {{"A", each}, {"B", each}}, q);
  ASSERT_EQ(p.assignments.size(), 2u);
  EXPECT_EQ(p.assignments[0], (Assignment{"A", 0, k}));
  EXPECT_EQ(p.assignments[1], (Assignment{"B", k, 11}));
  EXPECT_EQ(p.cut_bytes, CutBytes(spec, p));
}

TEST(PartitionLayers, EveryNodeGetsALayerWhileFeasible) {
  const ModelSpec spec = DefaultModelSpec();
  const MemoryQuery q = QueryFor(spec);
  const uint64_t total = EstimateModelMemory(q);
  const Placement p = PartitionLayers(spec, {{"A", total}, {"B", total}, {"C", total}}, q);
  ASSERT_EQ(p.assignments.size(), 3u);
  EXPECT_EQ(p.assignments[0], (Assignment{"A", 0, 9}));
  EXPECT_EQ(p.assignments[1], (Assignment{"B", 9, 10}));
  EXPECT_EQ(p.assignments[2], (Assignment{"C", 10, 11}));
}

TEST(PartitionLayers, OversizedLayerIsInfeasible) {
  const ModelSpec spec = ResolveShapes(ModelSpec{{64}, {Input(), Dense(64), Head(2)}});
  const MemoryQuery q = QueryFor(spec);
  const uint64_t dense = EstimateLayerMemory(q)[1];
  EXPECT_EQ(CodeOf([&] { PartitionLayers(spec, {{"A", dense - 1}, {"B", dense - 1}}, q); }),
            ErrorCode::kInfeasiblePartition);
}

TEST(PartitionLayers, PropertiesOnRandomInstances) {
  SplitMix64 rng(8086);
  size_t succeeded = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const MemoryQuery q = QueryFor(spec);
    const auto bytes = EstimateLayerMemory(q);
    const uint64_t total = EstimateModelMemory(q);
    std::vector<PartitionNode> nodes;
    const size_t n = 1 + rng.Below(5);
    for (size_t i = 0; i < n; ++i) {
      nodes.push_back({"N" + std::to_string(i), uint64_t(double(total) * rng.Uniform(0.1, 1.2))});
    }
    Placement p;
    try {
      p = PartitionLayers(spec, nodes, q);
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kInfeasiblePartition);
      continue;
    }
    ++succeeded;
    EXPECT_EQ(p, PartitionLayers(spec, nodes, q));
    ASSERT_FALSE(p.assignments.empty());
    EXPECT_EQ(p.assignments.front().first, 0u);
    EXPECT_EQ(p.assignments.back().end, spec.layers.size());
    size_t next_node = 0;
    for (size_t i = 0; i < p.assignments.size(); ++i) {
      const Assignment &a = p.assignments[i];
      EXPECT_LT(a.first, a.end);
      if (i > 0) {
        EXPECT_EQ(a.first, p.assignments[i - 1].end);
      }
      // Node order is preserved.
      while (next_node < n && nodes[next_node].id != a.node_id) ++next_node;
      ASSERT_LT(next_node, n);
      const uint64_t held = std::accumulate(bytes.begin() + a.first, bytes.begin() + a.end, uint64_t{0});
      EXPECT_LE(held, nodes[next_node].mem_free_bytes);
      ++next_node;
    }
    EXPECT_EQ(p.cut_bytes.size(), p.assignments.size() - 1);
  }
  EXPECT_GT(succeeded, 100u);
}

TEST(PartitionLayers, TwoWaySplitIsAValidSplit) {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelSpec spec = ResolveShapes(RandomModelSpec(rng));
    const MemoryQuery q = QueryFor(spec);
    const auto bytes = EstimateLayerMemory(q);
    const uint64_t total = EstimateModelMemory(q);
    const uint64_t m1 = uint64_t(double(total) * rng.Uniform(0.3, 0.9));
    const uint64_t m2 = uint64_t(double(total) * rng.Uniform(0.3, 0.9));
    std::vector<size_t> valid;
    for (size_t s = 1; s < bytes.size(); ++s) {
      const uint64_t a = std::accumulate(bytes.begin(), bytes.begin() + s, uint64_t{0});
      if (a <= m1 && total - a <= m2) valid.push_back(s);
    }
    if (valid.empty()) continue;
    const Placement p = PartitionLayers(spec, {{"A", m1}, {"B", m2}}, q);
    ASSERT_EQ(p.assignments.size(), 2u);
    // Greedy takes the latest valid boundary.
    EXPECT_EQ(p.assignments[0].end, valid.back());
  }
}

TEST(CutBytes, Examples) {
  const ModelSpec a = ResolveShapes(ModelSpec{{16, 16, 8}, {Input(), Pool(2), Flatten(), Head(2)}});
  Placement p{"P", {{"P", 0, 1}, {"C", 1, 4}}, {}};
  EXPECT_EQ(CutBytes(a, p), std::vector<uint64_t>{8192});
  const ModelSpec b = ResolveShapes(ModelSpec{{4, 4, 16}, {Input(), Flatten(), Head(2)}});
  p = {"P", {{"P", 0, 2}, {"C", 2, 3}}, {}};
  EXPECT_EQ(CutBytes(b, p), std::vector<uint64_t>{1024});
  p = {"P", {{"P", 0, 3}}, {}};
  EXPECT_TRUE(CutBytes(b, p).empty());
}

class ValidateTest : public ::testing::Test {
 protected:
  ModelSpec spec_ = DefaultModelSpec();
  MemoryQuery query_ = QueryFor(spec_);
  uint64_t total_ = EstimateModelMemory(query_);
  NetworkScenario net_ = Chain();

  NetworkScenario Chain() const {
    NetworkScenario net = Star(2, total_, total_);
    net.links.push_back({"C1", "C2", 0.001, 1e8});
    return net;
  }

  Placement Good() const {
    Placement p{"P", {{"P", 0, 4}, {"C1", 4, 8}, {"C2", 8, 11}}, {}};
    p.cut_bytes = CutBytes(spec_, p);
    return p;
  }
  std::vector<Violation> Check(const Placement &p) const { return ValidatePlacement(p, net_, spec_, query_); }
};

TEST_F(ValidateTest, PartitionOutputIsValid) {
  EXPECT_TRUE(Check(Good()).empty());
  const Placement p = PartitionLayers(spec_, net_, {"P", "C1", "C2"}, query_);
  EXPECT_TRUE(Check(p).empty());
}

TEST_F(ValidateTest, CoverageGap) {
  Placement p = Good();
  p.assignments[1].first = 5;
  p.cut_bytes = CutBytes(spec_, p);
  EXPECT_EQ(Kinds(Check(p)), std::vector<ViolationKind>{ViolationKind::kCoverageGap});
  p = Good();
  p.assignments.pop_back();
  p.cut_bytes = CutBytes(spec_, p);
  EXPECT_TRUE(Has(Check(p), ViolationKind::kCoverageGap));
}

TEST_F(ValidateTest, Overlap) {
  Placement p = Good();
  p.assignments[1].first = 3;
  EXPECT_TRUE(Has(Check(p), ViolationKind::kOverlap));
}

TEST_F(ValidateTest, NodeProblems) {
  net_.FindNode("C1")->online = false;
  EXPECT_EQ(Kinds(Check(Good())), std::vector<ViolationKind>{ViolationKind::kNodeOffline});
  net_.FindNode("C1")->online = true;
  net_.FindNode("C2")->mem_free_bytes = 10;
  EXPECT_EQ(Kinds(Check(Good())), std::vector<ViolationKind>{ViolationKind::kMemoryExceeded});
  Placement p = Good();
  p.assignments[2].node_id = "ghost";
  EXPECT_TRUE(Has(Check(p), ViolationKind::kUnknownNode));
}

TEST_F(ValidateTest, ChainLinksEntryAndCuts) {
  EXPECT_EQ(Kinds(Check(Good())), std::vector<ViolationKind>{});
  Placement p = Good();
  std::swap(p.assignments[0].node_id, p.assignments[1].node_id);
  EXPECT_TRUE(Has(Check(p), ViolationKind::kEntryNotParent));
  p = Good();
  p.cut_bytes[0] += 4;
  EXPECT_EQ(Kinds(Check(p)), std::vector<ViolationKind>{ViolationKind::kCutMismatch});
  net_.links.pop_back();
  EXPECT_EQ(Kinds(Check(Good())), std::vector<ViolationKind>{ViolationKind::kMissingLink});
}

TEST_F(ValidateTest, ReportsEveryViolation) {
  net_.FindNode("C1")->online = false;
  Placement p = Good();
  p.assignments[2].first = 9;
  p.cut_bytes = {1, 2};
  const auto kinds = Kinds(Check(p));
  EXPECT_TRUE(Has(Check(p), ViolationKind::kCoverageGap));
  EXPECT_TRUE(Has(Check(p), ViolationKind::kNodeOffline));
  EXPECT_TRUE(Has(Check(p), ViolationKind::kCutMismatch));
  EXPECT_EQ(kinds, Kinds(Check(p)));
  EXPECT_EQ(ViolationName(ViolationKind::kCutMismatch), "CutMismatch");
}

TEST(PlacementJson, RoundTrip) {
  const Placement p{"P", {{"P", 0, 2}, {"C1", 2, 11}}, {3600}};
  const Json j = PlacementToJson(p);
  EXPECT_EQ(j["assignments"][1]["layers"], Json::array({2, 11}));
  EXPECT_EQ(PlacementFromJson(Json::parse(j.dump())), p);
  Json bad = j;
  bad["assignments"][0]["layers"] = {1};
  EXPECT_EQ(CodeOf([&] { PlacementFromJson(bad); }), ErrorCode::kParse);
}

TEST(Scenario, JsonRoundTripAndValidation) {
  NetworkScenario net = Star(2, 100, 200);
  net.cases.push_back({"tight", 2, {{"C1", uint64_t{5}, std::nullopt, 0.25, std::nullopt}}});
  net.Validate();
  const NetworkScenario back = ScenarioFromJson(Json::parse(ScenarioToJson(net).dump()));
  EXPECT_EQ(back.nodes, net.nodes);
  EXPECT_EQ(back.links, net.links);
  EXPECT_EQ(back.parent_id, "P");
  ASSERT_EQ(back.cases.size(), 1u);

  const NetworkScenario tight = back.WithCase("tight");
  EXPECT_EQ(tight.name, "star/tight");
  EXPECT_EQ(tight.max_nodes, 2u);
  EXPECT_EQ(tight.FindNode("C1")->mem_free_bytes, 5u);
  EXPECT_EQ(tight.FindNode("C1")->workload_frac, 0.25);
  EXPECT_TRUE(tight.cases.empty());
  EXPECT_EQ(CodeOf([&] { back.WithCase("nope"); }), ErrorCode::kInvalidArgument);

  NetworkScenario bad = net;
  bad.links.push_back({"C1", "P", 0.0, 1.0});
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kInvalidArgument);
  bad = net;
  bad.nodes[1].workload_frac = 1.5;
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kInvalidArgument);
  bad = net;
  bad.nodes.push_back(bad.nodes[1]);
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kInvalidArgument);
  bad = net;
  bad.links[0].bandwidth_bytes_per_sec = 0.0;
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kInvalidArgument);
}

TEST(Scenario, ShippedFileLoads) {
  const NetworkScenario s = LoadScenario(testing::DataDir() / "paper_fig2.json");
  EXPECT_EQ(s.parent_id, "P");
  EXPECT_EQ(s.cases.size(), 4u);
  const NodeProfile &c4 = *s.FindNode("C4");
  EXPECT_GT(Distance(s.Parent(), c4), s.radius_R);
}

}  // namespace
}  // namespace resmal
