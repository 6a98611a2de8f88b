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

#include <algorithm>
#include <cmath>

#include "resmal/corpus_io.h"
#include "resmal/error.h"
#include "resmal/featurize.h"
#include "resmal/metrics.h"
#include "test_support.h"

namespace resmal {
namespace {

double TwoPassPearson(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: nothing thrown
}

TEST(Pearson, MatchesTwoPassOracle) {
  SplitMix64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const size_t n = 2 + rng.Below(300);
    std::vector<double> x(n), y(n);
    const double offset = rng.Uniform(-1e6, 1e6);
    for (size_t i = 0; i < n; ++i) {
      x[i] = offset + rng.Normal() * 50.0;
      y[i] = 0.3 * x[i] + rng.Normal() * 1e3;
    }
    const double rho = PearsonCorrelation(x, y);
    EXPECT_NEAR(rho, TwoPassPearson(x, y), 1e-9);
    EXPECT_LE(std::abs(rho), 1.0);
  }
}

TEST(Pearson, ZeroVarianceIsZero) {
  const std::vector<double> c(10, 4.0), y = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(PearsonCorrelation(c, y), 0.0);
}

TraceSet IndicatorTraces() {
  TraceSet t;
  t.event_names = {"noise", "flat", "ind0"};
  t.class_names = {"a", "b", "c"};
  SplitMix64 rng(5);
  for (size_t i = 0; i < 30; ++i) {
    const size_t label = i % 3;
    t.rows.push_back({rng.Uniform(), 7.0, label == 0 ? 1.0 : 0.0});
    t.labels.push_back(label);
  }
  return t;
}

TEST(RankEvents, IndicatorAndConstant) {
  const RankedEvents r = RankEvents(IndicatorTraces());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].name, "ind0");
  EXPECT_NEAR(r[0].rho, 1.0, 1e-12);
  EXPECT_EQ(r[0].rank, 1u);
  EXPECT_EQ(r.back().name, "flat");
  EXPECT_EQ(r.back().rho, 0.0);
}

TEST(RankEvents, AffineInvariant) {
  CorpusConfig cfg;
  cfg.samples_per_class = 30;
  cfg.seed = 12;
  TraceSet t = GenSyntheticCorpus(cfg).traces;
  const RankedEvents before = RankEvents(t);
  SplitMix64 rng(6);
  std::vector<std::pair<double, double>> ab(t.num_events());
  for (auto &p : ab) p = {rng.Uniform(0.1, 10.0), rng.Uniform(-100.0, 100.0)};
  for (auto &row : t.rows)
    for (size_t e = 0; e < row.size(); ++e) row[e] = ab[e].first * row[e] + ab[e].second;
  const RankedEvents after = RankEvents(t);
  for (size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].name, after[i].name);
    EXPECT_NEAR(before[i].rho, after[i].rho, 1e-9);
  }
}

TEST(RankEvents, TooFewSamples) {
  TraceSet t;
  t.event_names = {"e"};
  t.class_names = {"a", "b"};
  t.rows = {{1.0}};
  t.labels = {0};
  EXPECT_EQ(CodeOf([&] { RankEvents(t); }), ErrorCode::kEmptyTraceSet);
}

TEST(SelectTopEvents, Examples) {
  const RankedEvents r = RankEvents(IndicatorTraces());
  EXPECT_EQ(SelectTopEvents(r, 3).size(), 3u);
  EXPECT_EQ(SelectTopEvents(r, 1), std::vector<std::string>{"ind0"});
  EXPECT_EQ(CodeOf([&] { SelectTopEvents(r, 0); }), ErrorCode::kKOutOfRange);
  EXPECT_EQ(CodeOf([&] { SelectTopEvents(r, 4); }), ErrorCode::kKOutOfRange);
}

TEST(SelectTopEvents, PlantedEventsRecovered) {
  CorpusConfig cfg;
  cfg.seed = 21;
  const SyntheticCorpus c = GenSyntheticCorpus(cfg);
  const auto top = SelectTopEvents(RankEvents(c.traces), cfg.planted_events);
  for (size_t p : c.planted) {
    EXPECT_NE(std::find(top.begin(), top.end(), c.traces.event_names[p]), top.end());
  }
}

TEST(ToGrayscale, Examples) {
  const std::vector<double> single = {-3.5};
  const GrayImage a = ToGrayscale(single, {});
  EXPECT_EQ(a.side, 256u);
  EXPECT_EQ(std::count(a.pixels.begin(), a.pixels.end(), 0), 65536);

  const std::vector<double> trace = {0.0, 100.0, 50.0};
  const GrayImage b = ToGrayscale(trace, {});
  EXPECT_EQ(b.pixels[0], 0);
  EXPECT_EQ(b.pixels[1], 255);
  EXPECT_EQ(b.pixels[2], 128);

  std::vector<uint8_t> bytes(65536);
  SplitMix64 rng(2);
  for (auto &v : bytes) v = uint8_t(rng.Below(256));
  EXPECT_EQ(ToGrayscale({}, bytes).pixels, bytes);

  std::vector<uint8_t> longer(70000, 9);
  const GrayImage c = ToGrayscale(trace, longer);
  EXPECT_EQ(c.pixels.size(), 65536u);
  EXPECT_EQ(c.pixels[3], 9);
  EXPECT_EQ(c.pixels.back(), 9);

  EXPECT_EQ(CodeOf([] { ToGrayscale({}, {}); }), ErrorCode::kEmptyInput);
}

TEST(RoundToByte, HalfAwayFromZero) {
  EXPECT_EQ(RoundToByte(127.5), 128);
  EXPECT_EQ(RoundToByte(127.49), 127);
  EXPECT_EQ(RoundToByte(-4.0), 0);
  EXPECT_EQ(RoundToByte(300.0), 255);
}

GrayImage Full(auto &&pixel) {
  GrayImage g{256, std::vector<uint8_t>(65536), 0};
  for (size_t r = 0; r < 256; ++r)
    for (size_t c = 0; c < 256; ++c) g.pixels[r * 256 + c] = pixel(r, c);
  return g;
}

TEST(Downsample, Examples) {
  const GrayImage flat = Downsample(Full([](size_t, size_t) { return uint8_t(100); }));
  EXPECT_EQ(flat.side, 32u);
  for (auto p : flat.pixels) EXPECT_EQ(p, 100);

  // Each 8x8 block: top four rows 0, bottom four 255.
  const GrayImage halves = Downsample(Full([](size_t r, size_t) { return uint8_t(r % 8 < 4 ? 0 : 255); }));
  for (auto p : halves.pixels) EXPECT_EQ(p, 128);

  const GrayImage checker = Downsample(Full([](size_t r, size_t c) { return uint8_t((r + c) % 2 ? 255 : 0); }));
  for (auto p : checker.pixels) EXPECT_EQ(p, 128);

  GrayImage small{32, std::vector<uint8_t>(1024), 0};
  EXPECT_EQ(CodeOf([&] { Downsample(small); }), ErrorCode::kWrongSide);
}

TEST(Downsample, MatchesBlockMeanOracle) {
  SplitMix64 rng(44);
  const GrayImage src = Full([&](size_t, size_t) { return uint8_t(rng.Below(256)); });
  const GrayImage out = Downsample(src);
  for (size_t br = 0; br < 32; ++br) {
    for (size_t bc = 0; bc < 32; ++bc) {
      int sum = 0;
      for (size_t r = 0; r < 8; ++r)
        for (size_t c = 0; c < 8; ++c) sum += src.pixels[(br * 8 + r) * 256 + bc * 8 + c];
      const int want = (2 * sum + 64) / 128;  // round half up on non-negative
      EXPECT_EQ(out.pixels[br * 32 + bc], want);
    }
  }
}

TEST(ImageToTensor, ScalesToUnit) {
  GrayImage g{2, {0, 255, 51, 102}, 0};
  const Tensor t = ImageToTensor(g);
  EXPECT_EQ(t.shape(), (Shape{2, 2, 1}));
  EXPECT_FLOAT_EQ(t[1], 1.0f);
  EXPECT_FLOAT_EQ(t[2], 0.2f);
}

TEST(Corpus, DeterministicAndShaped) {
  CorpusConfig cfg;
  cfg.seed = 1;
  cfg.samples_per_class = 20;
  const SyntheticCorpus a = GenSyntheticCorpus(cfg);
  const SyntheticCorpus b = GenSyntheticCorpus(cfg);
  EXPECT_EQ(a.traces, b.traces);
  EXPECT_EQ(a.blobs, b.blobs);
  EXPECT_EQ(a.traces.num_samples(), 120u);
  EXPECT_EQ(a.planted.size(), cfg.planted_events);
  a.traces.Validate();
  for (size_t i = 0; i < a.traces.num_samples(); i += 17) {
    const GrayImage img = CorpusImage(a, i);
    EXPECT_EQ(img, CorpusImage(b, i));
    EXPECT_EQ(img.side, 32u);
    EXPECT_EQ(img.pixels.size(), 1024u);
  }
}

TEST(Corpus, NoiseFreeRowsRepeatWithinClass) {
  CorpusConfig cfg;
  cfg.noise = 0.0;
  cfg.samples_per_class = 5;
  const SyntheticCorpus c = GenSyntheticCorpus(cfg);
  for (size_t i = 0; i < c.traces.num_samples(); ++i) {
    const size_t first = c.traces.labels[i] * 5;
    EXPECT_EQ(c.traces.rows[i], c.traces.rows[first]);
  }
}

TEST(Corpus, RejectsBadConfig) {
  CorpusConfig cfg;
  cfg.classes = 1;
  EXPECT_EQ(CodeOf([&] { GenSyntheticCorpus(cfg); }), ErrorCode::kInvalidArgument);
  cfg = {};
  cfg.planted_events = cfg.events + 1;
  EXPECT_EQ(CodeOf([&] { GenSyntheticCorpus(cfg); }), ErrorCode::kInvalidArgument);
}

TEST(CorpusIo, TracesCsvRoundTrip) {
  CorpusConfig cfg;
  cfg.samples_per_class = 7;
  const TraceSet t = GenSyntheticCorpus(cfg).traces;
  const std::string csv = TracesToCsv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')).rfind(",label"), csv.find('\n') - 6);
  EXPECT_EQ(TracesFromCsv(csv, t.class_names), t);
  const TraceSet generic = TracesFromCsv(csv);
  EXPECT_EQ(generic.class_names.front(), "class_0");
  EXPECT_EQ(generic.rows, t.rows);
}

TEST(CorpusIo, PgmRoundTrip) {
  GrayImage g{32, std::vector<uint8_t>(1024), 4};
  for (size_t i = 0; i < 1024; ++i) g.pixels[i] = uint8_t(i * 7);
  const std::string pgm = ImageToPgm(g);
  EXPECT_EQ(pgm.substr(0, 2), "P5");
  EXPECT_EQ(ImageFromPgm(pgm, 4), g);
  EXPECT_THROW(ImageFromPgm("P2\n2 2\n255\n0 0 0 0"), Error);
  EXPECT_THROW(ImageFromPgm(pgm.substr(0, pgm.size() - 3)), Error);
}

TEST(CorpusIo, ManifestRoundTrip) {
  CorpusManifest m;
  m.class_names = DefaultClassNames(6);
  m.traces_file = "traces.csv";
  m.image_events = {"event_3", "event_1"};
  m.entries = {{"images/00000.pgm", 0}, {"images/00001.pgm", 5}};
  m.generator = Json{{"seed", 42}};
  EXPECT_EQ(ManifestFromJson(Json::parse(ManifestToJson(m).dump())), m);
}

TEST(Metrics, PerfectAndConfused) {
  const std::vector<size_t> truth = {0, 0, 1, 1, 2, 2};
  const ClassificationMetrics perfect = Classify(truth, truth, 3);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.macro_f1, 1.0);
  const std::vector<size_t> pred = {0, 1, 1, 1, 2, 0};
  const ClassificationMetrics m = Classify(pred, truth, 3);
  EXPECT_DOUBLE_EQ(m.accuracy, 4.0 / 6.0);
  EXPECT_EQ(m.confusion[0][1], 1u);
  EXPECT_EQ(m.confusion[2][0], 1u);
  // class 0: p 1/2 r 1/2; class 1: p 2/3 r 1; class 2: p 1 r 1/2.
  const double f0 = 0.5, f1 = 0.8, f2 = 2.0 / 3.0;
  EXPECT_NEAR(m.macro_f1, (f0 + f1 + f2) / 3.0, 1e-12);
  EXPECT_NEAR(m.macro_recall, (0.5 + 1.0 + 0.5) / 3.0, 1e-12);
}

TEST(Metrics, StratifiedSplit) {
  std::vector<size_t> labels;
  for (size_t k = 0; k < 6; ++k) labels.insert(labels.end(), 200, k);
  const Split s = StratifiedSplit(labels, 0.7, 42);
  EXPECT_EQ(s.train.size(), 840u);
  EXPECT_EQ(s.test.size(), 360u);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  std::vector<size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(StratifiedSplit(labels, 0.7, 42).train, s.train);
}

}  // namespace
}  // namespace resmal
