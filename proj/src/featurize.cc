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
#include "resmal/featurize.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resmal/rng.h"

namespace resmal {

void TraceSet::Validate() const {
  if (class_names.empty()) throw Error(ErrorCode::kInvalidArgument, "trace set has no classes");
  if (labels.size() != rows.size()) throw Error(ErrorCode::kInvalidArgument, "one label per row required");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != event_names.size()) {
      throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                                   " values for " + std::to_string(event_names.size()) + " events");
    }
    if (labels[i] >= class_names.size()) {
      throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(i) + " label out of range");
    }
    for (const double v : rows[i]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(i) + " not finite");
    }
  }
}

std::vector<double> TraceSet::Column(size_t event) const {
  std::vector<double> col;
  col.reserve(rows.size());
  for (const auto &row : rows) col.push_back(row[event]);
  return col;
}

double PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  double mean_x = 0.0, mean_y = 0.0, co = 0.0, var_x = 0.0, var_y = 0.0;
  const size_t n = std::min(x.size(), y.size());
  for (size_t i = 0; i < n; ++i) {
    const double count = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    mean_x += dx / count;
    mean_y += dy / count;
    co += dx * (y[i] - mean_y);
    var_x += dx * (x[i] - mean_x);
    var_y += dy * (y[i] - mean_y);
  }
  if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
  return std::clamp(co / std::sqrt(var_x * var_y), -1.0, 1.0);
}

RankedEvents RankEvents(const TraceSet &traces) {
  if (traces.num_samples() < 2 || traces.num_events() == 0) {
    throw Error(ErrorCode::kEmptyTraceSet, "ranking needs >= 2 samples and >= 1 event");
  }
  traces.Validate();
  std::vector<std::vector<double>> indicators(traces.class_names.size(),
                                              std::vector<double>(traces.num_samples(), 0.0));
  for (size_t i = 0; i < traces.num_samples(); ++i) indicators[traces.labels[i]][i] = 1.0;

  RankedEvents ranked;
  for (size_t e = 0; e < traces.num_events(); ++e) {
    const std::vector<double> column = traces.Column(e);
    double best = 0.0;
    for (const auto &indicator : indicators) {
      const double rho = PearsonCorrelation(column, indicator);
      if (std::abs(rho) > std::abs(best)) best = rho;
    }
    ranked.push_back({traces.event_names[e], best, 0});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedEvent &a, const RankedEvent &b) {
    if (std::abs(a.rho) != std::abs(b.rho)) return std::abs(a.rho) > std::abs(b.rho);
    return a.name < b.name;
  });
  for (size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
  return ranked;
}

std::vector<std::string> SelectTopEvents(const RankedEvents &ranked, size_t k) {
  if (k < 1 || k > ranked.size()) {
    throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(k) + " outside [1, " + std::to_string(ranked.size()) + "]");
  }
  std::vector<std::string> names;
  for (size_t i = 0; i < k; ++i) names.push_back(ranked[i].name);
  return names;
}

std::vector<size_t> EventIndices(const TraceSet &traces, std::span<const std::string> names) {
  std::vector<size_t> indices;
  for (const std::string &name : names) {
    const auto it = std::find(traces.event_names.begin(), traces.event_names.end(), name);
    if (it == traces.event_names.end()) throw Error(ErrorCode::kInvalidArgument, "unknown event '" + name + "'");
    indices.push_back(static_cast<size_t>(it - traces.event_names.begin()));
  }
  return indices;
}

uint8_t RoundToByte(double x) { return static_cast<uint8_t>(std::clamp(std::round(x), 0.0, 255.0)); }

GrayImage ToGrayscale(std::span<const double> trace_values, std::span<const uint8_t> binary_bytes, size_t label) {
  if (trace_values.empty() && binary_bytes.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no trace values and no binary bytes");
  }
  constexpr size_t kPixels = kFullSide * kFullSide;
  GrayImage image{kFullSide, std::vector<uint8_t>(kPixels, 0), label};
  size_t pos = 0;
  if (!trace_values.empty()) {
    const auto [lo, hi] = std::minmax_element(trace_values.begin(), trace_values.end());
    const double min = *lo, range = *hi - *lo;
    for (const double v : trace_values) {
      if (pos == kPixels) break;
      image.pixels[pos++] = range > 0.0 ? RoundToByte(255.0 * (v - min) / range) : 0;
    }
  }
  const size_t room = kPixels - pos;
  const size_t take = std::min(room, binary_bytes.size());
  std::copy_n(binary_bytes.begin(), take, image.pixels.begin() + static_cast<std::ptrdiff_t>(pos));
  return image;
}

GrayImage Downsample(const GrayImage &image) {
  if (image.side != kFullSide || image.pixels.size() != kFullSide * kFullSide) {
    throw Error(ErrorCode::kWrongSide, "downsample needs a 256x256 image, got side " + std::to_string(image.side));
  }
  constexpr size_t kBlock = kFullSide / kModelSide;
  GrayImage out{kModelSide, std::vector<uint8_t>(kModelSide * kModelSide, 0), image.label};
  for (size_t r = 0; r < kModelSide; ++r) {
    for (size_t c = 0; c < kModelSide; ++c) {
      uint32_t sum = 0;
      for (size_t i = 0; i < kBlock; ++i) {
        for (size_t j = 0; j < kBlock; ++j) sum += image.pixels[(r * kBlock + i) * kFullSide + c * kBlock + j];
      }
      // Integer form of round-half-away for a non-negative mean of 64 bytes.
      out.pixels[r * kModelSide + c] = static_cast<uint8_t>((sum + kBlock * kBlock / 2) / (kBlock * kBlock));
    }
  }
  return out;
}

Tensor ImageToTensor(const GrayImage &image) {
  std::vector<float> data(image.pixels.size());
  for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(image.pixels[i]) / 255.0f;
  return Tensor(Shape{image.side, image.side, 1}, std::move(data));
}

std::vector<std::string> DefaultClassNames(size_t classes) {
  static const std::vector<std::string> kNames = {"benign", "backdoor", "rootkit", "trojan", "virus", "worm"};
  if (classes == kNames.size()) return kNames;
  std::vector<std::string> names;
  for (size_t k = 0; k < classes; ++k) names.push_back("class_" + std::to_string(k));
  return names;
}

namespace {

// Mean shift of planted event j for class k, in units of config.shift.
// Class 0 (benign) carries no shift; every other class has its own pattern.
double PlantedLevel(size_t k, size_t j, size_t classes) {
  if (k == 0 || classes < 2) return 0.0;
  return static_cast<double>((k + j) % classes) / static_cast<double>(classes - 1);
}

// Vertical stripes whose width and brightness depend on the class; widths are
// 8-pixel multiples so the texture survives the 8x8 downsample.
std::vector<uint8_t> ClassTexture(size_t k, size_t offset, size_t length, double noise, SplitMix64 &rng) {
  const size_t width = 8 * (k + 1);
  const size_t phase = static_cast<size_t>(rng.Below(2 * width));
  std::vector<uint8_t> blob(length);
  for (size_t i = 0; i < length; ++i) {
    const size_t col = (offset + i) % kFullSide;
    const bool bright = ((col + phase) / width) % 2 == 1;
    const double dark = 30.0 + 24.0 * static_cast<double>(k % 6);
    const double base = bright ? dark + 100.0 : dark;
    const double jitter = noise > 0.0 ? 16.0 * noise * rng.Normal() : 0.0;
    blob[i] = RoundToByte(base + jitter);
  }
  return blob;
}

}  // namespace

SyntheticCorpus GenSyntheticCorpus(const CorpusConfig &config) {
  if (config.samples_per_class < 1) throw Error(ErrorCode::kInvalidArgument, "samples_per_class must be >= 1");
  if (config.classes < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 classes");
  if (config.events < 1 || config.planted_events > config.events) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= events and planted_events <= events");
  }
  SyntheticCorpus corpus;
  TraceSet &traces = corpus.traces;
  traces.class_names = DefaultClassNames(config.classes);
  for (size_t e = 0; e < config.events; ++e) traces.event_names.push_back("event_" + std::to_string(e));

  std::vector<size_t> order(config.events);
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 picker(MixSeed(config.seed, config.classes));
  picker.Shuffle(std::span<size_t>(order));
  corpus.planted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.planted_events));
  std::sort(corpus.planted.begin(), corpus.planted.end());

  const size_t blob_bytes = kFullSide * kFullSide - config.events;
  for (size_t k = 0; k < config.classes; ++k) {
    SplitMix64 rng(MixSeed(config.seed, k));
    std::vector<double> mean(config.events);
    for (size_t e = 0; e < config.events; ++e) mean[e] = 100.0 * static_cast<double>(e + 1);
    for (size_t j = 0; j < corpus.planted.size(); ++j) {
      mean[corpus.planted[j]] += config.shift * PlantedLevel(k, j, config.classes);
    }
    for (size_t s = 0; s < config.samples_per_class; ++s) {
      std::vector<double> row(config.events);
      for (size_t e = 0; e < config.events; ++e) {
        row[e] = mean[e] + (config.noise > 0.0 ? config.noise * rng.Normal() : 0.0);
      }
      traces.rows.push_back(std::move(row));
      traces.labels.push_back(k);
      corpus.blobs.push_back(ClassTexture(k, config.events, blob_bytes, config.noise, rng));
    }
  }
  return corpus;
}

GrayImage CorpusImage(const SyntheticCorpus &corpus, size_t index) {
  return Downsample(ToGrayscale(corpus.traces.rows[index], corpus.blobs[index], corpus.traces.labels[index]));
}

}  // namespace resmal
