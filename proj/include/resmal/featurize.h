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
#ifndef RESMAL_FEATURIZE_H_
#define RESMAL_FEATURIZE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resmal/tensor.h"

namespace resmal {

/// Labeled HPC event matrix: one row per sample, one column per event.
struct TraceSet {
  std::vector<std::string> event_names;
  std::vector<std::vector<double>> rows;
  std::vector<size_t> labels;
  std::vector<std::string> class_names;

  size_t num_events() const { return event_names.size(); }
  size_t num_samples() const { return rows.size(); }

  // Throws InvalidArgument when widths, label ranges or finiteness are off.
  void Validate() const;

  std::vector<double> Column(size_t event) const;

  friend bool operator==(const TraceSet &, const TraceSet &) = default;
};

struct RankedEvent {
  std::string name;
  double rho = 0.0;  // signed correlation with the largest magnitude over classes
  size_t rank = 0;   // 1-based
};

// Ordered by rank.
using RankedEvents = std::vector<RankedEvent>;

/// Single-pass Pearson correlation (running co-moments). Returns 0 when
/// either input has zero variance.
double PearsonCorrelation(std::span<const double> x, std::span<const double> y);

/// For every event, the one-vs-rest correlation against each class
/// indicator; the class with the largest |rho| wins and keeps its sign.
/// Ranks are by descending |rho|, ties broken by event name.
RankedEvents RankEvents(const TraceSet &traces);

std::vector<std::string> SelectTopEvents(const RankedEvents &ranked, size_t k);

/// Column indices of `names` inside `traces`, in the given order.
std::vector<size_t> EventIndices(const TraceSet &traces, std::span<const std::string> names);

struct GrayImage {
  size_t side = 0;
  std::vector<uint8_t> pixels;  // side * side, row-major
  size_t label = 0;

  friend bool operator==(const GrayImage &, const GrayImage &) = default;
};

inline constexpr size_t kFullSide = 256;
inline constexpr size_t kModelSide = 32;

/// round(x) with halves rounded away from zero, as a byte in [0, 255].
uint8_t RoundToByte(double x);

/// Pixel stream = min-max scaled trace values followed by the raw bytes,
/// truncated or zero-padded to 256 * 256.
GrayImage ToGrayscale(std::span<const double> trace_values, std::span<const uint8_t> binary_bytes, size_t label = 0);

/// 256x256 -> 32x32 by the rounded mean of each 8x8 block.
GrayImage Downsample(const GrayImage &image);

/// (side, side, 1) tensor with pixels scaled to [0, 1].
Tensor ImageToTensor(const GrayImage &image);

struct CorpusConfig {
  size_t classes = 6;
  size_t samples_per_class = 200;
  size_t events = 16;
  size_t planted_events = 4;  // events carrying a class-dependent mean shift
  double noise = 1.0;         // trace noise std; byte noise is 16x this
  double shift = 4.0;         // planted mean shift, in noise-free units
  uint64_t seed = 42;
};

struct SyntheticCorpus {
  TraceSet traces;
  std::vector<std::vector<uint8_t>> blobs;  // one byte blob per sample
  std::vector<size_t> planted;              // ground-truth discriminative event indices
};

/// Seeded stand-in for a real malware/benign HPC corpus. Each class draws
/// from its own substream (seed mixed with the class id), so classes are
/// independent of generation order.
SyntheticCorpus GenSyntheticCorpus(const CorpusConfig &config);

std::vector<std::string> DefaultClassNames(size_t classes);

/// Image pipeline for sample `index`: to_grayscale(row, blob) then downsample.
GrayImage CorpusImage(const SyntheticCorpus &corpus, size_t index);

}  // namespace resmal

#endif  // RESMAL_FEATURIZE_H_
