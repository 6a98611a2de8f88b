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
#ifndef RESMAL_CORPUS_IO_H_
#define RESMAL_CORPUS_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resmal/featurize.h"
#include "resmal/io.h"
#include "resmal/nnkernel.h"

namespace resmal {

/// Header `event_0,...,event_{n-1},label`, one row per sample. Values are
/// written with 17 significant digits so a reload is exact.
std::string TracesToCsv(const TraceSet &traces);

/// Parses the CSV above. Class names are taken from `class_names` when
/// given, otherwise "class_<k>" up to the largest label.
TraceSet TracesFromCsv(std::string_view text, const std::vector<std::string> &class_names = {});

/// Binary PGM (P5, maxval 255).
std::string ImageToPgm(const GrayImage &image);
GrayImage ImageFromPgm(std::string_view bytes, size_t label = 0);

struct ManifestEntry {
  std::string file;  // relative to the manifest's directory
  size_t label = 0;

  friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

struct CorpusManifest {
  std::vector<std::string> class_names;
  size_t side = kModelSide;
  std::string traces_file;
  std::vector<std::string> image_events;  // trace events placed in each image
  std::vector<ManifestEntry> entries;
  Json generator;  // generator settings, informational

  friend bool operator==(const CorpusManifest &, const CorpusManifest &) = default;
};

Json ManifestToJson(const CorpusManifest &manifest);
CorpusManifest ManifestFromJson(const Json &json);
CorpusManifest LoadManifest(const std::filesystem::path &path);

/// Reads every image listed in the manifest at `path`.
std::vector<GrayImage> LoadManifestImages(const std::filesystem::path &path, const CorpusManifest &manifest);

std::vector<LabeledSample> ImagesToSamples(const std::vector<GrayImage> &images);

}  // namespace resmal

#endif  // RESMAL_CORPUS_IO_H_
