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
#include "resmal/corpus_io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace resmal {

namespace {

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

double ParseDouble(std::string_view cell, size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

std::string TracesToCsv(const TraceSet &traces) {
  traces.Validate();
  std::ostringstream os;
  for (const std::string &name : traces.event_names) os << name << ',';
  os << "label\n";
  char buf[32];
  for (size_t i = 0; i < traces.rows.size(); ++i) {
    for (const double v : traces.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << buf << ',';
    }
    os << traces.labels[i] << '\n';
  }
  return os.str();
}

TraceSet TracesFromCsv(std::string_view text, const std::vector<std::string> &class_names) {
  TraceSet t;
  size_t line_no = 0;
  size_t max_label = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    const std::string_view line = Trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto cells = SplitLine(line);
    if (t.event_names.empty()) {
      if (cells.size() < 2 || Trim(cells.back()) != "label") {
        throw Error(ErrorCode::kParse, "trace CSV header must list events then 'label'");
      }
      for (size_t i = 0; i + 1 < cells.size(); ++i) t.event_names.emplace_back(Trim(cells[i]));
      continue;
    }
    if (cells.size() != t.event_names.size() + 1) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(t.event_names.size() + 1) + " cells");
    }
    std::vector<double> row;
    for (size_t i = 0; i + 1 < cells.size(); ++i) row.push_back(ParseDouble(Trim(cells[i]), line_no));
    const double label = ParseDouble(Trim(cells.back()), line_no);
    if (label < 0 || label != static_cast<double>(static_cast<size_t>(label))) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": label must be a class id");
    }
    t.rows.push_back(std::move(row));
    t.labels.push_back(static_cast<size_t>(label));
    max_label = std::max(max_label, t.labels.back());
  }
  if (t.event_names.empty()) throw Error(ErrorCode::kParse, "trace CSV has no header");
  if (!class_names.empty()) {
    t.class_names = class_names;
  } else {
    for (size_t k = 0; k <= max_label; ++k) t.class_names.push_back("class_" + std::to_string(k));
  }
  t.Validate();
  return t;
}

std::string ImageToPgm(const GrayImage &image) {
  if (image.pixels.size() != image.side * image.side || image.side == 0) {
    throw Error(ErrorCode::kInvalidArgument, "image pixel count does not match its side");
  }
  std::string out = "P5\n" + std::to_string(image.side) + " " + std::to_string(image.side) + "\n255\n";
  out.append(reinterpret_cast<const char *>(image.pixels.data()), image.pixels.size());
  return out;
}

GrayImage ImageFromPgm(std::string_view bytes, size_t label) {
  size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto number = [&]() {
    const std::string_view tok = token();
    size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw Error(ErrorCode::kParse, "bad PGM header");
    return v;
  };
  if (token() != "P5") throw Error(ErrorCode::kParse, "not a binary PGM (P5)");
  const size_t w = number(), h = number(), maxval = number();
  if (w != h || w == 0) throw Error(ErrorCode::kParse, "PGM image must be square");
  if (maxval != 255) throw Error(ErrorCode::kParse, "PGM maxval must be 255");
  ++pos;  // single whitespace after maxval
  if (bytes.size() < pos + w * h) throw Error(ErrorCode::kParse, "PGM pixel data truncated");
  GrayImage img;
  img.side = w;
  img.label = label;
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + w * h));
  return img;
}

Json ManifestToJson(const CorpusManifest &m) {
  Json samples = Json::array();
  for (const ManifestEntry &e : m.entries) {
    samples.push_back({{"file", e.file}, {"label", e.label}, {"class", m.class_names.at(e.label)}});
  }
  return Json{{"class_names", m.class_names}, {"side", m.side},          {"traces", m.traces_file},
              {"image_events", m.image_events}, {"generator", m.generator}, {"samples", samples}};
}

CorpusManifest ManifestFromJson(const Json &json) {
  CorpusManifest m;
  m.class_names = Require<std::vector<std::string>>(json, "class_names");
  m.side = Optional<size_t>(json, "side", kModelSide);
  m.traces_file = Optional<std::string>(json, "traces", "");
  m.image_events = Optional<std::vector<std::string>>(json, "image_events", {});
  m.generator = Optional<Json>(json, "generator", Json::object());
  for (const Json &js : Require<Json>(json, "samples")) {
    ManifestEntry e{Require<std::string>(js, "file"), Require<size_t>(js, "label")};
    if (e.label >= m.class_names.size()) throw Error(ErrorCode::kParse, "manifest label out of range: " + e.file);
    m.entries.push_back(e);
  }
  return m;
}

CorpusManifest LoadManifest(const std::filesystem::path &path) { return ManifestFromJson(ReadJsonFile(path)); }

std::vector<GrayImage> LoadManifestImages(const std::filesystem::path &path, const CorpusManifest &manifest) {
  std::vector<GrayImage> images;
  images.reserve(manifest.entries.size());
  const std::filesystem::path dir = path.parent_path();
  for (const ManifestEntry &e : manifest.entries) {
    GrayImage img = ImageFromPgm(ReadTextFile(dir / e.file), e.label);
    if (img.side != manifest.side) throw Error(ErrorCode::kParse, e.file + ": side differs from the manifest");
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<LabeledSample> ImagesToSamples(const std::vector<GrayImage> &images) {
  std::vector<LabeledSample> samples;
  samples.reserve(images.size());
  for (const GrayImage &img : images) samples.push_back({ImageToTensor(img), img.label});
  return samples;
}

}  // namespace resmal
