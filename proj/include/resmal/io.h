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
#ifndef RESMAL_IO_H_
#define RESMAL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "resmal/error.h"

namespace resmal {

using Json = nlohmann::json;

std::string ReadTextFile(const std::filesystem::path &path);

Json ReadJsonFile(const std::filesystem::path &path);

// Writes to a sibling temporary file and renames it into place, so a failed
// run never leaves a partial artifact behind.
void WriteFileAtomic(const std::filesystem::path &path, std::string_view contents);

void WriteJsonFile(const std::filesystem::path &path, const Json &value);

// Typed field access that reports a Parse error naming the missing key.
template <typename T>
T Require(const Json &obj, const char *key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T Optional(const Json &obj, const char *key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  return Require<T>(obj, key);
}

}  // namespace resmal

#endif  // RESMAL_IO_H_
