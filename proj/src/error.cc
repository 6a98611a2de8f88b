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
#include "resmal/error.h"

#include <sstream>

#include "resmal/tensor.h"

namespace resmal {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kEmptyTraceSet: return "EmptyTraceSet";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kWrongSide: return "WrongSide";
    case ErrorCode::kUnresolvedShape: return "UnresolvedShape";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kUnfittedModel: return "UnfittedModel";
    case ErrorCode::kInsufficientResources: return "InsufficientResources";
    case ErrorCode::kNoRoute: return "NoRoute";
    case ErrorCode::kInfeasiblePartition: return "InfeasiblePartition";
    case ErrorCode::kUnroutableTransfer: return "UnroutableTransfer";
    case ErrorCode::kAllReplicasOffline: return "AllReplicasOffline";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

bool IsConfigError(ErrorCode code) {
  return code == ErrorCode::kInvalidArgument || code == ErrorCode::kIo || code == ErrorCode::kParse;
}

std::string ShapeToString(const Shape &shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

}  // namespace resmal
