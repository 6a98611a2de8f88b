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
#ifndef RESMAL_ERROR_H_
#define RESMAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace resmal {

enum class ErrorCode {
  // nnkernel
  kShapeMismatch,
  kUnsupported,
  kEmptyCorpus,
  kLabelOutOfRange,
  // featurize
  kEmptyTraceSet,
  kKOutOfRange,
  kEmptyInput,
  kWrongSide,
  // resware
  kUnresolvedShape,
  kOverflow,
  kDegenerateLabels,
  kUnfittedModel,
  // partition / simnet
  kInsufficientResources,
  kNoRoute,
  kInfeasiblePartition,
  kUnroutableTransfer,
  kAllReplicasOffline,
  kDivisionByZero,
  // configuration and file handling
  kInvalidArgument,
  kIo,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

// Configuration errors (bad arguments, unreadable or malformed files) as
// opposed to domain errors raised by the algorithms themselves.
bool IsConfigError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace resmal

#endif  // RESMAL_ERROR_H_
