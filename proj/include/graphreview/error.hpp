/*
 * Copyright 2026 The GraphReview Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphreview {

// Stable error identifiers. The CLI prints them verbatim, so renaming one is a
// breaking change for scripts that parse the error line.
enum class ErrorCode {
  kParseError,
  kDimensionMismatch,
  kDuplicateId,
  kMissingEmbedding,
  kInfeasible,
  kEmptyCandidateSet,
  kOverlapError,
  kBackendUnavailable,
  kMalformedResponse,
  kMissingLabel,
  kEmptyInput,
  kSizeMismatch,
  kNotStochastic,
  kLabelRequired,
  kUnknownMetric,
  kInvalidParam,
  kInvalidDistribution,
  kDegenerateInput,
  kDegenerateLabels,
  kUnknownPaper,
  kMalformedReport,
  kIoError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace graphreview
