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
#include "graphreview/error.hpp"

namespace graphreview {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kEmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::kOverlapError: return "OverlapError";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kNotStochastic: return "NotStochastic";
    case ErrorCode::kLabelRequired: return "LabelRequired";
    case ErrorCode::kUnknownMetric: return "UnknownMetric";
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kUnknownPaper: return "UnknownPaper";
    case ErrorCode::kMalformedReport: return "MalformedReport";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace graphreview
