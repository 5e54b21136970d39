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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "graphreview/transport.hpp"

namespace graphreview {

using TemplateValues = std::vector<std::pair<std::string, std::string>>;

// A system/user message pair with {name} placeholders.
struct PromptTemplate {
  std::string system;
  std::string user;

  std::vector<ChatMessage> render(const TemplateValues& values) const;
  // Content hash; changes whenever either message changes.
  std::string hash() const;
};

// Prompt files put the system message first, then a line reading exactly
// "<<<USER>>>", then the user message. Files without the marker are a single
// user message.
inline constexpr std::string_view kUserMarker = "<<<USER>>>\n";

PromptTemplate parse_prompt_file(const std::string& contents);

struct PromptSet {
  PromptTemplate scoring;          // inference-time p_s
  PromptTemplate comparison;       // inference-time p_c
  PromptTemplate scoring_data;     // training-data variant with {ground_truth}
  PromptTemplate comparison_data;  // training-data variant with {ground_truth}
  PromptTemplate consolidation;
  PromptTemplate criteria_optimization;
  PromptTemplate answer_evaluation;
  std::string criteria;  // substituted into {criteria}

  static PromptSet defaults();
  // Reads <name>.txt for each template present in `dir` (scoring.txt,
  // comparison.txt, ...) and criteria.txt; missing files keep the default.
  static PromptSet load(const std::filesystem::path& dir);
};

}  // namespace graphreview
