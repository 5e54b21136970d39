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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphreview/aggregate.hpp"
#include "graphreview/corpus.hpp"
#include "graphreview/driver.hpp"
#include "graphreview/prompts.hpp"
#include "graphreview/transport.hpp"

namespace graphreview {

struct RelatedPair {
  std::string other_id;
  int other_year = 0;
  std::string citation;  // "(#k, year)"
  std::string pair_comparison;
  std::string winner_id;
};

struct EvidenceBundle {
  std::string paper_id;
  std::string single_paper_review;
  std::vector<RelatedPair> related_pairs;
  std::size_t ranking = 0;  // 1-based
  std::size_t total = 0;    // n
  Decision decision = Decision::kReject;

  util::Json to_json() const;
};

// Evidence for one submission from the best round of `run`. Related pairs are
// the committed edges incident to the paper, in edge order. Throws
// UnknownPaper for ids that are not ranked submissions.
EvidenceBundle build_bundle(const std::string& paper_id, const Corpus& corpus,
                            const RunResult& run);

struct ReviewReport {
  std::string ranking_line;
  std::string decision_line;
  std::string summary;
  std::string advantages;
  std::string disadvantages;
  std::string questions;
  std::string suggestions;

  friend bool operator==(const ReviewReport&, const ReviewReport&) = default;
};

// Requires all seven headers in order; both "**Name:**" and "**Name**:" are
// accepted. Section bodies are trimmed. Throws MalformedReport.
ReviewReport parse_report(const std::string& text);
std::string render_report(const ReviewReport& report);

// Mechanical report assembled from the bundle alone.
ReviewReport fallback_report(const EvidenceBundle& bundle);

std::string engine_ranking_line(const EvidenceBundle& bundle);

struct ConsolidationOutcome {
  std::string paper_id;
  ReviewReport report;
  bool used_fallback = false;
  int attempts = 0;
  std::vector<std::string> raw_responses;
  // Set when the model's own ranking or decision differed from the engine's.
  std::optional<std::string> disagreement;
};

// One consolidation call, one retry with a format reminder on a malformed
// reply, then the fallback. Ranking and decision always come from the bundle.
// Throws BackendUnavailable.
ConsolidationOutcome consolidate(const EvidenceBundle& bundle, ChatTransport& transport,
                                 const PromptTemplate& consolidation);

// Every submission in ranking order. A null transport, or a transport that
// stays unavailable, yields fallback reports.
std::vector<ConsolidationOutcome> consolidate_all(const Corpus& corpus, const RunResult& run,
                                                  ChatTransport* transport,
                                                  const PromptTemplate& consolidation,
                                                  std::size_t max_in_flight);

// One "<paper_id>.md" per outcome plus an index file.
void write_reports(const std::filesystem::path& dir,
                   const std::vector<ConsolidationOutcome>& outcomes);

}  // namespace graphreview
