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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphreview/anchors.hpp"
#include "graphreview/corpus.hpp"
#include "graphreview/prompts.hpp"

namespace graphreview::riml {

inline constexpr double kDefaultSigma = 1.0;
inline constexpr double kDefaultTau = 1.0;
inline constexpr double kDefaultDelta = 1.5;
inline constexpr double kProbabilityFloor = 1e-12;

struct NodeTarget {
  std::string paper_id;
  std::vector<double> y;  // one entry per anchor
  double sigma = kDefaultSigma;
  double tau = kDefaultTau;
  double weight = 1.0;
};

// Soft target over anchors from the distance reward -(s - a_k)^2 / (2 sigma^2),
// tempered by tau and normalized with a softmax. Throws InvalidParam unless
// sigma > 0 and tau > 0.
NodeTarget node_target(double score, const AnchorScale& scale, double sigma = kDefaultSigma,
                       double tau = kDefaultTau);

struct EdgeTarget {
  std::string u_id;
  std::string v_id;
  int label = 0;        // 1 iff s_u > s_v
  double weight = 0.0;  // |s_u - s_v|
};

// Greedy pairing: ids are shuffled by `seed`; each still-unpaired id in that
// order takes the unpaired partner with the largest score gap, provided the
// gap exceeds `delta` (ties broken by partner id). Every id appears in at most
// one pair. Pair orientation is a seeded coin flip so both labels occur.
std::vector<EdgeTarget> mine_pairs(const std::map<std::string, double>& labels, double delta,
                                   std::uint64_t seed);

// Mean weighted cross-entropy over node samples. Predictions must be valid
// distributions of matching length; probabilities are floored at 1e-12.
double node_loss(std::span<const NodeTarget> targets,
                 std::span<const std::vector<double>> predictions);

// Weighted cross-entropy over pairs, divided by the number of pairs supplied.
// Each prediction is (P(k=0), P(k=1)).
double edge_loss(std::span<const EdgeTarget> targets,
                 std::span<const std::vector<double>> predictions);

struct ExportParams {
  double sigma = kDefaultSigma;
  double tau = kDefaultTau;
  double delta = kDefaultDelta;
  std::uint64_t seed = 0;
  // Papers to emit scoring records for; empty means every labeled paper.
  std::vector<std::string> paper_ids;
};

struct ExportSummary {
  std::size_t scoring_records = 0;
  std::size_t comparison_records = 0;
};

// Writes the scoring file {paper_id, prompt, anchors, target, scalar} and the
// comparison file {u_id, v_id, prompt, label, weight}. A prompt is the rendered
// training-data system message immediately followed by the user message.
// Throws MissingLabel if a requested paper has no label.
ExportSummary export_training_set(const Corpus& corpus, const AnchorScale& scale,
                                  const ExportParams& params, const PromptSet& prompts,
                                  const std::filesystem::path& scoring_path,
                                  const std::filesystem::path& comparison_path);

// Formats a score the way it is written into prompts: shortest round-trip
// decimal, so 8.0 prints as "8" and 6.25 as "6.25".
std::string format_score(double score);

}  // namespace graphreview::riml
