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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphreview/util.hpp"

namespace graphreview::metrics {

// Binary decisions are 0 (reject) / 1 (accept).
double accuracy(std::span<const int> predicted, std::span<const int> truth);
double macro_f1(std::span<const int> predicted, std::span<const int> truth);
// Probability a random positive outscores a random negative; ties count 1/2.
// Throws DegenerateLabels when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

// 1-based ranks, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

// 1 - 6 sum d^2 / (N (N^2 - 1)) over average ranks. Throws DegenerateInput for
// N < 2 or a constant vector.
double spearman(std::span<const double> predicted, std::span<const double> truth);
// (n_c - n_d) / sqrt((n_0 - n_x)(n_0 - n_y)), where n_x and n_y count pairs
// tied in one ranking but not the other.
double kendall_tau_b(std::span<const double> predicted, std::span<const double> truth);
// Relevance is the true score clipped to [0, 10]. Cutoff min(10, n). An
// all-zero ideal DCG yields 1.
double ndcg_at_10(const std::vector<std::string>& predicted_order,
                  const std::map<std::string, double>& true_scores);

struct MannWhitney {
  double u = 0.0;  // for group_a
  double p = 1.0;  // two-sided
};

// Exact null distribution (tie-aware) when both groups have fewer than 20
// members; otherwise the tie-corrected normal approximation with continuity
// correction.
MannWhitney mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b);

struct EvalInput {
  std::vector<std::string> ids;
  std::vector<double> predicted_score;
  std::vector<int> predicted_decision;
  std::vector<double> true_score;
  std::vector<int> true_decision;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double auc = 0.0;
  double spearman = 0.0;
  double kendall_tau_b = 0.0;
  double ndcg_at_10 = 0.0;
  double average = 0.0;

  util::Json to_json() const;
};

MetricReport evaluate(const EvalInput& input);

// accuracy, macro_f1, auc, spearman, kendall_tau_b, ndcg_at_10, average.
const std::vector<std::string>& metric_names();
// Computes only what `name` needs. Throws UnknownMetric.
double metric_by_name(std::string_view name, const EvalInput& input);

// Aligns a rank CSV with a labels file. Predicted score is the CSV's pi;
// the true decision comes from a "decision" field in the labels file when
// present, otherwise from the top floor(gamma n) true scores.
EvalInput load_eval_input(const std::filesystem::path& ranking_csv,
                          const std::filesystem::path& truth_jsonl, double gamma);

// Top floor(gamma n) by score (ties by id) get 1.
std::vector<int> top_fraction_decisions(const std::vector<std::string>& ids,
                                        std::span<const double> scores, double gamma);

// Evaluates every "<name>.csv" in `dir` against "<name>.truth.jsonl".
std::map<std::string, MetricReport> evaluate_directory(const std::filesystem::path& dir,
                                                       double gamma);

}  // namespace graphreview::metrics
