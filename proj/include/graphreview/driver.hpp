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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphreview/aggregate.hpp"
#include "graphreview/anchors.hpp"
#include "graphreview/corpus.hpp"
#include "graphreview/graph.hpp"
#include "graphreview/signals.hpp"

namespace graphreview {

enum class RunMode { kEvaluation, kDeployment };

std::string_view run_mode_name(RunMode mode);
RunMode parse_run_mode(std::string_view name);

struct RunConfig {
  RunMode mode = RunMode::kDeployment;
  double epsilon_improve = 0.01;
  int patience_max = 3;
  int fixed_t = 5;
  // Evaluation mode stops here even with patience left; 0 = no cap.
  int max_rounds = 0;
  double gamma = kDefaultGamma;
  double lambda = kDefaultLambda;
  double prior_floor = kPriorFloor;
  std::string metric = "spearman";
  std::uint64_t seed = 0;
  EdgePolicy edge_policy = EdgePolicy::kBoth;
  SolverMode solver = SolverMode::kGreedy;
  std::size_t max_in_flight = 8;
  std::vector<double> anchors = AnchorScale::iclr().values();
  // Checkpoint directory; nothing is written when unset.
  std::optional<std::filesystem::path> run_dir;

  util::Json to_json() const;
  // Throws InvalidParam on out-of-range values.
  void validate() const;
};

struct RoundRecord {
  int t = 0;
  EdgeLayer layer;
  double eta = std::numeric_limits<double>::quiet_NaN();  // NaN in deployment mode
  double eta_best = std::numeric_limits<double>::quiet_NaN();
  int patience = 0;  // counter after this round
  bool improved = false;
  RankingResult ranking;
  int ppr_iterations = 0;
  double elapsed_seconds = 0.0;
  std::size_t backend_calls = 0;  // cumulative

  util::Json summary() const;
};

using PairKey = std::pair<NodeId, NodeId>;  // (smaller, larger)

struct RunResult {
  int best_t = 0;
  RankingResult best_ranking;
  std::vector<RoundRecord> trace;
  MatchState state;
  std::vector<NodeSignal> node_signals;  // indexed by node
  std::map<PairKey, EdgeSignal> edge_signals;
  // Committed edges the best round used.
  MatchState best_state() const { return state.prefix(static_cast<std::size_t>(best_t)); }
};

// eta for a submission ranking against true scores. True decisions are the
// top floor(gamma n) by true score. Throws UnknownMetric or MissingLabel.
double compute_eta(const RankingResult& ranking, const std::map<std::string, double>& labels,
                   std::string_view metric, double gamma = kDefaultGamma);

// Outer loop: grow one layer per round, compare the new edges, fuse with the
// (once-computed) node priors by PPR and rank. Evaluation mode keeps the best
// round under patience-based early stopping; deployment mode runs fixed_t
// rounds. A round whose layer cannot be built ends the run early with a
// warning, unless it is the first round.
RunResult run_pipeline(const Corpus& corpus, const RunConfig& config, ReviewBackend& backend);

// Ranks submissions from a digraph over the given edges.
struct RoundAggregate {
  PprResult ppr;
  RankingResult ranking;
};
RoundAggregate aggregate_round(const Corpus& corpus, const std::vector<Edge>& edges,
                               const std::map<PairKey, EdgeSignal>& signals, const Prior& prior,
                               std::span<const double> prior_scores, double lambda, double gamma);

// Writes config snapshot, per-round edge lists and rankings, trace and
// signals under `dir`.
void write_run_directory(const std::filesystem::path& dir, const Corpus& corpus,
                         const RunConfig& config, const std::string& backend_id,
                         const RunResult& result);

// Rebuilds the best round of a finished run from its directory: edges,
// ranking and signals. The trace is left empty.
RunResult read_run_directory(const std::filesystem::path& dir, const Corpus& corpus);

}  // namespace graphreview
