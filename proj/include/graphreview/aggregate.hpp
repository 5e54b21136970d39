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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphreview/corpus.hpp"

namespace graphreview {

inline constexpr double kPriorFloor = 1e-9;
inline constexpr double kDefaultLambda = 0.2;
inline constexpr double kDefaultGamma = 0.314;
inline constexpr double kPprTolerance = 1e-10;
inline constexpr int kPprMaxIterations = 200;

struct Prior {
  std::vector<double> z;
  double epsilon_floor = kPriorFloor;
};

// z_u = max(e_u, eps) / sum_k max(e_k, eps). NaN entries count as missing and
// take the floor. Throws EmptyInput.
Prior build_prior(std::span<const double> scores, double epsilon_floor = kPriorFloor);

// Directed "loser -> winner" edges; one per compared pair.
class PreferenceDigraph {
 public:
  explicit PreferenceDigraph(std::size_t num_nodes = 0) : succ_(num_nodes) {}

  std::size_t num_nodes() const { return succ_.size(); }
  std::size_t num_edges() const { return edges_; }
  // Keeps loser -> winner only. Repeating a preference is a no-op.
  void add_preference(NodeId winner, NodeId loser);
  bool has_edge(NodeId from, NodeId to) const;
  std::size_t out_degree(NodeId v) const { return succ_.at(v).size(); }
  const std::vector<NodeId>& successors(NodeId v) const { return succ_.at(v); }

 private:
  std::vector<std::vector<NodeId>> succ_;  // sorted
  std::size_t edges_ = 0;
};

// Column-stochastic matrix stored by columns. A dangling column stands for
// the prior vector it was built with.
class TransitionMatrix {
 public:
  // Column v spreads 1/d_v over v's successors, or equals z when d_v = 0.
  // Throws SizeMismatch when z and the digraph disagree on N.
  static TransitionMatrix build(const PreferenceDigraph& digraph, const Prior& prior);
  // Wraps an explicit matrix given as rows; no stochasticity check here.
  static TransitionMatrix from_dense(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return columns_.size(); }
  // y = M x
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<std::vector<double>> dense() const;
  double column_sum(NodeId v) const;
  bool dangling(NodeId v) const { return columns_.at(v).dangling; }

 private:
  struct Column {
    std::vector<std::pair<NodeId, double>> entries;
    bool dangling = false;
  };
  std::vector<Column> columns_;
  std::vector<double> z_;
};

struct PprResult {
  std::vector<double> pi;
  int iterations_used = 0;
  double residual = 0.0;  // L1 change of the last iteration
};

// Power iteration for pi = lambda M pi + (1 - lambda) z, starting from z.
// Throws NotStochastic, SizeMismatch, or InvalidParam for lambda outside (0,1).
PprResult ppr(const TransitionMatrix& m, const Prior& prior, double lambda = kDefaultLambda,
              double tol = kPprTolerance, int max_iters = kPprMaxIterations);

// ||pi - (lambda M pi + (1 - lambda) z)||_1
double fixed_point_residual(const TransitionMatrix& m, const Prior& prior, double lambda,
                            std::span<const double> pi);

enum class Decision { kAccept, kReject };

std::string_view decision_name(Decision d);
Decision parse_decision(std::string_view name);

struct RankedPaper {
  std::string id;
  double pi = 0.0;
  double prior = 0.0;
  Decision decision = Decision::kReject;
};

struct RankingResult {
  std::vector<RankedPaper> entries;  // best first
  std::size_t accept_count = 0;

  std::vector<std::string> order() const;
  // 1-based; throws UnknownPaper.
  std::size_t rank_of(std::string_view id) const;
  const RankedPaper& at(std::string_view id) const;
};

// floor(gamma n), guarded against representation error (0.314 * 500 = 157).
std::size_t accept_count_for(std::size_t n, double gamma);

// Sorts by pi descending, then prior descending, then id; accepts the top
// floor(gamma n). Throws SizeMismatch or InvalidParam for gamma outside (0,1).
RankingResult rank_and_decide(const std::vector<std::string>& ids, std::span<const double> pi,
                              std::span<const double> prior_scores, double gamma);

// Restricts a full-corpus pi to submissions. `prior_scores` is indexed by node
// and may be empty.
RankingResult rank_and_decide(const PprResult& result, const Corpus& corpus, double gamma,
                              std::span<const double> prior_scores = {});

// rank,paper_id,pi,decision
void write_ranking_csv(const std::filesystem::path& path, const RankingResult& ranking);
void write_ranking_jsonl(const std::filesystem::path& path, const RankingResult& ranking);
RankingResult read_ranking_csv(const std::filesystem::path& path);

}  // namespace graphreview
