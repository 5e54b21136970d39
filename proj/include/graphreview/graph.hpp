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
#include <string>
#include <unordered_set>
#include <vector>

#include "graphreview/corpus.hpp"

namespace graphreview {

// Undirected edge, normalized so that u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;

  static Edge make(NodeId a, NodeId b, double weight);
  friend bool operator==(const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }
};

// Orders by endpoints only; weights never break ties.
inline bool endpoint_less(const Edge& a, const Edge& b) {
  return a.u != b.u ? a.u < b.u : a.v < b.v;
}

struct EdgeLayer {
  int iteration = 0;
  std::vector<Edge> edges;  // sorted by endpoints
  // Nodes left below degree 2 by the greedy relaxation.
  std::vector<NodeId> underfilled;

  double total_weight() const;
  std::vector<std::size_t> degrees(std::size_t num_nodes) const;
};

// Which paper pairs may be linked. Historical-historical pairs never are.
enum class EdgePolicy { kBoth, kSynchronic, kDiachronic };

std::string_view edge_policy_name(EdgePolicy policy);
EdgePolicy parse_edge_policy(std::string_view name);

enum class SolverMode { kExact, kGreedy };

// Largest node count the exact enumerator accepts.
inline constexpr std::size_t kMaxExactNodes = 10;

// Candidate universe with similarity weights. Weights are only meaningful for
// allowed pairs.
class CandidateGraph {
 public:
  // Complete graph over all nodes of a symmetric weight matrix, minus
  // `forbidden` pairs.
  static CandidateGraph from_weights(const std::vector<std::vector<double>>& weights,
                                     const std::vector<std::pair<NodeId, NodeId>>& forbidden = {});
  static CandidateGraph from_corpus(const Corpus& corpus, EdgePolicy policy);

  std::size_t num_nodes() const { return n_; }
  bool allowed(NodeId a, NodeId b) const { return a != b && allowed_[a * n_ + b]; }
  double weight(NodeId a, NodeId b) const { return weights_[a * n_ + b]; }

  // Allowed edges by weight descending, ties by (u, v) ascending.
  const std::vector<Edge>& sorted_edges() const { return sorted_; }
  // Nodes incident to at least one allowed edge, ascending.
  const std::vector<NodeId>& eligible_nodes() const { return eligible_; }

  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }
  std::string label(NodeId node) const;

 private:
  void finalize();

  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<char> allowed_;
  std::vector<Edge> sorted_;
  std::vector<NodeId> eligible_;
  std::vector<std::string> labels_;
};

// Cumulative symmetric edge set built from disjoint layers.
class MatchState {
 public:
  explicit MatchState(std::size_t num_nodes = 0) : n_(num_nodes), degree_(num_nodes, 0) {}

  std::size_t num_nodes() const { return n_; }
  const std::vector<EdgeLayer>& layers() const { return layers_; }
  std::size_t num_edges() const { return keys_.size(); }
  bool contains(NodeId a, NodeId b) const;
  std::size_t degree(NodeId node) const { return degree_.at(node); }
  // Union of all layers, sorted by endpoints.
  std::vector<Edge> cumulative() const;
  // State restricted to the first `count` layers.
  MatchState prefix(std::size_t count) const;

 private:
  friend MatchState commit_layer(MatchState state, EdgeLayer layer);

  std::size_t n_;
  std::vector<EdgeLayer> layers_;
  std::unordered_set<std::size_t> keys_;
  std::vector<std::size_t> degree_;
};

// Proposes the next layer. Exact mode enumerates every 2-factor of the
// eligible nodes (at most kMaxExactNodes) and throws Infeasible when none
// exists. Greedy mode admits edges by descending weight while both endpoints
// have layer degree < 2, then repairs degree-0 nodes; nodes it cannot bring
// to degree 2 are listed in `underfilled`. The state is not modified.
EdgeLayer s2fm_step(const MatchState& state, const CandidateGraph& candidates, SolverMode mode);

// Appends `layer`; throws OverlapError if it reuses a committed edge.
MatchState commit_layer(MatchState state, EdgeLayer layer);

// Globally optimal 2-factor over all nodes of `weights` avoiding `forbidden`.
// Ties between equal-weight optima go to the lexicographically smallest edge
// list. Throws Infeasible, or InvalidParam above kMaxExactNodes nodes.
EdgeLayer brute_force_two_factor(const std::vector<std::vector<double>>& weights,
                                 const std::vector<std::pair<NodeId, NodeId>>& forbidden = {});

// Line-delimited edge list: {"iteration", "u_id", "v_id", "weight"} in layer
// order, then endpoint order.
void write_edge_list(const std::filesystem::path& path, const MatchState& state,
                     const Corpus& corpus);
MatchState read_edge_list(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace graphreview
