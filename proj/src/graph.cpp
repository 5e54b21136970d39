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
#include "graphreview/graph.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "graphreview/error.hpp"
#include "graphreview/util.hpp"

namespace graphreview {

using util::Json;

Edge Edge::make(NodeId a, NodeId b, double weight) {
  return a < b ? Edge{a, b, weight} : Edge{b, a, weight};
}

double EdgeLayer::total_weight() const {
  double total = 0.0;
  for (const Edge& e : edges) total += e.weight;
  return total;
}

std::vector<std::size_t> EdgeLayer::degrees(std::size_t num_nodes) const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const Edge& e : edges) {
    ++deg.at(e.u);
    ++deg.at(e.v);
  }
  return deg;
}

std::string_view edge_policy_name(EdgePolicy policy) {
  switch (policy) {
    case EdgePolicy::kBoth: return "both";
    case EdgePolicy::kSynchronic: return "synchronic";
    case EdgePolicy::kDiachronic: return "diachronic";
  }
  return "both";
}

EdgePolicy parse_edge_policy(std::string_view name) {
  if (name == "both") return EdgePolicy::kBoth;
  if (name == "synchronic") return EdgePolicy::kSynchronic;
  if (name == "diachronic") return EdgePolicy::kDiachronic;
  throw Error(ErrorCode::kInvalidParam, "unknown edge policy '" + std::string(name) + "'");
}

// --- CandidateGraph ---------------------------------------------------------

CandidateGraph CandidateGraph::from_weights(
    const std::vector<std::vector<double>>& weights,
    const std::vector<std::pair<NodeId, NodeId>>& forbidden) {
  CandidateGraph g;
  g.n_ = weights.size();
  g.weights_.assign(g.n_ * g.n_, 0.0);
  g.allowed_.assign(g.n_ * g.n_, 0);
  for (NodeId a = 0; a < g.n_; ++a) {
    if (weights[a].size() != g.n_) {
      throw Error(ErrorCode::kSizeMismatch, "weight matrix is not square");
    }
    for (NodeId b = 0; b < g.n_; ++b) {
      if (a == b) continue;
      if (std::abs(weights[a][b] - weights[b][a]) > 1e-12) {
        throw Error(ErrorCode::kInvalidParam, "weight matrix is not symmetric");
      }
      g.weights_[a * g.n_ + b] = weights[a][b];
      g.allowed_[a * g.n_ + b] = 1;
    }
  }
  for (auto [a, b] : forbidden) {
    if (a >= g.n_ || b >= g.n_) throw Error(ErrorCode::kSizeMismatch, "forbidden edge out of range");
    g.allowed_[a * g.n_ + b] = 0;
    g.allowed_[b * g.n_ + a] = 0;
  }
  g.finalize();
  return g;
}

CandidateGraph CandidateGraph::from_corpus(const Corpus& corpus, EdgePolicy policy) {
  CandidateGraph g;
  g.n_ = corpus.size();
  g.weights_.assign(g.n_ * g.n_, 0.0);
  g.allowed_.assign(g.n_ * g.n_, 0);
  for (NodeId a = 0; a < g.n_; ++a) {
    if (!corpus.has_embedding(a)) continue;
    for (NodeId b = a + 1; b < g.n_; ++b) {
      if (!corpus.has_embedding(b)) continue;
      const bool sub_a = corpus.paper(a).role == Role::kSubmission;
      const bool sub_b = corpus.paper(b).role == Role::kSubmission;
      bool ok = false;
      if (sub_a && sub_b) {
        ok = policy != EdgePolicy::kDiachronic;
      } else if (sub_a || sub_b) {
        ok = policy != EdgePolicy::kSynchronic;
      }
      if (!ok) continue;
      const double w = cosine_similarity(corpus.embedding(a), corpus.embedding(b));
      g.weights_[a * g.n_ + b] = g.weights_[b * g.n_ + a] = w;
      g.allowed_[a * g.n_ + b] = g.allowed_[b * g.n_ + a] = 1;
    }
  }
  std::vector<std::string> labels;
  labels.reserve(g.n_);
  for (const Paper& p : corpus.papers()) labels.push_back(p.id);
  g.labels_ = std::move(labels);
  g.finalize();
  return g;
}

void CandidateGraph::finalize() {
  sorted_.clear();
  eligible_.clear();
  std::vector<char> touched(n_, 0);
  for (NodeId a = 0; a < n_; ++a) {
    for (NodeId b = a + 1; b < n_; ++b) {
      if (!allowed_[a * n_ + b]) continue;
      sorted_.push_back(Edge{a, b, weights_[a * n_ + b]});
      touched[a] = touched[b] = 1;
    }
  }
  std::sort(sorted_.begin(), sorted_.end(), [](const Edge& x, const Edge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return endpoint_less(x, y);
  });
  for (NodeId a = 0; a < n_; ++a) {
    if (touched[a]) eligible_.push_back(a);
  }
}

std::string CandidateGraph::label(NodeId node) const {
  if (node < labels_.size()) return labels_[node];
  return "#" + std::to_string(node);
}

// --- MatchState ---------------------------------------------------------------

namespace {

std::size_t edge_key(NodeId a, NodeId b, std::size_t n) {
  return a < b ? a * n + b : b * n + a;
}

}  // namespace

bool MatchState::contains(NodeId a, NodeId b) const {
  return keys_.contains(edge_key(a, b, n_));
}

std::vector<Edge> MatchState::cumulative() const {
  std::vector<Edge> all;
  all.reserve(keys_.size());
  for (const EdgeLayer& layer : layers_) all.insert(all.end(), layer.edges.begin(), layer.edges.end());
  std::sort(all.begin(), all.end(), endpoint_less);
  return all;
}

MatchState MatchState::prefix(std::size_t count) const {
  MatchState out(n_);
  for (std::size_t i = 0; i < std::min(count, layers_.size()); ++i) {
    out = commit_layer(std::move(out), layers_[i]);
  }
  return out;
}

MatchState commit_layer(MatchState state, EdgeLayer layer) {
  std::unordered_set<std::size_t> fresh;
  for (const Edge& e : layer.edges) {
    if (e.u == e.v) throw Error(ErrorCode::kInvalidParam, "self-loop in layer");
    if (e.u >= state.n_ || e.v >= state.n_) {
      throw Error(ErrorCode::kSizeMismatch, "layer edge out of range");
    }
    const std::size_t key = edge_key(e.u, e.v, state.n_);
    if (state.keys_.contains(key) || !fresh.insert(key).second) {
      throw Error(ErrorCode::kOverlapError, "edge (" + std::to_string(e.u) + ", " +
                                                std::to_string(e.v) + ") already committed");
    }
  }
  for (const Edge& e : layer.edges) {
    ++state.degree_[e.u];
    ++state.degree_[e.v];
  }
  state.keys_.insert(fresh.begin(), fresh.end());
  layer.iteration = static_cast<int>(state.layers_.size()) + 1;
  std::sort(layer.edges.begin(), layer.edges.end(), endpoint_less);
  state.layers_.push_back(std::move(layer));
  return state;
}

// --- exact enumeration ------------------------------------------------------

namespace {

// Depth-first enumeration of every 2-factor over `nodes`. Nodes are processed
// in order; when node i is reached, every edge to an earlier node has already
// been decided, so i picks its remaining partners among later nodes only. Each
// 2-factor is therefore generated exactly once.
class TwoFactorEnumerator {
 public:
  TwoFactorEnumerator(const CandidateGraph& g, const MatchState* state,
                      std::vector<NodeId> nodes)
      : g_(g), state_(state), nodes_(std::move(nodes)), deg_(nodes_.size(), 0) {}

  std::optional<EdgeLayer> solve() {
    recurse(0, 0.0);
    if (!found_) return std::nullopt;
    EdgeLayer layer;
    layer.edges = best_;
    return layer;
  }

 private:
  bool usable(std::size_t i, std::size_t j) const {
    const NodeId a = nodes_[i], b = nodes_[j];
    return g_.allowed(a, b) && (state_ == nullptr || !state_->contains(a, b));
  }

  void push(std::size_t i, std::size_t j) {
    ++deg_[i];
    ++deg_[j];
    current_.push_back(Edge::make(nodes_[i], nodes_[j], g_.weight(nodes_[i], nodes_[j])));
  }

  void pop(std::size_t i, std::size_t j) {
    --deg_[i];
    --deg_[j];
    current_.pop_back();
  }

  void recurse(std::size_t i, double acc) {
    while (i < nodes_.size() && deg_[i] == 2) ++i;
    if (i == nodes_.size()) {
      record(acc);
      return;
    }
    const std::size_t m = nodes_.size();
    if (deg_[i] == 1) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (deg_[j] >= 2 || !usable(i, j)) continue;
        push(i, j);
        recurse(i + 1, acc + current_.back().weight);
        pop(i, j);
      }
      return;
    }
    for (std::size_t j1 = i + 1; j1 < m; ++j1) {
      if (deg_[j1] >= 2 || !usable(i, j1)) continue;
      push(i, j1);
      const double w1 = current_.back().weight;
      for (std::size_t j2 = j1 + 1; j2 < m; ++j2) {
        if (deg_[j2] >= 2 || !usable(i, j2)) continue;
        push(i, j2);
        recurse(i + 1, acc + w1 + current_.back().weight);
        pop(i, j2);
      }
      pop(i, j1);
    }
  }

  void record(double total) {
    std::vector<Edge> sorted = current_;
    std::sort(sorted.begin(), sorted.end(), endpoint_less);
    constexpr double kTieTolerance = 1e-12;
    bool better = !found_ || total > best_weight_ + kTieTolerance;
    if (!better && std::abs(total - best_weight_) <= kTieTolerance) {
      better = std::lexicographical_compare(sorted.begin(), sorted.end(), best_.begin(),
                                            best_.end(), endpoint_less);
    }
    if (better) {
      found_ = true;
      best_weight_ = total;
      best_ = std::move(sorted);
    }
  }

  const CandidateGraph& g_;
  const MatchState* state_;
  std::vector<NodeId> nodes_;
  std::vector<int> deg_;
  std::vector<Edge> current_;
  std::vector<Edge> best_;
  double best_weight_ = 0.0;
  bool found_ = false;
};

EdgeLayer exact_step(const MatchState& state, const CandidateGraph& g) {
  const auto& nodes = g.eligible_nodes();
  if (nodes.size() > kMaxExactNodes) {
    throw Error(ErrorCode::kInvalidParam,
                "exact solver supports at most " + std::to_string(kMaxExactNodes) +
                    " eligible nodes, got " + std::to_string(nodes.size()));
  }
  TwoFactorEnumerator solver(g, &state, nodes);
  auto layer = solver.solve();
  if (!layer) {
    throw Error(ErrorCode::kInfeasible, "no 2-factor exists over the unused candidate edges");
  }
  return *layer;
}

// --- greedy -------------------------------------------------------------------

class GreedyLayerBuilder {
 public:
  GreedyLayerBuilder(const MatchState& state, const CandidateGraph& g)
      : state_(state), g_(g), n_(g.num_nodes()), deg_(n_, 0), in_layer_(n_ * n_, 0) {}

  EdgeLayer build() {
    for (const Edge& e : g_.sorted_edges()) {
      if (state_.contains(e.u, e.v)) continue;
      if (deg_[e.u] < 2 && deg_[e.v] < 2) add(e.u, e.v);
    }
    for (NodeId x : g_.eligible_nodes()) {
      if (deg_[x] == 0) repair(x);
    }
    EdgeLayer layer;
    for (NodeId a = 0; a < n_; ++a) {
      for (NodeId b = a + 1; b < n_; ++b) {
        if (in_layer_[a * n_ + b]) layer.edges.push_back(Edge{a, b, g_.weight(a, b)});
      }
    }
    for (NodeId x : g_.eligible_nodes()) {
      if (deg_[x] < 2) layer.underfilled.push_back(x);
    }
    return layer;
  }

 private:
  bool free_pair(NodeId a, NodeId b) const {
    return g_.allowed(a, b) && !state_.contains(a, b) && !in_layer_[a * n_ + b];
  }

  void add(NodeId a, NodeId b) {
    in_layer_[a * n_ + b] = in_layer_[b * n_ + a] = 1;
    ++deg_[a];
    ++deg_[b];
  }

  void remove(NodeId a, NodeId b) {
    in_layer_[a * n_ + b] = in_layer_[b * n_ + a] = 0;
    --deg_[a];
    --deg_[b];
  }

  std::vector<Edge> layer_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a) {
      for (NodeId b = a + 1; b < n_; ++b) {
        if (in_layer_[a * n_ + b]) out.push_back(Edge{a, b, g_.weight(a, b)});
      }
    }
    return out;
  }

  // Brings an isolated node into the layer: first by splicing it into an
  // existing edge (p, q) -> (p, x), (x, q), which keeps every other degree
  // unchanged; then by attaching it to a partner below degree 2; finally by
  // taking an edge away from a partner whose other endpoint keeps degree >= 1.
  void repair(NodeId x) {
    const auto edges = layer_edges();
    std::optional<Edge> splice;
    double splice_gain = -std::numeric_limits<double>::infinity();
    for (const Edge& e : edges) {
      if (e.u == x || e.v == x) continue;
      if (!free_pair(x, e.u) || !free_pair(x, e.v)) continue;
      const double gain = g_.weight(x, e.u) + g_.weight(x, e.v) - e.weight;
      if (gain > splice_gain) {
        splice_gain = gain;
        splice = e;
      }
    }
    if (splice) {
      remove(splice->u, splice->v);
      add(x, splice->u);
      add(x, splice->v);
      return;
    }

    std::optional<NodeId> partner;
    for (NodeId p = 0; p < n_; ++p) {
      if (p == x || deg_[p] >= 2 || !free_pair(x, p)) continue;
      if (!partner || g_.weight(x, p) > g_.weight(x, *partner)) partner = p;
    }
    if (partner) {
      add(x, *partner);
      return;
    }

    std::optional<Edge> taken;
    NodeId taken_partner = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (const Edge& e : edges) {
      for (auto [p, q] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
        if (p == x || q == x || deg_[q] < 2 || !free_pair(x, p)) continue;
        const double gain = g_.weight(x, p) - e.weight;
        if (gain > best_gain) {
          best_gain = gain;
          taken = e;
          taken_partner = p;
        }
      }
    }
    if (taken) {
      remove(taken->u, taken->v);
      add(x, taken_partner);
      return;
    }
    throw Error(ErrorCode::kInfeasible,
                "node " + g_.label(x) + " cannot be matched in layer " +
                    std::to_string(state_.layers().size() + 1));
  }

  const MatchState& state_;
  const CandidateGraph& g_;
  std::size_t n_;
  std::vector<int> deg_;
  std::vector<char> in_layer_;
};

}  // namespace

EdgeLayer s2fm_step(const MatchState& state, const CandidateGraph& candidates, SolverMode mode) {
  if (state.num_nodes() != candidates.num_nodes()) {
    throw Error(ErrorCode::kSizeMismatch, "state and candidate graph disagree on node count");
  }
  if (candidates.sorted_edges().empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "candidate graph has no edges");
  }
  // Every eligible node needs at least one unused candidate edge.
  std::vector<std::size_t> unused(candidates.num_nodes(), 0);
  for (const Edge& e : candidates.sorted_edges()) {
    if (!state.contains(e.u, e.v)) {
      ++unused[e.u];
      ++unused[e.v];
    }
  }
  for (NodeId x : candidates.eligible_nodes()) {
    if (unused[x] == 0) {
      throw Error(ErrorCode::kInfeasible,
                  "node " + candidates.label(x) + " has no unused candidate edge");
    }
  }

  EdgeLayer layer = mode == SolverMode::kExact ? exact_step(state, candidates)
                                               : GreedyLayerBuilder(state, candidates).build();
  layer.iteration = static_cast<int>(state.layers().size()) + 1;
  if (!layer.underfilled.empty()) {
    spdlog::warn("layer {}: {} node(s) below degree 2 after greedy repair", layer.iteration,
                 layer.underfilled.size());
  }
  return layer;
}

EdgeLayer brute_force_two_factor(const std::vector<std::vector<double>>& weights,
                                 const std::vector<std::pair<NodeId, NodeId>>& forbidden) {
  if (weights.size() > kMaxExactNodes) {
    throw Error(ErrorCode::kInvalidParam, "brute force limited to " +
                                              std::to_string(kMaxExactNodes) + " nodes");
  }
  const CandidateGraph g = CandidateGraph::from_weights(weights, forbidden);
  std::vector<NodeId> nodes(weights.size());
  for (NodeId i = 0; i < nodes.size(); ++i) nodes[i] = i;
  TwoFactorEnumerator solver(g, nullptr, nodes);
  auto layer = solver.solve();
  if (!layer || weights.size() < 3) {
    throw Error(ErrorCode::kInfeasible, "no 2-factor exists over the allowed edges");
  }
  layer->iteration = 1;
  return *layer;
}

void write_edge_list(const std::filesystem::path& path, const MatchState& state,
                     const Corpus& corpus) {
  std::vector<Json> records;
  records.reserve(state.num_edges());
  for (const EdgeLayer& layer : state.layers()) {
    for (const Edge& e : layer.edges) {
      records.push_back(Json{{"iteration", layer.iteration},
                             {"u_id", corpus.paper(e.u).id},
                             {"v_id", corpus.paper(e.v).id},
                             {"weight", e.weight}});
    }
  }
  util::write_jsonl(path, records);
}

MatchState read_edge_list(const std::filesystem::path& path, const Corpus& corpus) {
  std::map<int, EdgeLayer> layers;
  util::read_jsonl(path, [&](const Json& r, std::size_t line) {
    try {
      const int it = r.at("iteration").get<int>();
      const NodeId u = corpus.index_of(r.at("u_id").get<std::string>());
      const NodeId v = corpus.index_of(r.at("v_id").get<std::string>());
      layers[it].edges.push_back(Edge::make(u, v, r.at("weight").get<double>()));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  path.filename().string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  MatchState state(corpus.size());
  int expected = 1;
  for (auto& [it, layer] : layers) {
    if (it != expected++) {
      throw Error(ErrorCode::kParseError, "edge list skips iteration " + std::to_string(expected - 1));
    }
    state = commit_layer(std::move(state), std::move(layer));
  }
  return state;
}

}  // namespace graphreview
