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
#include "graphreview/driver.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

#include "graphreview/error.hpp"
#include "graphreview/metrics.hpp"

namespace graphreview {

using util::Json;

std::string_view run_mode_name(RunMode mode) {
  return mode == RunMode::kEvaluation ? "evaluation" : "deployment";
}

RunMode parse_run_mode(std::string_view name) {
  if (name == "evaluation") return RunMode::kEvaluation;
  if (name == "deployment") return RunMode::kDeployment;
  throw Error(ErrorCode::kInvalidParam, "unknown mode '" + std::string(name) + "'");
}

Json RunConfig::to_json() const {
  Json j{{"mode", run_mode_name(mode)},
         {"epsilon_improve", epsilon_improve},
         {"patience", patience_max},
         {"fixed_t", fixed_t},
         {"max_rounds", max_rounds},
         {"gamma", gamma},
         {"lambda", lambda},
         {"prior_floor", prior_floor},
         {"metric", metric},
         {"seed", seed},
         {"edge_policy", edge_policy_name(edge_policy)},
         {"solver", solver == SolverMode::kExact ? "exact" : "greedy"},
         {"max_in_flight", max_in_flight},
         {"anchors", anchors}};
  return j;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParam, what); };
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) fail("lambda must lie in (0, 1)");
  if (!(prior_floor > 0.0)) fail("prior floor must be > 0");
  if (mode == RunMode::kDeployment && fixed_t < 1) fail("deployment mode needs fixed_t >= 1");
  if (patience_max < 1) fail("patience must be >= 1");
  if (max_rounds < 0) fail("max_rounds must be >= 0");
  if (!(epsilon_improve >= 0.0)) fail("epsilon_improve must be >= 0");
  if (max_in_flight < 1) fail("max_in_flight must be >= 1");
  const auto& names = metrics::metric_names();
  if (std::find(names.begin(), names.end(), metric) == names.end()) {
    throw Error(ErrorCode::kUnknownMetric, "unknown metric '" + metric + "'");
  }
  AnchorScale scale(anchors);
}

namespace {

Json nan_to_null(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }

}  // namespace

Json RoundRecord::summary() const {
  return Json{{"T", t},
              {"layer_edges", layer.edges.size()},
              {"underfilled", layer.underfilled.size()},
              {"eta", nan_to_null(eta)},
              {"eta_best", nan_to_null(eta_best)},
              {"patience", patience},
              {"improved", improved},
              {"accepts", ranking.accept_count},
              {"ppr_iterations", ppr_iterations},
              {"elapsed_seconds", elapsed_seconds},
              {"backend_calls", backend_calls}};
}

double compute_eta(const RankingResult& ranking, const std::map<std::string, double>& labels,
                   std::string_view metric, double gamma) {
  const auto& names = metrics::metric_names();
  if (std::find(names.begin(), names.end(), metric) == names.end()) {
    throw Error(ErrorCode::kUnknownMetric, "unknown metric '" + std::string(metric) + "'");
  }
  metrics::EvalInput in;
  for (const RankedPaper& e : ranking.entries) {
    auto it = labels.find(e.id);
    if (it == labels.end()) throw Error(ErrorCode::kMissingLabel, "no label for '" + e.id + "'");
    in.ids.push_back(e.id);
    // Rank position rather than raw pi, so ties already broken by the ranking
    // are honored.
    in.predicted_score.push_back(-static_cast<double>(in.ids.size()));
    in.predicted_decision.push_back(e.decision == Decision::kAccept ? 1 : 0);
    in.true_score.push_back(it->second);
  }
  in.true_decision = metrics::top_fraction_decisions(in.ids, in.true_score, gamma);
  return metrics::metric_by_name(metric, in);
}

RoundAggregate aggregate_round(const Corpus& corpus, const std::vector<Edge>& edges,
                               const std::map<PairKey, EdgeSignal>& signals, const Prior& prior,
                               std::span<const double> prior_scores, double lambda, double gamma) {
  PreferenceDigraph digraph(corpus.size());
  for (const Edge& e : edges) {
    const EdgeSignal& s = signals.at({e.u, e.v});
    const NodeId winner = s.winner == Winner::kFirst ? e.u : e.v;
    const NodeId loser = winner == e.u ? e.v : e.u;
    digraph.add_preference(winner, loser);
  }
  RoundAggregate out;
  out.ppr = ppr(TransitionMatrix::build(digraph, prior), prior, lambda);
  out.ranking = rank_and_decide(out.ppr, corpus, gamma, prior_scores);
  return out;
}

RunResult run_pipeline(const Corpus& corpus, const RunConfig& config, ReviewBackend& backend) {
  config.validate();
  const bool evaluation = config.mode == RunMode::kEvaluation;
  if (evaluation && !corpus.submissions_labeled()) {
    throw Error(ErrorCode::kLabelRequired, "evaluation mode needs a label for every submission");
  }
  const AnchorScale scale(config.anchors);
  const CandidateGraph candidates = CandidateGraph::from_corpus(corpus, config.edge_policy);
  const auto started = std::chrono::steady_clock::now();

  RunResult result;
  result.state = MatchState(corpus.size());

  // Node priors once per run.
  result.node_signals.resize(corpus.size());
  util::parallel_for(corpus.size(), config.max_in_flight, [&](std::size_t v) {
    result.node_signals[v] = score_node(corpus.paper(v), scale, backend);
  });
  std::vector<double> prior_scores(corpus.size());
  for (NodeId v = 0; v < corpus.size(); ++v) prior_scores[v] = result.node_signals[v].scalar_score;
  const Prior prior = build_prior(prior_scores, config.prior_floor);

  double eta_best = -std::numeric_limits<double>::infinity();
  int patience = 0;
  for (int t = 1;; ++t) {
    if (evaluation ? (patience >= config.patience_max ||
                      (config.max_rounds > 0 && t > config.max_rounds))
                   : t > config.fixed_t) {
      break;
    }
    EdgeLayer layer;
    try {
      layer = s2fm_step(result.state, candidates, config.solver);
    } catch (const Error& e) {
      if (t == 1 || (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kEmptyCandidateSet)) {
        throw;
      }
      spdlog::warn("round {}: no further layer ({}); stopping after {} rounds", t, e.what(), t - 1);
      break;
    }
    result.state = commit_layer(std::move(result.state), layer);
    layer = result.state.layers().back();

    std::vector<EdgeSignal> fresh(layer.edges.size());
    util::parallel_for(layer.edges.size(), config.max_in_flight, [&](std::size_t i) {
      const Edge& e = layer.edges[i];
      fresh[i] = compare_pair(corpus.paper(e.u), corpus.paper(e.v), backend);
    });
    for (std::size_t i = 0; i < layer.edges.size(); ++i) {
      result.edge_signals[{layer.edges[i].u, layer.edges[i].v}] = std::move(fresh[i]);
    }

    RoundAggregate agg = aggregate_round(corpus, result.state.cumulative(), result.edge_signals,
                                         prior, prior_scores, config.lambda, config.gamma);

    RoundRecord record;
    record.t = t;
    record.layer = layer;
    record.ranking = std::move(agg.ranking);
    record.ppr_iterations = agg.ppr.iterations_used;
    record.backend_calls = backend.calls();
    if (evaluation) {
      record.eta = compute_eta(record.ranking, corpus.labels(), config.metric, config.gamma);
      if (record.eta - eta_best > config.epsilon_improve) {
        eta_best = record.eta;
        patience = 0;
        record.improved = true;
        result.best_t = t;
        result.best_ranking = record.ranking;
      } else {
        ++patience;
      }
      record.eta_best = eta_best;
      record.patience = patience;
    } else {
      result.best_t = t;
      result.best_ranking = record.ranking;
    }
    record.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    spdlog::info("round {}: {} edges, eta={:.4f}, patience={}", t, layer.edges.size(), record.eta,
                 record.patience);
    result.trace.push_back(std::move(record));

    if (config.run_dir) write_run_directory(*config.run_dir, corpus, config, backend.id(), result);
  }
  return result;
}

void write_run_directory(const std::filesystem::path& dir, const Corpus& corpus,
                         const RunConfig& config, const std::string& backend_id,
                         const RunResult& result) {
  std::filesystem::create_directories(dir / "rounds");
  Json snapshot = config.to_json();
  snapshot["backend"] = backend_id;
  snapshot.erase("run_dir");
  util::write_text_file(dir / "config.json", snapshot.dump(2) + "\n");

  std::vector<Json> trace;
  for (const RoundRecord& r : result.trace) {
    trace.push_back(r.summary());
    const auto round_dir = dir / "rounds" / ("T" + std::to_string(r.t));
    std::filesystem::create_directories(round_dir);
    write_edge_list(round_dir / "edges.jsonl", result.state.prefix(static_cast<std::size_t>(r.t)),
                    corpus);
    write_ranking_csv(round_dir / "ranking.csv", r.ranking);
  }
  util::write_jsonl(dir / "trace.jsonl", trace);

  std::vector<Json> nodes;
  for (const NodeSignal& s : result.node_signals) nodes.push_back(to_json(s));
  util::write_jsonl(dir / "node_signals.jsonl", nodes);
  std::vector<Json> edges;
  for (const auto& [key, s] : result.edge_signals) edges.push_back(to_json(s));
  util::write_jsonl(dir / "edge_signals.jsonl", edges);

  if (result.best_t > 0) {
    write_ranking_csv(dir / "ranking.csv", result.best_ranking);
    write_ranking_jsonl(dir / "ranking.jsonl", result.best_ranking);
    write_edge_list(dir / "edges.jsonl", result.best_state(), corpus);
  }
}

RunResult read_run_directory(const std::filesystem::path& dir, const Corpus& corpus) {
  RunResult result;
  result.state = read_edge_list(dir / "edges.jsonl", corpus);
  result.best_t = static_cast<int>(result.state.layers().size());
  result.best_ranking = read_ranking_csv(dir / "ranking.csv");
  result.node_signals.resize(corpus.size());
  util::read_jsonl(dir / "node_signals.jsonl", [&](const Json& r, std::size_t) {
    NodeSignal s = node_signal_from_json(r);
    const NodeId v = corpus.index_of(s.paper_id);
    result.node_signals[v] = std::move(s);
  });
  util::read_jsonl(dir / "edge_signals.jsonl", [&](const Json& r, std::size_t) {
    EdgeSignal s = edge_signal_from_json(r);
    NodeId a = corpus.index_of(s.first_id);
    NodeId b = corpus.index_of(s.second_id);
    if (a > b) std::swap(a, b);
    result.edge_signals[{a, b}] = std::move(s);
  });
  return result;
}

}  // namespace graphreview
