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
#include "graphreview/riml.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "graphreview/error.hpp"
#include "graphreview/util.hpp"

namespace graphreview::riml {

using util::Json;

NodeTarget node_target(double score, const AnchorScale& scale, double sigma, double tau) {
  if (!(sigma > 0.0) || !(tau > 0.0) || !std::isfinite(score)) {
    throw Error(ErrorCode::kInvalidParam, "node_target needs finite score, sigma > 0, tau > 0");
  }
  NodeTarget target;
  target.sigma = sigma;
  target.tau = tau;
  target.y.resize(scale.size());
  std::vector<double> logits(scale.size());
  for (std::size_t k = 0; k < scale.size(); ++k) {
    const double d = score - scale[k];
    logits[k] = -(d * d) / (2.0 * sigma * sigma) / tau;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t k = 0; k < scale.size(); ++k) {
    target.y[k] = std::exp(logits[k] - peak);
    z += target.y[k];
  }
  for (double& y : target.y) y /= z;
  return target;
}

std::vector<EdgeTarget> mine_pairs(const std::map<std::string, double>& labels, double delta,
                                   std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidParam, "delta must be >= 0");
  std::vector<std::string> order;
  order.reserve(labels.size());
  for (const auto& [id, score] : labels) order.push_back(id);
  util::portable_shuffle(order, seed);

  std::map<std::string, bool> paired;
  std::vector<EdgeTarget> pairs;
  for (const std::string& id : order) {
    if (paired[id]) continue;
    const double s = labels.at(id);
    const std::string* partner = nullptr;
    double best_gap = delta;
    // `labels` iterates in id order, so strict '>' keeps the smallest id on ties.
    for (const auto& [other, t] : labels) {
      if (other == id || paired[other]) continue;
      const double gap = std::abs(s - t);
      if (gap > best_gap) {
        best_gap = gap;
        partner = &other;
      }
    }
    if (partner == nullptr) continue;
    paired[id] = paired[*partner] = true;
    const bool keep = util::unit_interval(util::stable_hash(seed, {"orient", id, *partner})) < 0.5;
    EdgeTarget pair;
    pair.u_id = keep ? id : *partner;
    pair.v_id = keep ? *partner : id;
    pair.label = labels.at(pair.u_id) > labels.at(pair.v_id) ? 1 : 0;
    pair.weight = best_gap;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

namespace {

void check_distribution(std::span<const double> p, std::size_t expected, std::size_t index) {
  if (p.size() != expected) {
    throw Error(ErrorCode::kInvalidDistribution,
                "prediction " + std::to_string(index) + " has " + std::to_string(p.size()) +
                    " classes, expected " + std::to_string(expected));
  }
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "prediction " + std::to_string(index) + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidDistribution,
                "prediction " + std::to_string(index) + " sums to " + std::to_string(sum));
  }
}

double safe_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

}  // namespace

double node_loss(std::span<const NodeTarget> targets,
                 std::span<const std::vector<double>> predictions) {
  if (targets.size() != predictions.size()) {
    throw Error(ErrorCode::kSizeMismatch, "node_loss: targets and predictions differ in length");
  }
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t v = 0; v < targets.size(); ++v) {
    check_distribution(predictions[v], targets[v].y.size(), v);
    for (std::size_t k = 0; k < targets[v].y.size(); ++k) {
      total -= targets[v].weight * targets[v].y[k] * safe_log(predictions[v][k]);
    }
  }
  return total / static_cast<double>(targets.size());
}

double edge_loss(std::span<const EdgeTarget> targets,
                 std::span<const std::vector<double>> predictions) {
  if (targets.size() != predictions.size()) {
    throw Error(ErrorCode::kSizeMismatch, "edge_loss: targets and predictions differ in length");
  }
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    check_distribution(predictions[m], 2, m);
    total -= targets[m].weight * safe_log(predictions[m][targets[m].label == 1 ? 1 : 0]);
  }
  return total / static_cast<double>(targets.size());
}

std::string format_score(double score) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), score);
  return std::string(buf, end);
}

namespace {

std::string flatten(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const ChatMessage& m : messages) out += m.content;
  return out;
}

}  // namespace

ExportSummary export_training_set(const Corpus& corpus, const AnchorScale& scale,
                                  const ExportParams& params, const PromptSet& prompts,
                                  const std::filesystem::path& scoring_path,
                                  const std::filesystem::path& comparison_path) {
  std::vector<std::string> ids = params.paper_ids;
  if (ids.empty()) {
    for (const Paper& p : corpus.papers()) {
      if (corpus.label(p.id)) ids.push_back(p.id);
    }
  }
  std::map<std::string, double> labels;
  for (const std::string& id : ids) {
    corpus.index_of(id);
    auto s = corpus.label(id);
    if (!s) throw Error(ErrorCode::kMissingLabel, "paper '" + id + "' has no label");
    labels.emplace(id, *s);
  }

  std::vector<Json> scoring;
  for (const std::string& id : ids) {
    const Paper& paper = corpus.paper(corpus.index_of(id));
    const double s = labels.at(id);
    const NodeTarget target = node_target(s, scale, params.sigma, params.tau);
    const auto messages = prompts.scoring_data.render({{"criteria", prompts.criteria},
                                                       {"ground_truth", format_score(s)},
                                                       {"paper_text", paper.text}});
    scoring.push_back(Json{{"paper_id", id},
                           {"prompt", flatten(messages)},
                           {"anchors", scale.values()},
                           {"target", target.y},
                           {"scalar", s}});
  }

  std::vector<Json> comparison;
  for (const EdgeTarget& pair : mine_pairs(labels, params.delta, params.seed)) {
    const Paper& a = corpus.paper(corpus.index_of(pair.u_id));
    const Paper& b = corpus.paper(corpus.index_of(pair.v_id));
    const auto messages = prompts.comparison_data.render({{"criteria", prompts.criteria},
                                                          {"ground_truth", pair.label ? "A" : "B"},
                                                          {"paper_text_a", a.text},
                                                          {"paper_text_b", b.text}});
    comparison.push_back(Json{{"u_id", pair.u_id},
                              {"v_id", pair.v_id},
                              {"prompt", flatten(messages)},
                              {"label", pair.label},
                              {"weight", pair.weight}});
  }

  util::write_jsonl(scoring_path, scoring);
  util::write_jsonl(comparison_path, comparison);
  return ExportSummary{scoring.size(), comparison.size()};
}

}  // namespace graphreview::riml
