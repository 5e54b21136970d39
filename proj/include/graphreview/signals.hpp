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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphreview/anchors.hpp"
#include "graphreview/corpus.hpp"
#include "graphreview/prompts.hpp"
#include "graphreview/transport.hpp"
#include "graphreview/util.hpp"

namespace graphreview {

struct NodeSignal {
  std::string paper_id;
  std::vector<double> distribution;  // over the anchors of the scale used
  std::string rationale;
  double scalar_score = 0.0;         // expectation of `distribution`
};

enum class Winner { kFirst, kSecond };

struct EdgeSignal {
  std::string first_id;
  std::string second_id;
  Winner winner = Winner::kFirst;
  std::string rationale;

  const std::string& winner_id() const { return winner == Winner::kFirst ? first_id : second_id; }
  const std::string& loser_id() const { return winner == Winner::kFirst ? second_id : first_id; }
};

util::Json to_json(const NodeSignal& s);
util::Json to_json(const EdgeSignal& s);
NodeSignal node_signal_from_json(const util::Json& j);
EdgeSignal edge_signal_from_json(const util::Json& j);

// Node scorer and edge comparator. Implementations must be safe for
// concurrent calls.
class ReviewBackend {
 public:
  virtual ~ReviewBackend() = default;

  virtual std::string id() const = 0;
  virtual NodeSignal score(const Paper& paper, const AnchorScale& scale) = 0;
  virtual EdgeSignal compare(const Paper& a, const Paper& b) = 0;
  // Number of model calls made so far (cache hits excluded).
  virtual std::size_t calls() const = 0;
};

// Validating front doors: empty text and self-comparison are rejected before
// reaching the backend.
NodeSignal score_node(const Paper& paper, const AnchorScale& scale, ReviewBackend& backend);
EdgeSignal compare_pair(const Paper& a, const Paper& b, ReviewBackend& backend);

struct OracleNoise {
  double flip_probability = 0.0;  // chance of inverting a comparison
  double score_sigma = 0.0;       // Gaussian noise added to labels before softening
  // Width of the reward softmax used to spread a (noisy) label over anchors;
  // 0 splits mass between the two bracketing anchors instead.
  double anchor_sigma = 1.0;
  double anchor_tau = 1.0;
};

// Label-driven backend for desk-scale verification. All noise is a pure
// function of (seed, paper ids), so repeated calls agree.
class OracleBackend final : public ReviewBackend {
 public:
  OracleBackend(std::map<std::string, double> labels, OracleNoise noise, std::uint64_t seed);

  std::string id() const override;
  NodeSignal score(const Paper& paper, const AnchorScale& scale) override;
  EdgeSignal compare(const Paper& a, const Paper& b) override;
  std::size_t calls() const override { return calls_.load(); }

  // Label plus the per-paper Gaussian draw.
  double noisy_score(const std::string& id) const;

 private:
  double label_of(const std::string& id) const;

  std::map<std::string, double> labels_;
  OracleNoise noise_;
  std::uint64_t seed_;
  std::atomic<std::size_t> calls_{0};
};

// Content-addressed response store: one JSON file per key under `dir`, plus
// an in-memory layer. Identical keys always carry identical values, so
// concurrent writers racing on a key are harmless.
class SignalCache {
 public:
  explicit SignalCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<util::Json> get(const std::string& key);
  void put(const std::string& key, const util::Json& value);

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mutex_;
  std::unordered_map<std::string, util::Json> memory_;
};

// Parses "<number> rationale..." into (score, rationale). Throws
// MalformedResponse when the reply does not start with a number.
std::pair<double, std::string> parse_score_verdict(const std::string& text);
// Parses "A ..." / "B ..." into (0 for A, 1 for B, rationale).
std::pair<int, std::string> parse_choice_verdict(const std::string& text);

// Backend over a chat model using the scoring and comparison templates.
// Comparisons are canonicalized by id and the presentation order is a seeded
// coin flip per pair, inverted again when reading the verdict, so
// compare(a, b) and compare(b, a) share one model call and one answer.
class LlmBackend final : public ReviewBackend {
 public:
  LlmBackend(std::shared_ptr<ChatTransport> transport, PromptSet prompts,
             std::shared_ptr<SignalCache> cache, std::uint64_t position_seed);

  std::string id() const override { return transport_->id(); }
  NodeSignal score(const Paper& paper, const AnchorScale& scale) override;
  EdgeSignal compare(const Paper& a, const Paper& b) override;
  std::size_t calls() const override { return transport_->calls(); }

  // Whether paper `lo` (the smaller id) is shown in position B.
  bool swapped(const std::string& lo, const std::string& hi) const;

 private:
  std::shared_ptr<ChatTransport> transport_;
  PromptSet prompts_;
  std::shared_ptr<SignalCache> cache_;
  std::uint64_t position_seed_;
};

enum class BackendKind { kOracle, kRemote, kReplay };

std::string_view backend_kind_name(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::kOracle;
  std::string endpoint;  // remote
  std::string model = "default";
  std::string api_key;   // remote; normally from GRAPHREVIEW_API_KEY
  std::filesystem::path replay_path;  // replay
  std::optional<std::filesystem::path> prompt_dir;
  std::optional<std::filesystem::path> cache_dir;
  OracleNoise noise;
  std::uint64_t seed = 0;
  RetryPolicy retry;
  int top_logprobs = 0;
};

// Builds the backend described by `config`. Throws InvalidParam when a remote
// backend lacks an endpoint and MissingLabel when an oracle has no labels.
std::unique_ptr<ReviewBackend> make_backend(const BackendConfig& config, const Corpus& corpus);
// Text model for consolidation and prompt evolving; nullptr for the oracle.
std::shared_ptr<ChatTransport> make_transport(const BackendConfig& config);
PromptSet load_prompts(const BackendConfig& config);

// --- prompt evolving ---------------------------------------------------------

class PromptEvolver {
 public:
  virtual ~PromptEvolver() = default;
  virtual std::string propose(const std::string& incumbent) = 0;
};

struct JudgeVerdict {
  bool prefer_candidate = false;
  std::vector<std::string> raw;  // judger replies, for the lineage log
};

class PromptJudge {
 public:
  virtual ~PromptJudge() = default;
  virtual JudgeVerdict judge(const std::string& incumbent, const std::string& candidate) = 0;
};

struct EvolveStep {
  int round = 0;
  std::string candidate;
  bool accepted = false;
  std::vector<std::string> judge_raw;
};

struct EvolveResult {
  std::string prompt;
  std::vector<EvolveStep> lineage;
};

// Runs `rounds` propose/judge rounds; a candidate replaces the incumbent only
// when the judge prefers it.
EvolveResult evolve_prompt(const std::string& initial, int rounds, PromptEvolver& evolver,
                           PromptJudge& judge);

// Rewrites criteria with the criteria-optimization template.
class ChatPromptEvolver final : public PromptEvolver {
 public:
  ChatPromptEvolver(std::shared_ptr<ChatTransport> model, PromptTemplate tmpl,
                    std::string task_prompt);
  std::string propose(const std::string& incumbent) override;

 private:
  std::shared_ptr<ChatTransport> model_;
  PromptTemplate template_;
  std::string task_prompt_;
};

// Generates an answer per sample with each criteria text (via the task
// template's {criteria} and {paper_text} slots), then asks the judger which
// answer is better using the answer-evaluation template, with a seeded
// position swap per sample. The candidate wins on a strict majority. Without
// samples the two criteria texts are compared directly.
class ChatPromptJudge final : public PromptJudge {
 public:
  ChatPromptJudge(std::shared_ptr<ChatTransport> generator, std::shared_ptr<ChatTransport> judger,
                  PromptTemplate task, PromptTemplate answer_evaluation,
                  std::vector<std::string> samples, std::uint64_t seed);
  JudgeVerdict judge(const std::string& incumbent, const std::string& candidate) override;

 private:
  std::shared_ptr<ChatTransport> generator_;
  std::shared_ptr<ChatTransport> judger_;
  PromptTemplate task_;
  PromptTemplate answer_evaluation_;
  std::vector<std::string> samples_;
  std::uint64_t seed_;
  int round_ = 0;
};

}  // namespace graphreview
