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
#include "graphreview/signals.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "graphreview/error.hpp"
#include "graphreview/riml.hpp"

namespace graphreview {

using util::Json;

Json to_json(const NodeSignal& s) {
  return Json{{"paper_id", s.paper_id},
              {"distribution", s.distribution},
              {"rationale", s.rationale},
              {"scalar_score", s.scalar_score}};
}

Json to_json(const EdgeSignal& s) {
  return Json{{"first_id", s.first_id},
              {"second_id", s.second_id},
              {"winner", s.winner == Winner::kFirst ? "first" : "second"},
              {"rationale", s.rationale}};
}

NodeSignal node_signal_from_json(const Json& j) {
  NodeSignal s;
  s.paper_id = j.at("paper_id").get<std::string>();
  s.distribution = j.at("distribution").get<std::vector<double>>();
  s.rationale = j.value("rationale", std::string{});
  s.scalar_score = j.at("scalar_score").get<double>();
  return s;
}

EdgeSignal edge_signal_from_json(const Json& j) {
  EdgeSignal s;
  s.first_id = j.at("first_id").get<std::string>();
  s.second_id = j.at("second_id").get<std::string>();
  s.winner = j.at("winner").get<std::string>() == "first" ? Winner::kFirst : Winner::kSecond;
  s.rationale = j.value("rationale", std::string{});
  return s;
}

NodeSignal score_node(const Paper& paper, const AnchorScale& scale, ReviewBackend& backend) {
  if (paper.text.empty()) {
    throw Error(ErrorCode::kInvalidParam, "paper '" + paper.id + "' has empty text");
  }
  return backend.score(paper, scale);
}

EdgeSignal compare_pair(const Paper& a, const Paper& b, ReviewBackend& backend) {
  if (a.id == b.id) throw Error(ErrorCode::kInvalidParam, "cannot compare '" + a.id + "' with itself");
  return backend.compare(a, b);
}

// --- oracle -----------------------------------------------------------------

OracleBackend::OracleBackend(std::map<std::string, double> labels, OracleNoise noise,
                             std::uint64_t seed)
    : labels_(std::move(labels)), noise_(noise), seed_(seed) {
  if (noise_.flip_probability < 0.0 || noise_.flip_probability > 1.0 || noise_.score_sigma < 0.0 ||
      noise_.anchor_sigma < 0.0 || !(noise_.anchor_tau > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "invalid oracle noise parameters");
  }
}

std::string OracleBackend::id() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "oracle:flip=%.17g,sigma=%.17g,anchor_sigma=%.17g,tau=%.17g,seed=%llu",
                noise_.flip_probability, noise_.score_sigma, noise_.anchor_sigma, noise_.anchor_tau,
                static_cast<unsigned long long>(seed_));
  return buf;
}

double OracleBackend::label_of(const std::string& id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) throw Error(ErrorCode::kMissingLabel, "oracle: no label for '" + id + "'");
  return it->second;
}

double OracleBackend::noisy_score(const std::string& id) const {
  const double label = label_of(id);
  if (noise_.score_sigma == 0.0) return label;
  return label + noise_.score_sigma * util::standard_normal(util::stable_hash(seed_, {"score", id}));
}

NodeSignal OracleBackend::score(const Paper& paper, const AnchorScale& scale) {
  ++calls_;
  const double s = noisy_score(paper.id);
  NodeSignal signal;
  signal.paper_id = paper.id;
  signal.distribution = noise_.anchor_sigma > 0.0
                            ? riml::node_target(s, scale, noise_.anchor_sigma, noise_.anchor_tau).y
                            : interpolate_on_anchors(s, scale);
  signal.scalar_score = anchor_expectation(signal.distribution, scale);
  signal.rationale = "oracle score " + riml::format_score(s);
  return signal;
}

EdgeSignal OracleBackend::compare(const Paper& a, const Paper& b) {
  ++calls_;
  const double sa = label_of(a.id);
  const double sb = label_of(b.id);
  bool first_wins = sa != sb ? sa > sb : a.id < b.id;
  if (noise_.flip_probability > 0.0) {
    const auto& lo = std::min(a.id, b.id);
    const auto& hi = std::max(a.id, b.id);
    if (util::unit_interval(util::stable_hash(seed_, {"flip", lo, hi})) < noise_.flip_probability) {
      first_wins = !first_wins;
    }
  }
  EdgeSignal signal{a.id, b.id, first_wins ? Winner::kFirst : Winner::kSecond, {}};
  signal.rationale = "oracle prefers " + signal.winner_id();
  return signal;
}

// --- cache --------------------------------------------------------------------

SignalCache::SignalCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<Json> SignalCache::get(const std::string& key) {
  {
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (key + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  Json value = Json::parse(util::read_text_file(path), nullptr, false);
  if (value.is_discarded()) {
    spdlog::warn("ignoring corrupt cache entry {}", path.string());
    return std::nullopt;
  }
  std::lock_guard lock(mutex_);
  memory_.emplace(key, value);
  return value;
}

void SignalCache::put(const std::string& key, const Json& value) {
  {
    std::lock_guard lock(mutex_);
    memory_[key] = value;
  }
  if (!dir_) return;
  // Write-then-rename keeps readers from seeing a partial file.
  const auto final_path = *dir_ / (key + ".json");
  const auto tmp_path = *dir_ / (key + ".json.tmp" + std::to_string(std::hash<std::thread::id>{}(
                                                        std::this_thread::get_id())));
  util::write_text_file(tmp_path, value.dump(2));
  std::filesystem::rename(tmp_path, final_path);
}

// --- verdict parsing ---------------------------------------------------------

namespace {

std::size_t skip_space(const std::string& text, std::size_t pos = 0) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  return pos;
}

std::string trim_left(const std::string& text, std::size_t pos) {
  pos = skip_space(text, pos);
  return text.substr(pos);
}

std::string sha(const std::string& s) { return util::sha256_hex(s); }

std::string join_key(std::initializer_list<std::string> parts) {
  std::string blob;
  for (const auto& p : parts) {
    blob += p;
    blob.push_back('\x1f');
  }
  return sha(blob);
}

}  // namespace

std::pair<double, std::string> parse_score_verdict(const std::string& text) {
  std::size_t pos = skip_space(text);
  const char* begin = text.data() + pos;
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw Error(ErrorCode::kMalformedResponse,
                "expected a leading score, got: " + text.substr(pos, 40));
  }
  return {value, trim_left(text, static_cast<std::size_t>(ptr - text.data()))};
}

std::pair<int, std::string> parse_choice_verdict(const std::string& text) {
  std::size_t pos = skip_space(text);
  if (pos < text.size() && (text[pos] == 'A' || text[pos] == 'B')) {
    const std::size_t next = pos + 1;
    if (next == text.size() || !std::isalnum(static_cast<unsigned char>(text[next]))) {
      return {text[pos] == 'A' ? 0 : 1, trim_left(text, next)};
    }
  }
  throw Error(ErrorCode::kMalformedResponse,
              "expected a leading choice A or B, got: " + text.substr(pos, 40));
}

// --- LLM backend -------------------------------------------------------------

LlmBackend::LlmBackend(std::shared_ptr<ChatTransport> transport, PromptSet prompts,
                       std::shared_ptr<SignalCache> cache, std::uint64_t position_seed)
    : transport_(std::move(transport)),
      prompts_(std::move(prompts)),
      cache_(cache ? std::move(cache) : std::make_shared<SignalCache>()),
      position_seed_(position_seed) {}

bool LlmBackend::swapped(const std::string& lo, const std::string& hi) const {
  return util::unit_interval(util::stable_hash(position_seed_, {"position", lo, hi})) < 0.5;
}

namespace {

// Mass over anchors from first-token alternatives whose text is an anchor
// value; empty when none match.
std::vector<double> distribution_from_tokens(const std::vector<TokenProb>& alternatives,
                                             const AnchorScale& scale) {
  std::vector<double> dist(scale.size(), 0.0);
  double total = 0.0;
  for (const TokenProb& alt : alternatives) {
    std::string token = alt.token;
    token.erase(0, token.find_first_not_of(" \t\n"));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) continue;
    for (std::size_t k = 0; k < scale.size(); ++k) {
      if (std::abs(value - scale[k]) < 1e-9) {
        const double p = std::exp(alt.logprob);
        dist[k] += p;
        total += p;
      }
    }
  }
  if (!(total > 0.0)) return {};
  for (double& p : dist) p /= total;
  return dist;
}

}  // namespace

NodeSignal LlmBackend::score(const Paper& paper, const AnchorScale& scale) {
  std::string anchors;
  for (double a : scale.values()) anchors += riml::format_score(a) + ",";
  const std::string key = join_key({"score", transport_->id(), prompts_.scoring.hash(),
                                    sha(prompts_.criteria), sha(paper.text), anchors});
  if (auto hit = cache_->get(key)) return node_signal_from_json(hit->at("signal"));

  const ChatReply reply = transport_->send(prompts_.scoring.render(
      {{"criteria", prompts_.criteria}, {"paper_text", paper.text}}));
  auto [verdict, rationale] = parse_score_verdict(reply.text);
  NodeSignal signal;
  signal.paper_id = paper.id;
  signal.distribution = distribution_from_tokens(reply.first_token_alternatives, scale);
  if (signal.distribution.empty()) signal.distribution = interpolate_on_anchors(verdict, scale);
  signal.scalar_score = anchor_expectation(signal.distribution, scale);
  signal.rationale = std::move(rationale);
  cache_->put(key, Json{{"raw", reply.text}, {"signal", to_json(signal)}});
  return signal;
}

EdgeSignal LlmBackend::compare(const Paper& a, const Paper& b) {
  const bool a_is_lo = a.id < b.id;
  const Paper& lo = a_is_lo ? a : b;
  const Paper& hi = a_is_lo ? b : a;
  const bool swap = swapped(lo.id, hi.id);
  const Paper& shown_a = swap ? hi : lo;
  const Paper& shown_b = swap ? lo : hi;
  const std::string key =
      join_key({"compare", transport_->id(), prompts_.comparison.hash(), sha(prompts_.criteria),
                sha(shown_a.text), sha(shown_b.text), std::to_string(position_seed_)});

  std::string winner_id;
  std::string rationale;
  if (auto hit = cache_->get(key)) {
    winner_id = hit->at("winner_id").get<std::string>();
    rationale = hit->value("rationale", std::string{});
  } else {
    const ChatReply reply = transport_->send(prompts_.comparison.render(
        {{"criteria", prompts_.criteria},
         {"paper_text_a", shown_a.text},
         {"paper_text_b", shown_b.text}}));
    auto [choice, text] = parse_choice_verdict(reply.text);
    winner_id = choice == 0 ? shown_a.id : shown_b.id;
    rationale = std::move(text);
    cache_->put(key, Json{{"raw", reply.text},
                          {"shown_a", shown_a.id},
                          {"shown_b", shown_b.id},
                          {"winner_id", winner_id},
                          {"rationale", rationale}});
  }
  // Text-identical papers share a key; map the verdict back by position.
  if (winner_id != a.id && winner_id != b.id) winner_id = shown_a.id;
  return EdgeSignal{a.id, b.id, winner_id == a.id ? Winner::kFirst : Winner::kSecond,
                    std::move(rationale)};
}

// --- factory ------------------------------------------------------------------

std::string_view backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kOracle: return "oracle";
    case BackendKind::kRemote: return "remote";
    case BackendKind::kReplay: return "replay";
  }
  return "oracle";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "oracle") return BackendKind::kOracle;
  if (name == "remote") return BackendKind::kRemote;
  if (name == "replay") return BackendKind::kReplay;
  throw Error(ErrorCode::kInvalidParam, "unknown backend kind '" + std::string(name) + "'");
}

PromptSet load_prompts(const BackendConfig& config) {
  return config.prompt_dir ? PromptSet::load(*config.prompt_dir) : PromptSet::defaults();
}

std::shared_ptr<ChatTransport> make_transport(const BackendConfig& config) {
  switch (config.kind) {
    case BackendKind::kOracle:
      return nullptr;
    case BackendKind::kRemote: {
      if (config.endpoint.empty()) {
        throw Error(ErrorCode::kInvalidParam, "remote backend requires an endpoint");
      }
      HttpTransportOptions options;
      options.endpoint = config.endpoint;
      options.model = config.model;
      options.api_key = config.api_key;
      options.retry = config.retry;
      options.top_logprobs = config.top_logprobs;
      return std::make_shared<HttpChatTransport>(std::move(options));
    }
    case BackendKind::kReplay:
      return ReplayTransport::from_file(config.replay_path);
  }
  return nullptr;
}

std::unique_ptr<ReviewBackend> make_backend(const BackendConfig& config, const Corpus& corpus) {
  if (config.kind == BackendKind::kOracle) {
    if (!corpus.has_labels()) {
      throw Error(ErrorCode::kMissingLabel, "oracle backend requires labels");
    }
    return std::make_unique<OracleBackend>(corpus.labels(), config.noise, config.seed);
  }
  auto cache = std::make_shared<SignalCache>(config.cache_dir);
  return std::make_unique<LlmBackend>(make_transport(config), load_prompts(config),
                                      std::move(cache), config.seed);
}

// --- prompt evolving ---------------------------------------------------------

EvolveResult evolve_prompt(const std::string& initial, int rounds, PromptEvolver& evolver,
                           PromptJudge& judge) {
  if (rounds < 0) throw Error(ErrorCode::kInvalidParam, "rounds must be >= 0");
  EvolveResult result{initial, {}};
  for (int m = 1; m <= rounds; ++m) {
    EvolveStep step;
    step.round = m;
    step.candidate = evolver.propose(result.prompt);
    JudgeVerdict verdict = judge.judge(result.prompt, step.candidate);
    step.accepted = verdict.prefer_candidate;
    step.judge_raw = std::move(verdict.raw);
    if (step.accepted) result.prompt = step.candidate;
    spdlog::info("prompt evolving round {}: candidate {}", m,
                 step.accepted ? "accepted" : "rejected");
    result.lineage.push_back(std::move(step));
  }
  return result;
}

ChatPromptEvolver::ChatPromptEvolver(std::shared_ptr<ChatTransport> model, PromptTemplate tmpl,
                                     std::string task_prompt)
    : model_(std::move(model)), template_(std::move(tmpl)), task_prompt_(std::move(task_prompt)) {}

std::string ChatPromptEvolver::propose(const std::string& incumbent) {
  const ChatReply reply =
      model_->send(template_.render({{"prompt", task_prompt_}, {"criteria", incumbent}}));
  std::string text = reply.text;
  text.erase(0, text.find_first_not_of(" \t\r\n"));
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  return text;
}

ChatPromptJudge::ChatPromptJudge(std::shared_ptr<ChatTransport> generator,
                                 std::shared_ptr<ChatTransport> judger, PromptTemplate task,
                                 PromptTemplate answer_evaluation, std::vector<std::string> samples,
                                 std::uint64_t seed)
    : generator_(std::move(generator)),
      judger_(std::move(judger)),
      task_(std::move(task)),
      answer_evaluation_(std::move(answer_evaluation)),
      samples_(std::move(samples)),
      seed_(seed) {}

JudgeVerdict ChatPromptJudge::judge(const std::string& incumbent, const std::string& candidate) {
  ++round_;
  JudgeVerdict verdict;
  std::vector<std::pair<std::string, std::string>> answers;  // (incumbent, candidate)
  if (samples_.empty()) {
    answers.emplace_back(incumbent, candidate);
  } else {
    for (const std::string& sample : samples_) {
      auto answer_for = [&](const std::string& criteria) {
        return generator_
            ->send(task_.render({{"criteria", criteria}, {"paper_text", sample}}))
            .text;
      };
      answers.emplace_back(answer_for(incumbent), answer_for(candidate));
    }
  }
  std::size_t candidate_wins = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const bool candidate_first =
        util::unit_interval(util::stable_hash(
            seed_, {"judge", std::to_string(round_), std::to_string(i)})) < 0.5;
    const auto& [inc, cand] = answers[i];
    const ChatReply reply = judger_->send(answer_evaluation_.render(
        {{"answer_A", candidate_first ? cand : inc}, {"answer_B", candidate_first ? inc : cand}}));
    verdict.raw.push_back(reply.text);
    const int choice = parse_choice_verdict(reply.text).first;
    if ((choice == 0) == candidate_first) ++candidate_wins;
  }
  verdict.prefer_candidate = 2 * candidate_wins > answers.size();
  return verdict;
}

}  // namespace graphreview
