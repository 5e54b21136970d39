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
#include "graphreview/report.hpp"

#include <spdlog/spdlog.h>

#include <array>
#include <regex>

#include "graphreview/error.hpp"

namespace graphreview {

using util::Json;

Json EvidenceBundle::to_json() const {
  Json pairs = Json::array();
  for (const RelatedPair& p : related_pairs) {
    pairs.push_back(Json{{"citation", p.citation},
                         {"paper_id", p.other_id},
                         {"year", p.other_year},
                         {"pair_comparison", p.pair_comparison},
                         {"preferred", p.winner_id == paper_id ? "this paper" : "the other paper"}});
  }
  return Json{{"paper_id", paper_id},
              {"ranking", std::to_string(ranking) + "/" + std::to_string(total)},
              {"decision", decision == Decision::kAccept ? "Accept" : "Reject"},
              {"single_paper_review", single_paper_review},
              {"related_pairs", pairs}};
}

EvidenceBundle build_bundle(const std::string& paper_id, const Corpus& corpus,
                            const RunResult& run) {
  auto node = corpus.find(paper_id);
  if (!node || corpus.paper(*node).role != Role::kSubmission || run.best_t == 0) {
    throw Error(ErrorCode::kUnknownPaper, "'" + paper_id + "' is not a ranked submission");
  }
  EvidenceBundle bundle;
  bundle.paper_id = paper_id;
  bundle.ranking = run.best_ranking.rank_of(paper_id);
  bundle.total = run.best_ranking.entries.size();
  bundle.decision = run.best_ranking.entries[bundle.ranking - 1].decision;
  if (*node < run.node_signals.size()) bundle.single_paper_review = run.node_signals[*node].rationale;

  for (const Edge& e : run.best_state().cumulative()) {
    if (e.u != *node && e.v != *node) continue;
    const NodeId other = e.u == *node ? e.v : e.u;
    const Paper& p = corpus.paper(other);
    RelatedPair pair;
    pair.other_id = p.id;
    pair.other_year = p.year;
    pair.citation = "(#" + std::to_string(bundle.related_pairs.size()) + ", " +
                    std::to_string(p.year) + ")";
    auto it = run.edge_signals.find({e.u, e.v});
    if (it != run.edge_signals.end()) {
      pair.pair_comparison = it->second.rationale;
      pair.winner_id = it->second.winner_id();
    }
    bundle.related_pairs.push_back(std::move(pair));
  }
  return bundle;
}

namespace {

constexpr std::array<const char*, 7> kSections = {"Ranking",       "Decision",  "Summary",
                                                  "Advantages",    "Disadvantages",
                                                  "Questions",     "Suggestions"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ReviewReport parse_report(const std::string& text) {
  std::array<std::pair<std::size_t, std::size_t>, kSections.size()> spans{};  // header start, body start
  std::size_t from = 0;
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    const std::regex header("\\*\\*[ \\t]*" + std::string(kSections[i]) +
                            "[ \\t]*(?::[ \\t]*\\*\\*|\\*\\*[ \\t]*:)");
    std::smatch m;
    const std::string rest = text.substr(from);
    if (!std::regex_search(rest, m, header)) {
      throw Error(ErrorCode::kMalformedReport,
                  std::string("missing or out-of-order section '") + kSections[i] + "'");
    }
    spans[i] = {from + static_cast<std::size_t>(m.position(0)),
                from + static_cast<std::size_t>(m.position(0) + m.length(0))};
    from = spans[i].second;
  }
  std::array<std::string, kSections.size()> bodies;
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    const std::size_t end = i + 1 < kSections.size() ? spans[i + 1].first : text.size();
    bodies[i] = trim(text.substr(spans[i].second, end - spans[i].second));
  }
  // A fenced reply leaves its closing fence on the last section.
  if (bodies[6].size() >= 3 && bodies[6].compare(bodies[6].size() - 3, 3, "```") == 0) {
    bodies[6] = trim(bodies[6].substr(0, bodies[6].size() - 3));
  }
  return ReviewReport{bodies[0], bodies[1], bodies[2], bodies[3],
                      bodies[4], bodies[5], bodies[6]};
}

std::string render_report(const ReviewReport& r) {
  std::string out;
  out += "**Ranking:** " + r.ranking_line + "\n";
  out += "**Decision:** " + r.decision_line + "\n\n";
  out += "**Summary**:\n" + r.summary + "\n\n";
  out += "**Advantages**:\n" + r.advantages + "\n\n";
  out += "**Disadvantages**:\n" + r.disadvantages + "\n\n";
  out += "**Questions**:\n" + r.questions + "\n\n";
  out += "**Suggestions**:\n" + r.suggestions + "\n";
  return out;
}

std::string engine_ranking_line(const EvidenceBundle& bundle) {
  return std::to_string(bundle.ranking) + "/" + std::to_string(bundle.total);
}

namespace {

std::string decision_text(Decision d) { return d == Decision::kAccept ? "Accept" : "Reject"; }

std::string numbered(const std::vector<std::string>& items) {
  if (items.empty()) return "None.";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

}  // namespace

ReviewReport fallback_report(const EvidenceBundle& bundle) {
  std::vector<std::string> wins;
  std::vector<std::string> losses;
  for (const RelatedPair& p : bundle.related_pairs) {
    const bool won = p.winner_id == bundle.paper_id;
    std::string line = (won ? "Preferred over " : "Judged weaker than ") + p.citation;
    if (!p.pair_comparison.empty()) line += ": " + trim(p.pair_comparison);
    (won ? wins : losses).push_back(std::move(line));
  }
  ReviewReport r;
  r.ranking_line = engine_ranking_line(bundle);
  r.decision_line = decision_text(bundle.decision);
  r.summary = bundle.single_paper_review.empty() ? "No single-paper review available."
                                                 : trim(bundle.single_paper_review);
  r.advantages = numbered(wins);
  r.disadvantages = numbered(losses);
  r.questions = "None.";
  r.suggestions = "None.";
  return r;
}

namespace {

inline constexpr const char* kFormatReminder =
    "Your previous answer did not follow the required output format. Reply again with exactly "
    "these section headers, in this order: **Ranking:**, **Decision:**, **Summary**:, "
    "**Advantages**:, **Disadvantages**:, **Questions**:, **Suggestions**:.";

// Leading number of a ranking line such as "(225/500)".
std::optional<long> leading_rank(const std::string& line) {
  static const std::regex number("(\\d+)");
  std::smatch m;
  if (!std::regex_search(line, m, number)) return std::nullopt;
  return std::stol(m[1]);
}

}  // namespace

ConsolidationOutcome consolidate(const EvidenceBundle& bundle, ChatTransport& transport,
                                 const PromptTemplate& consolidation) {
  ConsolidationOutcome out;
  out.paper_id = bundle.paper_id;
  std::vector<ChatMessage> messages =
      consolidation.render({{"json_str", bundle.to_json().dump(2)}});

  std::optional<ReviewReport> parsed;
  for (int attempt = 1; attempt <= 2 && !parsed; ++attempt) {
    out.attempts = attempt;
    const ChatReply reply = transport.send(messages);
    out.raw_responses.push_back(reply.text);
    try {
      parsed = parse_report(reply.text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedReport) throw;
      spdlog::warn("report for '{}' attempt {}: {}", bundle.paper_id, attempt, e.what());
      messages.push_back({"assistant", reply.text});
      messages.push_back({"user", kFormatReminder});
    }
  }
  if (!parsed) {
    out.used_fallback = true;
    out.report = fallback_report(bundle);
    return out;
  }

  const std::string rank_line = engine_ranking_line(bundle);
  const std::string decision_line = decision_text(bundle.decision);
  const auto model_rank = leading_rank(parsed->ranking_line);
  const bool rank_differs = !model_rank || *model_rank != static_cast<long>(bundle.ranking);
  const bool decision_differs =
      parsed->decision_line.find(decision_line) == std::string::npos;
  if (rank_differs || decision_differs) {
    out.disagreement = "model said '" + parsed->ranking_line + "' / '" + parsed->decision_line +
                       "', engine says '" + rank_line + "' / '" + decision_line + "'";
    spdlog::info("report for '{}': {}", bundle.paper_id, *out.disagreement);
  }
  parsed->ranking_line = rank_line;
  parsed->decision_line = decision_line;
  out.report = std::move(*parsed);
  return out;
}

std::vector<ConsolidationOutcome> consolidate_all(const Corpus& corpus, const RunResult& run,
                                                  ChatTransport* transport,
                                                  const PromptTemplate& consolidation,
                                                  std::size_t max_in_flight) {
  const std::vector<std::string> ids = run.best_ranking.order();
  std::vector<ConsolidationOutcome> outcomes(ids.size());
  util::parallel_for(ids.size(), max_in_flight, [&](std::size_t i) {
    const EvidenceBundle bundle = build_bundle(ids[i], corpus, run);
    if (transport != nullptr) {
      try {
        outcomes[i] = consolidate(bundle, *transport, consolidation);
        return;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBackendUnavailable) throw;
        spdlog::warn("report for '{}': {}; using fallback", ids[i], e.what());
      }
    }
    outcomes[i].paper_id = ids[i];
    outcomes[i].report = fallback_report(bundle);
    outcomes[i].used_fallback = true;
  });
  return outcomes;
}

namespace {

std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

}  // namespace

void write_reports(const std::filesystem::path& dir,
                   const std::vector<ConsolidationOutcome>& outcomes) {
  std::filesystem::create_directories(dir);
  std::vector<Json> index;
  for (const ConsolidationOutcome& o : outcomes) {
    const std::string name = file_stem(o.paper_id) + ".md";
    util::write_text_file(dir / name, render_report(o.report));
    Json entry{{"paper_id", o.paper_id},
               {"file", name},
               {"fallback", o.used_fallback},
               {"attempts", o.attempts}};
    if (o.disagreement) entry["disagreement"] = *o.disagreement;
    index.push_back(std::move(entry));
  }
  util::write_jsonl(dir / "index.jsonl", index);
}

}  // namespace graphreview
