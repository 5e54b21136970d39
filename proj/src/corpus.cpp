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
#include "graphreview/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "graphreview/error.hpp"
#include "graphreview/util.hpp"

namespace graphreview {

using util::Json;

std::string_view role_name(Role role) {
  return role == Role::kSubmission ? "submission" : "historical";
}

Role parse_role(std::string_view name) {
  if (name == "submission") return Role::kSubmission;
  if (name == "historical") return Role::kHistorical;
  throw Error(ErrorCode::kParseError, "unknown role '" + std::string(name) + "'");
}

std::string truncate_utf8(std::string_view text, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    // Continuation bytes (10xxxxxx) do not start a new code point.
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (chars == max_chars) return std::string(text.substr(0, i));
      ++chars;
    }
  }
  return std::string(text);
}

Corpus::Corpus(std::vector<Paper> papers,
               std::unordered_map<std::string, std::vector<double>> embeddings,
               std::map<std::string, double> labels)
    : papers_(std::move(papers)), labels_(std::move(labels)) {
  embeddings_.resize(papers_.size());
  for (NodeId i = 0; i < papers_.size(); ++i) {
    const Paper& p = papers_[i];
    if (!index_.emplace(p.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate paper id '" + p.id + "'");
    }
    if (p.text.empty()) {
      throw Error(ErrorCode::kParseError, "paper '" + p.id + "' has empty text");
    }
    if (p.role == Role::kSubmission) ++num_submissions_;
  }
  if (!papers_.empty() && num_submissions_ == 0) {
    throw Error(ErrorCode::kEmptyInput, "corpus has no submissions");
  }
  for (auto& [id, vec] : embeddings) {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw Error(ErrorCode::kUnknownPaper, "embedding for unknown paper '" + id + "'");
    }
    if (vec.empty()) throw Error(ErrorCode::kParseError, "empty embedding for '" + id + "'");
    if (dimension_ == 0) {
      dimension_ = vec.size();
    } else if (vec.size() != dimension_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "embedding for '" + id + "' has dimension " + std::to_string(vec.size()) +
                      ", expected " + std::to_string(dimension_));
    }
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kParseError, "embedding for '" + id + "' has zero or invalid norm");
    }
    // Already-unit vectors stay verbatim so save/load is bit-exact.
    if (std::abs(norm - 1.0) > 1e-14) {
      for (double& x : vec) x /= norm;
    }
    embeddings_[it->second] = std::move(vec);
  }
  for (NodeId i = 0; i < papers_.size(); ++i) {
    if (papers_[i].role == Role::kSubmission && embeddings_[i].empty()) {
      throw Error(ErrorCode::kMissingEmbedding,
                  "submission '" + papers_[i].id + "' has no embedding");
    }
  }
  for (const auto& [id, score] : labels_) {
    if (!index_.contains(id)) {
      throw Error(ErrorCode::kUnknownPaper, "label for unknown paper '" + id + "'");
    }
    if (!std::isfinite(score)) {
      throw Error(ErrorCode::kParseError, "label for '" + id + "' is not finite");
    }
  }
}

std::optional<NodeId> Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId Corpus::index_of(std::string_view id) const {
  if (auto node = find(id)) return *node;
  throw Error(ErrorCode::kUnknownPaper, "unknown paper '" + std::string(id) + "'");
}

std::optional<double> Corpus::label(std::string_view id) const {
  auto it = labels_.find(std::string(id));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

bool Corpus::submissions_labeled() const {
  if (num_submissions_ == 0) return false;
  return std::all_of(papers_.begin(), papers_.end(), [&](const Paper& p) {
    return p.role != Role::kSubmission || labels_.contains(p.id);
  });
}

std::vector<NodeId> Corpus::submission_nodes() const {
  std::vector<NodeId> out;
  out.reserve(num_submissions_);
  for (NodeId i = 0; i < papers_.size(); ++i) {
    if (papers_[i].role == Role::kSubmission) out.push_back(i);
  }
  return out;
}

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line) + ": ";
}

template <typename T>
T require_field(const Json& record, const char* key, const std::filesystem::path& path,
                std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw Error(ErrorCode::kParseError, where(path, line) + "missing key '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kParseError, where(path, line) + "bad value for '" + key + "'");
  }
}

}  // namespace

Corpus load_corpus(const CorpusPaths& paths, std::size_t truncation_limit) {
  std::vector<Paper> papers;
  std::unordered_set<std::string> seen;
  util::read_jsonl(paths.papers, [&](const Json& r, std::size_t line) {
    Paper p;
    p.id = require_field<std::string>(r, "id", paths.papers, line);
    try {
      p.role = parse_role(require_field<std::string>(r, "role", paths.papers, line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, where(paths.papers, line) + e.what());
    }
    p.venue = r.value("venue", std::string{});
    p.year = r.value("year", 0);
    p.text = truncate_utf8(require_field<std::string>(r, "text", paths.papers, line),
                           truncation_limit);
    if (p.text.empty()) {
      throw Error(ErrorCode::kParseError, where(paths.papers, line) + "empty text");
    }
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  where(paths.papers, line) + "duplicate paper id '" + p.id + "'");
    }
    papers.push_back(std::move(p));
  });

  std::unordered_map<std::string, std::vector<double>> embeddings;
  util::read_jsonl(paths.embeddings, [&](const Json& r, std::size_t line) {
    auto id = require_field<std::string>(r, "paper_id", paths.embeddings, line);
    auto vec = require_field<std::vector<double>>(r, "vector", paths.embeddings, line);
    if (!embeddings.emplace(id, std::move(vec)).second) {
      throw Error(ErrorCode::kDuplicateId,
                  where(paths.embeddings, line) + "duplicate embedding for '" + id + "'");
    }
  });

  std::map<std::string, double> labels;
  if (paths.labels) {
    util::read_jsonl(*paths.labels, [&](const Json& r, std::size_t line) {
      auto id = require_field<std::string>(r, "paper_id", *paths.labels, line);
      auto score = require_field<double>(r, "score", *paths.labels, line);
      if (!labels.emplace(id, score).second) {
        throw Error(ErrorCode::kDuplicateId,
                    where(*paths.labels, line) + "duplicate label for '" + id + "'");
      }
    });
  }
  return Corpus(std::move(papers), std::move(embeddings), std::move(labels));
}

void save_corpus(const Corpus& corpus, const CorpusPaths& paths) {
  std::vector<Json> paper_records;
  std::vector<Json> embedding_records;
  for (NodeId i = 0; i < corpus.size(); ++i) {
    const Paper& p = corpus.paper(i);
    paper_records.push_back(Json{{"id", p.id},
                                 {"role", role_name(p.role)},
                                 {"venue", p.venue},
                                 {"year", p.year},
                                 {"text", p.text}});
    if (corpus.has_embedding(i)) {
      auto e = corpus.embedding(i);
      embedding_records.push_back(
          Json{{"paper_id", p.id}, {"vector", std::vector<double>(e.begin(), e.end())}});
    }
  }
  util::write_jsonl(paths.papers, paper_records);
  util::write_jsonl(paths.embeddings, embedding_records);
  if (paths.labels && corpus.has_labels()) {
    std::vector<Json> label_records;
    for (const auto& [id, score] : corpus.labels()) {
      label_records.push_back(Json{{"paper_id", id}, {"score", score}});
    }
    util::write_jsonl(*paths.labels, label_records);
  }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine_similarity: dimensions " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
  std::vector<Paper> papers;
  std::unordered_map<std::string, std::vector<double>> embeddings;
  std::map<std::string, double> labels;
  const std::size_t total = spec.submissions + spec.historical;
  for (std::size_t i = 0; i < total; ++i) {
    const bool submission = i < spec.submissions;
    char id[32];
    std::snprintf(id, sizeof(id), "%s%04zu", submission ? "s" : "h",
                  submission ? i : i - spec.submissions);
    Paper p;
    p.id = id;
    p.role = submission ? Role::kSubmission : Role::kHistorical;
    p.venue = submission ? "SYN-2025" : "SYN-HIST";
    p.year = submission ? 2025 : 2023 + static_cast<int>(i % 2);
    p.text = "Synthetic paper " + p.id + ".";
    std::vector<double> vec(spec.dimension);
    for (std::size_t d = 0; d < spec.dimension; ++d) {
      vec[d] = util::standard_normal(
          util::stable_hash(spec.seed, {"embedding", p.id, std::to_string(d)}));
    }
    const double u = util::unit_interval(util::stable_hash(spec.seed, {"label", p.id}));
    labels.emplace(p.id, spec.score_min + (spec.score_max - spec.score_min) * u);
    embeddings.emplace(p.id, std::move(vec));
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers), std::move(embeddings), std::move(labels));
}

}  // namespace graphreview
