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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace graphreview {

// Dense index of a paper inside a Corpus; stable for the corpus' lifetime.
using NodeId = std::size_t;

enum class Role { kSubmission, kHistorical };

std::string_view role_name(Role role);
Role parse_role(std::string_view name);

struct Paper {
  std::string id;
  Role role = Role::kSubmission;
  std::string venue;
  int year = 0;
  std::string text;
};

inline constexpr std::size_t kDefaultTruncationLimit = 60000;

// Truncates to at most `max_chars` UTF-8 code points without splitting one.
std::string truncate_utf8(std::string_view text, std::size_t max_chars);

// Immutable after construction. Embeddings are unit-normalized on insertion.
class Corpus {
 public:
  Corpus() = default;

  // Validates and normalizes. Throws DuplicateId, DimensionMismatch,
  // MissingEmbedding, UnknownPaper or ParseError (empty text, zero vector).
  Corpus(std::vector<Paper> papers,
         std::unordered_map<std::string, std::vector<double>> embeddings,
         std::map<std::string, double> labels = {});

  std::size_t size() const { return papers_.size(); }              // N
  std::size_t num_submissions() const { return num_submissions_; }  // n
  std::size_t dimension() const { return dimension_; }

  const std::vector<Paper>& papers() const { return papers_; }
  const Paper& paper(NodeId node) const { return papers_.at(node); }

  std::optional<NodeId> find(std::string_view id) const;
  NodeId index_of(std::string_view id) const;  // throws UnknownPaper

  bool has_embedding(NodeId node) const { return !embeddings_.at(node).empty(); }
  std::span<const double> embedding(NodeId node) const { return embeddings_.at(node); }

  const std::map<std::string, double>& labels() const { return labels_; }
  std::optional<double> label(std::string_view id) const;
  bool has_labels() const { return !labels_.empty(); }
  // True when every submission carries a label.
  bool submissions_labeled() const;

  std::vector<NodeId> submission_nodes() const;

 private:
  std::vector<Paper> papers_;
  std::vector<std::vector<double>> embeddings_;  // empty vector = no embedding
  std::map<std::string, double> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::size_t num_submissions_ = 0;
  std::size_t dimension_ = 0;
};

struct CorpusPaths {
  std::filesystem::path papers;
  std::filesystem::path embeddings;
  std::optional<std::filesystem::path> labels;
};

Corpus load_corpus(const CorpusPaths& paths,
                   std::size_t truncation_limit = kDefaultTruncationLimit);

// Writes the three line-delimited files; `paths.labels` is written only when
// set and the corpus has labels.
void save_corpus(const Corpus& corpus, const CorpusPaths& paths);

// Cosine of the angle between a and b; symmetric and clamped to [-1, 1].
// Zero vectors have similarity 0. Throws DimensionMismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Random unit embeddings, labels uniform in [score_min, score_max] for every
// paper. Used by the synthetic recovery experiments and the CLI generator.
struct SyntheticSpec {
  std::size_t submissions = 50;
  std::size_t historical = 50;
  std::size_t dimension = 16;
  double score_min = 1.0;
  double score_max = 10.0;
  std::uint64_t seed = 0;
};

Corpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace graphreview
