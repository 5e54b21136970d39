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
#include "graphreview/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "graphreview/error.hpp"
#include "graphreview/util.hpp"

namespace graphreview {

using util::Json;

Prior build_prior(std::span<const double> scores, double epsilon_floor) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "prior needs at least one score");
  if (!(epsilon_floor > 0.0)) throw Error(ErrorCode::kInvalidParam, "prior floor must be > 0");
  Prior prior;
  prior.epsilon_floor = epsilon_floor;
  prior.z.resize(scores.size());
  double total = 0.0;
  for (std::size_t u = 0; u < scores.size(); ++u) {
    const double e = scores[u];
    prior.z[u] = std::isnan(e) ? epsilon_floor : std::max(e, epsilon_floor);
    total += prior.z[u];
  }
  for (double& z : prior.z) z /= total;
  return prior;
}

void PreferenceDigraph::add_preference(NodeId winner, NodeId loser) {
  if (winner >= succ_.size() || loser >= succ_.size() || winner == loser) {
    throw Error(ErrorCode::kInvalidParam, "preference endpoints out of range or equal");
  }
  auto& out = succ_[loser];
  auto it = std::lower_bound(out.begin(), out.end(), winner);
  if (it != out.end() && *it == winner) return;
  out.insert(it, winner);
  ++edges_;
}

bool PreferenceDigraph::has_edge(NodeId from, NodeId to) const {
  const auto& out = succ_.at(from);
  return std::binary_search(out.begin(), out.end(), to);
}

TransitionMatrix TransitionMatrix::build(const PreferenceDigraph& digraph, const Prior& prior) {
  if (prior.z.size() != digraph.num_nodes()) {
    throw Error(ErrorCode::kSizeMismatch, "prior length " + std::to_string(prior.z.size()) +
                                              " vs " + std::to_string(digraph.num_nodes()) +
                                              " nodes");
  }
  TransitionMatrix m;
  m.z_ = prior.z;
  m.columns_.resize(digraph.num_nodes());
  for (NodeId v = 0; v < digraph.num_nodes(); ++v) {
    const auto& out = digraph.successors(v);
    if (out.empty()) {
      m.columns_[v].dangling = true;
      continue;
    }
    const double w = 1.0 / static_cast<double>(out.size());
    for (NodeId u : out) m.columns_[v].entries.emplace_back(u, w);
  }
  return m;
}

TransitionMatrix TransitionMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  TransitionMatrix m;
  const std::size_t n = rows.size();
  m.columns_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) throw Error(ErrorCode::kSizeMismatch, "matrix is not square");
    for (std::size_t c = 0; c < n; ++c) {
      if (rows[r][c] != 0.0) m.columns_[c].entries.emplace_back(r, rows[r][c]);
    }
  }
  return m;
}

std::vector<double> TransitionMatrix::apply(std::span<const double> x) const {
  if (x.size() != columns_.size()) throw Error(ErrorCode::kSizeMismatch, "vector length mismatch");
  std::vector<double> y(x.size(), 0.0);
  double dangling_mass = 0.0;
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    if (columns_[v].dangling) {
      dangling_mass += x[v];
      continue;
    }
    for (const auto& [u, w] : columns_[v].entries) y[u] += w * x[v];
  }
  if (dangling_mass != 0.0) {
    for (std::size_t u = 0; u < y.size(); ++u) y[u] += dangling_mass * z_[u];
  }
  return y;
}

std::vector<std::vector<double>> TransitionMatrix::dense() const {
  const std::size_t n = columns_.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) {
    if (columns_[v].dangling) {
      for (std::size_t u = 0; u < n; ++u) rows[u][v] = z_[u];
    } else {
      for (const auto& [u, w] : columns_[v].entries) rows[u][v] += w;
    }
  }
  return rows;
}

double TransitionMatrix::column_sum(NodeId v) const {
  const Column& col = columns_.at(v);
  if (col.dangling) return std::accumulate(z_.begin(), z_.end(), 0.0);
  double s = 0.0;
  for (const auto& [u, w] : col.entries) {
    if (w < 0.0) return -1.0;
    s += w;
  }
  return s;
}

namespace {

std::vector<double> ppr_map(const TransitionMatrix& m, const Prior& prior, double lambda,
                            std::span<const double> x) {
  std::vector<double> y = m.apply(x);
  for (std::size_t u = 0; u < y.size(); ++u) y[u] = lambda * y[u] + (1.0 - lambda) * prior.z[u];
  return y;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

PprResult ppr(const TransitionMatrix& m, const Prior& prior, double lambda, double tol,
              int max_iters) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::kInvalidParam, "lambda must lie in (0, 1)");
  }
  if (!(tol > 0.0) || max_iters < 1) {
    throw Error(ErrorCode::kInvalidParam, "tol must be > 0 and max_iters >= 1");
  }
  if (prior.z.size() != m.size()) {
    throw Error(ErrorCode::kSizeMismatch, "prior length differs from matrix size");
  }
  for (NodeId v = 0; v < m.size(); ++v) {
    const double s = m.column_sum(v);
    if (!(std::abs(s - 1.0) <= 1e-9)) {
      throw Error(ErrorCode::kNotStochastic,
                  "column " + std::to_string(v) + " sums to " + std::to_string(s));
    }
  }

  PprResult result;
  result.pi = prior.z;
  result.residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<double> next = ppr_map(m, prior, lambda, result.pi);
    result.residual = l1_distance(next, result.pi);
    result.pi = std::move(next);
    result.iterations_used = it;
    if (result.residual <= tol) break;
  }
  const double total = std::accumulate(result.pi.begin(), result.pi.end(), 0.0);
  for (double& p : result.pi) p /= total;
  return result;
}

double fixed_point_residual(const TransitionMatrix& m, const Prior& prior, double lambda,
                            std::span<const double> pi) {
  return l1_distance(ppr_map(m, prior, lambda, pi), pi);
}

std::string_view decision_name(Decision d) { return d == Decision::kAccept ? "accept" : "reject"; }

Decision parse_decision(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "accept" || lower == "1" || lower == "true") return Decision::kAccept;
  if (lower == "reject" || lower == "0" || lower == "false") return Decision::kReject;
  throw Error(ErrorCode::kParseError, "unknown decision '" + std::string(name) + "'");
}

std::vector<std::string> RankingResult::order() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const RankedPaper& e : entries) ids.push_back(e.id);
  return ids;
}

std::size_t RankingResult::rank_of(std::string_view id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].id == id) return i + 1;
  }
  throw Error(ErrorCode::kUnknownPaper, "paper '" + std::string(id) + "' is not ranked");
}

const RankedPaper& RankingResult::at(std::string_view id) const {
  return entries[rank_of(id) - 1];
}

std::size_t accept_count_for(std::size_t n, double gamma) {
  return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n) + 1e-9));
}

RankingResult rank_and_decide(const std::vector<std::string>& ids, std::span<const double> pi,
                              std::span<const double> prior_scores, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::kInvalidParam, "gamma must lie in (0, 1)");
  if (pi.size() != ids.size() || (!prior_scores.empty() && prior_scores.size() != ids.size())) {
    throw Error(ErrorCode::kSizeMismatch, "ids, pi and priors differ in length");
  }
  RankingResult result;
  result.entries.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    result.entries[i].id = ids[i];
    result.entries[i].pi = pi[i];
    result.entries[i].prior = prior_scores.empty() ? 0.0 : prior_scores[i];
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const RankedPaper& a, const RankedPaper& b) {
              if (a.pi != b.pi) return a.pi > b.pi;
              if (a.prior != b.prior) return a.prior > b.prior;
              return a.id < b.id;
            });
  result.accept_count = accept_count_for(ids.size(), gamma);
  for (std::size_t i = 0; i < result.accept_count; ++i) result.entries[i].decision = Decision::kAccept;
  return result;
}

RankingResult rank_and_decide(const PprResult& result, const Corpus& corpus, double gamma,
                              std::span<const double> prior_scores) {
  if (result.pi.size() != corpus.size() ||
      (!prior_scores.empty() && prior_scores.size() != corpus.size())) {
    throw Error(ErrorCode::kSizeMismatch, "score vector length differs from corpus size");
  }
  std::vector<std::string> ids;
  std::vector<double> pi;
  std::vector<double> prior;
  for (NodeId v : corpus.submission_nodes()) {
    ids.push_back(corpus.paper(v).id);
    pi.push_back(result.pi[v]);
    if (!prior_scores.empty()) prior.push_back(std::isnan(prior_scores[v]) ? -1e300 : prior_scores[v]);
  }
  return rank_and_decide(ids, pi, prior, gamma);
}

namespace {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_ranking_csv(const std::filesystem::path& path, const RankingResult& ranking) {
  std::ostringstream out;
  out << "rank,paper_id,pi,decision\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const RankedPaper& e = ranking.entries[i];
    out << (i + 1) << ',' << e.id << ',' << format_real(e.pi) << ',' << decision_name(e.decision)
        << '\n';
  }
  util::write_text_file(path, out.str());
}

void write_ranking_jsonl(const std::filesystem::path& path, const RankingResult& ranking) {
  std::vector<Json> records;
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const RankedPaper& e = ranking.entries[i];
    records.push_back(Json{{"rank", i + 1},
                           {"paper_id", e.id},
                           {"pi", e.pi},
                           {"prior", e.prior},
                           {"decision", decision_name(e.decision)}});
  }
  util::write_jsonl(path, records);
}

RankingResult read_ranking_csv(const std::filesystem::path& path) {
  std::istringstream in(util::read_text_file(path));
  std::string line;
  RankingResult result;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParseError,
                path.filename().string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("rank,", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) fail("expected 4 columns");
    RankedPaper e;
    e.id = cells[1];
    try {
      e.pi = std::stod(cells[2]);
    } catch (const std::exception&) {
      fail("bad pi value '" + cells[2] + "'");
    }
    e.decision = parse_decision(cells[3]);
    if (e.decision == Decision::kAccept) ++result.accept_count;
    result.entries.push_back(std::move(e));
  }
  return result;
}

}  // namespace graphreview
