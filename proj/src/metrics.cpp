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
#include "graphreview/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphreview/aggregate.hpp"
#include "graphreview/error.hpp"

namespace graphreview::metrics {

using util::Json;

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kSizeMismatch, std::string(what) + ": inputs differ in length (" +
                                              std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw Error(ErrorCode::kEmptyInput, std::string(what) + ": empty input");
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_aligned(predicted.size(), truth.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += (predicted[i] != 0) == (truth[i] != 0);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double macro_f1(std::span<const int> predicted, std::span<const int> truth) {
  check_aligned(predicted.size(), truth.size(), "macro_f1");
  double sum = 0.0;
  for (int cls = 0; cls <= 1; ++cls) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = (predicted[i] != 0) == (cls == 1);
      const bool t = (truth[i] != 0) == (cls == 1);
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return sum / 2.0;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_aligned(scores.size(), labels.size(), "auc");
  std::size_t pos = 0;
  for (int l : labels) pos += l != 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kDegenerateLabels, "auc needs both positive and negative labels");
  }
  // Rank-sum form of the pairwise count; average ranks give ties 1/2.
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0) rank_sum += ranks[i];
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

void check_correlation_input(std::span<const double> a, std::span<const double> b,
                             const char* what) {
  check_aligned(a.size(), b.size(), what);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) {
      throw Error(ErrorCode::kDegenerateInput, std::string(what) + ": NaN input");
    }
  }
  if (a.size() < 2) throw Error(ErrorCode::kDegenerateInput, std::string(what) + ": need N >= 2");
  if (constant(a) || constant(b)) {
    throw Error(ErrorCode::kDegenerateInput, std::string(what) + ": constant input");
  }
}

}  // namespace

double spearman(std::span<const double> predicted, std::span<const double> truth) {
  check_correlation_input(predicted, truth, "spearman");
  const std::vector<double> rp = average_ranks(predicted);
  const std::vector<double> rt = average_ranks(truth);
  double d2 = 0.0;
  for (std::size_t i = 0; i < rp.size(); ++i) d2 += (rp[i] - rt[i]) * (rp[i] - rt[i]);
  const double n = static_cast<double>(rp.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double kendall_tau_b(std::span<const double> predicted, std::span<const double> truth) {
  check_correlation_input(predicted, truth, "kendall_tau_b");
  const std::size_t n = predicted.size();
  double nc = 0, nd = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = predicted[i] - predicted[j];
      const double dy = truth[i] - truth[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++nx;
      } else if (dy == 0.0) {
        ++ny;
      } else if ((dx > 0) == (dy > 0)) {
        ++nc;
      } else {
        ++nd;
      }
    }
  }
  const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((n0 - nx) * (n0 - ny));
  if (!(denom > 0.0)) throw Error(ErrorCode::kDegenerateInput, "kendall_tau_b: zero denominator");
  return (nc - nd) / denom;
}

double ndcg_at_10(const std::vector<std::string>& predicted_order,
                  const std::map<std::string, double>& true_scores) {
  if (predicted_order.empty()) throw Error(ErrorCode::kEmptyInput, "ndcg_at_10: empty ranking");
  std::vector<double> rel;
  rel.reserve(predicted_order.size());
  for (const std::string& id : predicted_order) {
    auto it = true_scores.find(id);
    if (it == true_scores.end()) {
      throw Error(ErrorCode::kMissingLabel, "ndcg_at_10: no true score for '" + id + "'");
    }
    rel.push_back(std::clamp(it->second, 0.0, 10.0));
  }
  const std::size_t cutoff = std::min<std::size_t>(10, rel.size());
  auto dcg = [&](const std::vector<double>& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < cutoff; ++i) {
      s += (std::exp2(r[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    }
    return s;
  };
  std::vector<double> ideal = rel;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal);
  if (idcg == 0.0) return 1.0;
  return dcg(rel) / idcg;
}

namespace {

inline constexpr std::size_t kExactMannWhitneyLimit = 20;

// Two-sided exact p for the rank sum of group a, over all C(N, n_a) ways of
// drawing n_a of the pooled (doubled) midranks.
double exact_mann_whitney_p(const std::vector<long>& doubled_ranks, std::size_t na,
                            long observed_doubled_sum) {
  const std::size_t n = doubled_ranks.size();
  long max_sum = 0;
  for (long r : doubled_ranks) max_sum += r;
  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const long r = doubled_ranks[i];
    for (std::size_t k = std::min(na, i + 1); k >= 1; --k) {
      for (long s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
    }
  }
  double total = 0.0;
  for (double w : ways[na]) total += w;
  // Mean of the doubled rank sum is na (N + 1).
  const long mean2 = static_cast<long>(na) * static_cast<long>(n + 1);
  const long dist_obs = std::labs(observed_doubled_sum - mean2);
  double tail = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    if (ways[na][s] != 0.0 && std::labs(s - mean2) >= dist_obs) tail += ways[na][s];
  }
  return std::min(1.0, tail / total);
}

}  // namespace

MannWhitney mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw Error(ErrorCode::kEmptyInput, "mann_whitney_u: both groups must be non-empty");
  }
  std::vector<double> pooled(group_a.begin(), group_a.end());
  pooled.insert(pooled.end(), group_b.begin(), group_b.end());
  const std::vector<double> ranks = average_ranks(pooled);
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < group_a.size(); ++i) rank_sum_a += ranks[i];

  MannWhitney result;
  result.u = rank_sum_a - na * (na + 1.0) / 2.0;

  if (group_a.size() < kExactMannWhitneyLimit && group_b.size() < kExactMannWhitneyLimit) {
    std::vector<long> doubled(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) doubled[i] = std::lround(2.0 * ranks[i]);
    result.p = exact_mann_whitney_p(doubled, group_a.size(), std::lround(2.0 * rank_sum_a));
    return result;
  }

  const double n = na + nb;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    result.p = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(result.u - mean) - 0.5) / std::sqrt(var);
  result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

Json MetricReport::to_json() const {
  return Json{{"accuracy", accuracy},           {"macro_f1", macro_f1},
              {"auc", auc},                     {"spearman", spearman},
              {"kendall_tau_b", kendall_tau_b}, {"ndcg_at_10", ndcg_at_10},
              {"average", average}};
}

namespace {

void check_input(const EvalInput& in) {
  const std::size_t n = in.ids.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "evaluation input is empty");
  if (in.predicted_score.size() != n || in.predicted_decision.size() != n ||
      in.true_score.size() != n || in.true_decision.size() != n) {
    throw Error(ErrorCode::kSizeMismatch, "evaluation input columns differ in length");
  }
}

std::vector<std::string> predicted_order(const EvalInput& in) {
  std::vector<std::size_t> idx(in.ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (in.predicted_score[a] != in.predicted_score[b]) {
      return in.predicted_score[a] > in.predicted_score[b];
    }
    return in.ids[a] < in.ids[b];
  });
  std::vector<std::string> order;
  for (std::size_t i : idx) order.push_back(in.ids[i]);
  return order;
}

double ndcg_of(const EvalInput& in) {
  std::map<std::string, double> truth;
  for (std::size_t i = 0; i < in.ids.size(); ++i) truth[in.ids[i]] = in.true_score[i];
  return ndcg_at_10(predicted_order(in), truth);
}

}  // namespace

MetricReport evaluate(const EvalInput& in) {
  check_input(in);
  MetricReport r;
  r.accuracy = accuracy(in.predicted_decision, in.true_decision);
  r.macro_f1 = macro_f1(in.predicted_decision, in.true_decision);
  r.auc = auc(in.predicted_score, in.true_decision);
  r.spearman = spearman(in.predicted_score, in.true_score);
  r.kendall_tau_b = kendall_tau_b(in.predicted_score, in.true_score);
  r.ndcg_at_10 = ndcg_of(in);
  r.average = (r.accuracy + r.macro_f1 + r.auc + r.spearman + r.kendall_tau_b + r.ndcg_at_10) / 6.0;
  return r;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"accuracy", "macro_f1",      "auc",
                                                 "spearman", "kendall_tau_b", "ndcg_at_10",
                                                 "average"};
  return names;
}

double metric_by_name(std::string_view name, const EvalInput& in) {
  check_input(in);
  if (name == "accuracy") return accuracy(in.predicted_decision, in.true_decision);
  if (name == "macro_f1") return macro_f1(in.predicted_decision, in.true_decision);
  if (name == "auc") return auc(in.predicted_score, in.true_decision);
  if (name == "spearman") return spearman(in.predicted_score, in.true_score);
  if (name == "kendall_tau_b") return kendall_tau_b(in.predicted_score, in.true_score);
  if (name == "ndcg_at_10") return ndcg_of(in);
  if (name == "average") return evaluate(in).average;
  throw Error(ErrorCode::kUnknownMetric, "unknown metric '" + std::string(name) + "'");
}

std::vector<int> top_fraction_decisions(const std::vector<std::string>& ids,
                                        std::span<const double> scores, double gamma) {
  if (ids.size() != scores.size()) throw Error(ErrorCode::kSizeMismatch, "ids and scores differ");
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : ids[a] < ids[b];
  });
  std::vector<int> decisions(ids.size(), 0);
  const std::size_t k = accept_count_for(ids.size(), gamma);
  for (std::size_t i = 0; i < k; ++i) decisions[idx[i]] = 1;
  return decisions;
}

EvalInput load_eval_input(const std::filesystem::path& ranking_csv,
                          const std::filesystem::path& truth_jsonl, double gamma) {
  const RankingResult ranking = read_ranking_csv(ranking_csv);
  std::map<std::string, double> scores;
  std::map<std::string, int> decisions;
  util::read_jsonl(truth_jsonl, [&](const Json& r, std::size_t line) {
    if (!r.contains("paper_id") || !r.contains("score") || !r["score"].is_number()) {
      throw Error(ErrorCode::kParseError, truth_jsonl.filename().string() + ":" +
                                              std::to_string(line) +
                                              ": expected paper_id and numeric score");
    }
    const std::string id = r["paper_id"].get<std::string>();
    scores[id] = r["score"].get<double>();
    if (r.contains("decision")) {
      const auto& d = r["decision"];
      decisions[id] = d.is_string() ? (parse_decision(d.get<std::string>()) == Decision::kAccept)
                                    : (d.get<double>() != 0.0);
    }
  });
  EvalInput in;
  for (const RankedPaper& e : ranking.entries) {
    auto it = scores.find(e.id);
    if (it == scores.end()) throw Error(ErrorCode::kMissingLabel, "no true score for '" + e.id + "'");
    in.ids.push_back(e.id);
    in.predicted_score.push_back(e.pi);
    in.predicted_decision.push_back(e.decision == Decision::kAccept ? 1 : 0);
    in.true_score.push_back(it->second);
  }
  if (!decisions.empty()) {
    for (const std::string& id : in.ids) {
      auto it = decisions.find(id);
      if (it == decisions.end()) {
        throw Error(ErrorCode::kMissingLabel, "no true decision for '" + id + "'");
      }
      in.true_decision.push_back(it->second);
    }
  } else {
    in.true_decision = top_fraction_decisions(in.ids, in.true_score, gamma);
  }
  return in;
}

std::map<std::string, MetricReport> evaluate_directory(const std::filesystem::path& dir,
                                                       double gamma) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::map<std::string, MetricReport> reports;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    const std::string name = entry.path().stem().string();
    const auto truth = dir / (name + ".truth.jsonl");
    if (!std::filesystem::exists(truth)) continue;
    reports[name] = evaluate(load_eval_input(entry.path(), truth, gamma));
  }
  return reports;
}

}  // namespace graphreview::metrics
