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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/rank_oracles.hpp"
#include "test_support.hpp"

using namespace graphreview;
using namespace graphreview::metrics;

namespace {

using Ints = std::vector<int>;
using Reals = std::vector<double>;

Reals random_with_ties(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> level(0, static_cast<int>(n / 2) + 1);
  Reals v(n);
  for (auto& x : v) x = level(rng) * 0.5;
  return v;
}

bool constant(const Reals& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy(Ints{1, 0, 1, 1}, Ints{1, 0, 0, 1}), 0.75);
  EXPECT_DOUBLE_EQ(accuracy(Ints{1, 0, 1}, Ints{1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(Ints{1, 0, 1}, Ints{0, 1, 0}), 0.0);
  EXPECT_ERROR_CODE(accuracy(Ints{}, Ints{}), ErrorCode::kEmptyInput);
  EXPECT_ERROR_CODE(accuracy(Ints{1}, Ints{1, 0}), ErrorCode::kSizeMismatch);
}

TEST(MacroF1, Examples) {
  EXPECT_DOUBLE_EQ(macro_f1(Ints{1, 0, 1, 0}, Ints{1, 0, 1, 0}), 1.0);
  EXPECT_NEAR(macro_f1(Ints{1, 1, 1, 1}, Ints{1, 1, 0, 0}), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(macro_f1(Ints{0, 1, 0, 1}, Ints{1, 0, 1, 0}), 0.0);
  EXPECT_ERROR_CODE(macro_f1(Ints{}, Ints{}), ErrorCode::kEmptyInput);
}

TEST(MacroF1, OneOnlyForExactAgreementWithBothClasses) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    Ints p(6), t(6);
    for (auto& x : p) x = coin(rng);
    for (auto& x : t) x = coin(rng);
    const bool both = std::count(t.begin(), t.end(), 1) > 0 && std::count(t.begin(), t.end(), 0) > 0;
    EXPECT_EQ(macro_f1(p, t) == 1.0, p == t && both);
  }
}

TEST(Auc, Examples) {
  EXPECT_DOUBLE_EQ(auc(Reals{2, 2, 2, 2}, Ints{1, 0, 1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(auc(Reals{4, 3, 2, 1}, Ints{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auc(Reals{3, 2, 1}, Ints{1, 0, 1}), 0.5);
  EXPECT_ERROR_CODE(auc(Reals{1, 2}, Ints{1, 1}), ErrorCode::kDegenerateLabels);
}

TEST(Auc, MatchesPairOracleAndComplement) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 11;
    Reals s = trial % 2 ? random_with_ties(n, rng) : Reals(n);
    if (trial % 2 == 0)
      for (auto& x : s) x = g(rng);
    Ints y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 2);
    std::shuffle(y.begin(), y.end(), rng);
    EXPECT_NEAR(auc(s, y), oracle::auc(s, y), 1e-12);
    if (trial % 2 == 0) {
      Reals neg(s);
      for (auto& x : neg) x = -x;
      EXPECT_NEAR(auc(s, y) + auc(neg, y), 1.0, 1e-12);
    }
  }
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(Reals{1, 2, 3, 4}, Reals{10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(Reals{1, 2, 3, 4}, Reals{4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman(Reals{1, 2, 3, 4}, Reals{1, 3, 2, 4}), 0.8, 1e-15);
  EXPECT_ERROR_CODE(spearman(Reals{1, 1, 1}, Reals{1, 2, 3}), ErrorCode::kDegenerateInput);
  EXPECT_ERROR_CODE(spearman(Reals{1}, Reals{1}), ErrorCode::kDegenerateInput);
}

TEST(Kendall, Examples) {
  EXPECT_DOUBLE_EQ(kendall_tau_b(Reals{1, 2, 3}, Reals{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(Reals{1, 2, 3}, Reals{3, 2, 1}), -1.0);
  EXPECT_NEAR(kendall_tau_b(Reals{1, 2, 2, 3}, Reals{1, 2, 3, 4}), 5.0 / std::sqrt(30.0), 1e-15);
  EXPECT_NEAR(oracle::kendall({1, 2, 2, 3}, {1, 2, 3, 4}), 5.0 / std::sqrt(30.0), 1e-15);
  EXPECT_ERROR_CODE(kendall_tau_b(Reals{2, 2}, Reals{1, 2}), ErrorCode::kDegenerateInput);
}

TEST(RankCorrelation, MatchesOraclesOnRandomVectorsWithTies) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 11;
    const Reals a = random_with_ties(n, rng);
    const Reals b = random_with_ties(n, rng);
    if (constant(a) || constant(b)) continue;
    EXPECT_NEAR(spearman(a, b), oracle::spearman(a, b), 1e-12);
    const double k = oracle::kendall(a, b);
    if (std::isfinite(k)) {
      EXPECT_NEAR(kendall_tau_b(a, b), k, 1e-12);
    }
    ++checked;
  }
  EXPECT_GT(checked, 400);
}

TEST(RankCorrelation, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 10;
    Reals a(n), b(n);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    Reals fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
      fa[i] = std::exp(a[i]);
      fb[i] = b[i] * b[i] * b[i] + 2.0;
    }
    EXPECT_NEAR(spearman(a, b), spearman(fa, fb), 1e-12);
    EXPECT_NEAR(kendall_tau_b(a, b), kendall_tau_b(fa, fb), 1e-12);
    Ints y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 2);
    EXPECT_NEAR(auc(a, y), auc(fa, y), 1e-12);
  }
}

TEST(AverageRanks, TiesShareMean) {
  EXPECT_EQ(average_ranks(Reals{10, 20, 20, 5}), (Reals{2, 3.5, 3.5, 1}));
}

TEST(Ndcg, Examples) {
  const std::map<std::string, double> truth{{"a", 3}, {"b", 1}, {"c", 2}};
  EXPECT_DOUBLE_EQ(ndcg_at_10({"a", "c", "b"}, truth), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_10({"b", "a", "c"}, {{"a", 4}, {"b", 4}, {"c", 4}}), 1.0);

  const double log3 = std::log2(3.0);
  const double dcg = 1.0 / 1.0 + 7.0 / log3;
  const double idcg = 7.0 / 1.0 + 1.0 / log3;
  EXPECT_NEAR(ndcg_at_10({"b", "a"}, {{"a", 3}, {"b", 1}}), dcg / idcg, 1e-15);

  EXPECT_ERROR_CODE(ndcg_at_10({}, truth), ErrorCode::kEmptyInput);
  EXPECT_ERROR_CODE(ndcg_at_10({"zzz"}, truth), ErrorCode::kMissingLabel);
}

TEST(Ndcg, IdealOrderingIsExactlyOne) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 25;
    std::map<std::string, double> truth;
    std::vector<std::pair<double, std::string>> sorted;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "p" + std::to_string(i);
      truth[id] = u(rng);
      sorted.emplace_back(-truth[id], id);
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> order;
    for (auto& [s, id] : sorted) order.push_back(id);
    EXPECT_EQ(ndcg_at_10(order, truth), 1.0);
  }
}

TEST(Ndcg, OnlyTopTenCount) {
  std::map<std::string, double> truth;
  std::vector<std::string> order;
  for (int i = 0; i < 12; ++i) {
    order.push_back("p" + std::to_string(i));
    truth[order.back()] = 12 - i;
  }
  std::swap(order[10], order[11]);
  EXPECT_DOUBLE_EQ(ndcg_at_10(order, truth), 1.0);
}

TEST(MannWhitney, Examples) {
  const auto same = mann_whitney_u(Reals{5, 5, 5}, Reals{5, 5});
  EXPECT_DOUBLE_EQ(same.p, 1.0);
  EXPECT_DOUBLE_EQ(mann_whitney_u(Reals{1, 2, 3}, Reals{10, 11, 12}).u, 0.0);
  const auto small = mann_whitney_u(Reals{1, 2}, Reals{3, 4});
  EXPECT_DOUBLE_EQ(small.u, 0.0);
  EXPECT_NEAR(small.p, 2.0 / 6.0, 1e-15);
  EXPECT_ERROR_CODE(mann_whitney_u(Reals{}, Reals{1}), ErrorCode::kEmptyInput);
}

TEST(MannWhitney, ExactMatchesEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t na = 1 + trial % 6;
    const std::size_t nb = 1 + (trial / 6) % 7;
    Reals a = random_with_ties(na, rng);
    Reals b = random_with_ties(nb, rng);
    const auto got = mann_whitney_u(a, b);
    const auto [u, p] = oracle::mann_whitney_exact(a, b);
    EXPECT_DOUBLE_EQ(got.u, u);
    EXPECT_NEAR(got.p, p, 1e-9) << "na=" << na << " nb=" << nb;
  }
}

TEST(MannWhitney, NormalApproximationForLargeGroups) {
  Reals a, b;
  for (int i = 0; i < 25; ++i) a.push_back(i * 0.5);
  for (int i = 0; i < 22; ++i) b.push_back(i * 0.5 + 3);
  const auto r = mann_whitney_u(a, b);
  // scipy.stats.mannwhitneyu(method="asymptotic", use_continuity=True)
  EXPECT_DOUBLE_EQ(r.u, 180.5);
  EXPECT_NEAR(r.p, 0.044942909073155804, 1e-12);
}

TEST(Evaluate, ReportAverageAndNames) {
  EvalInput in;
  in.ids = {"a", "b", "c", "d"};
  in.predicted_score = {4, 3, 2, 1};
  in.predicted_decision = {1, 1, 0, 0};
  in.true_score = {8, 6, 5, 1};
  in.true_decision = {1, 1, 0, 0};
  const MetricReport r = evaluate(in);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.spearman, 1.0);
  EXPECT_DOUBLE_EQ(r.ndcg_at_10, 1.0);
  EXPECT_DOUBLE_EQ(r.average, 1.0);
  for (const std::string& name : metric_names()) EXPECT_TRUE(std::isfinite(metric_by_name(name, in)));
  EXPECT_ERROR_CODE(metric_by_name("nonexistent", in), ErrorCode::kUnknownMetric);
  EXPECT_EQ(r.to_json().size(), 7u);
}

TEST(Evaluate, TopFractionDecisions) {
  const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f", "g"};
  EXPECT_EQ(top_fraction_decisions(ids, Reals{1, 7, 3, 9, 2, 2, 5}, 0.314), (Ints{0, 1, 0, 1, 0, 0, 0}));
}

TEST(Evaluate, DirectoryOfPairs) {
  testing_support::TempDir dir;
  testing_support::write(dir / "run1.csv",
                         "rank,paper_id,pi,decision\n1,a,0.5,accept\n2,b,0.3,reject\n3,c,0.2,reject\n");
  testing_support::write(dir / "run1.truth.jsonl",
                         "{\"paper_id\":\"a\",\"score\":9}\n{\"paper_id\":\"b\",\"score\":5}\n"
                         "{\"paper_id\":\"c\",\"score\":2}\n");
  const auto reports = evaluate_directory(dir.path(), 0.5);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_DOUBLE_EQ(reports.at("run1").spearman, 1.0);
  EXPECT_DOUBLE_EQ(reports.at("run1").accuracy, 1.0);
}
