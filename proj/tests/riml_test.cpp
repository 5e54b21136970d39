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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "graphreview/corpus.hpp"
#include "test_support.hpp"

using namespace graphreview;
using namespace graphreview::riml;

namespace {

using Reals = std::vector<double>;

// Direct evaluation of the tempered reward softmax.
Reals softmax_target(double s, const Reals& anchors, double sigma, double tau) {
  Reals y;
  for (double a : anchors) y.push_back(std::exp(-(s - a) * (s - a) / (2 * sigma * sigma) / tau));
  const double z = std::accumulate(y.begin(), y.end(), 0.0);
  for (auto& v : y) v /= z;
  return y;
}

double entropy(const Reals& y) {
  double h = 0;
  for (double p : y)
    if (p > 0) h -= p * std::log(p);
  return h;
}

const std::map<std::string, double> kExampleLabels{{"a", 8.0}, {"b", 5.0}, {"c", 6.4}, {"d", 6.6}};

}  // namespace

TEST(NodeTarget, ScoreTenConcentratesOnTen) {
  const NodeTarget t = node_target(10.0, AnchorScale::iclr());
  EXPECT_EQ(std::max_element(t.y.begin(), t.y.end()) - t.y.begin(), 5);
  EXPECT_GT(t.y[5], 0.86);
  EXPECT_NEAR(t.y[4] / t.y[5], std::exp(-2.0), 1e-12);
}

TEST(NodeTarget, ScoreSevenSplitsBetweenSixAndEight) {
  const NodeTarget t = node_target(7.0, AnchorScale::iclr());
  EXPECT_DOUBLE_EQ(t.y[3], t.y[4]);
  const Reals expect = softmax_target(7.0, {1, 3, 5, 6, 8, 10}, 1.0, 1.0);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(t.y[k], expect[k], 1e-15);
  // exp(-1/2) / (2 exp(-1/2) + exp(-2) + exp(-9/2) + exp(-8) + exp(-18))
  const double z = 2 * std::exp(-0.5) + std::exp(-2.0) + std::exp(-4.5) + std::exp(-8.0) +
                   std::exp(-18.0);
  EXPECT_NEAR(t.y[3], std::exp(-0.5) / z, 1e-15);
}

TEST(NodeTarget, RejectsNonPositiveWidths) {
  EXPECT_ERROR_CODE(node_target(5.0, AnchorScale::iclr(), 0.0, 1.0), ErrorCode::kInvalidParam);
  EXPECT_ERROR_CODE(node_target(5.0, AnchorScale::iclr(), 1.0, -1.0), ErrorCode::kInvalidParam);
}

TEST(NodeTargetProperty, SumsToOneArgmaxNearest) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  const AnchorScale scale = AnchorScale::iclr();
  for (int i = 0; i < 1000; ++i) {
    const double s = u(rng);
    const NodeTarget t = node_target(s, scale);
    EXPECT_NEAR(std::accumulate(t.y.begin(), t.y.end(), 0.0), 1.0, 1e-12);
    const auto arg = static_cast<std::size_t>(std::max_element(t.y.begin(), t.y.end()) - t.y.begin());
    const double best = std::abs(s - scale[arg]);
    for (std::size_t k = 0; k < scale.size(); ++k) EXPECT_LE(best, std::abs(s - scale[k]) + 1e-12);
  }
}

TEST(NodeTargetProperty, LowerTemperatureSharpens) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double s = u(rng);
    auto peak = [&](double tau) {
      const NodeTarget t = node_target(s, AnchorScale::iclr(), 1.0, tau);
      return *std::max_element(t.y.begin(), t.y.end());
    };
    EXPECT_GT(peak(0.5), peak(1.0));
    EXPECT_GT(peak(1.0), peak(2.0));
  }
}

TEST(MinePairs, ExampleOutcomesDependOnlyOnDrawOrder) {
  // Gaps above 1.5: a-b (3), a-c (1.6), b-d (1.6). Whoever is drawn first
  // decides between {a-b} and {a-c, b-d}.
  std::set<std::size_t> sizes;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto pairs = mine_pairs(kExampleLabels, 1.5, seed);
    sizes.insert(pairs.size());
    if (pairs.size() == 1) {
      const EdgeTarget& p = pairs[0];
      EXPECT_EQ(std::set<std::string>({p.u_id, p.v_id}), std::set<std::string>({"a", "b"}));
      EXPECT_DOUBLE_EQ(p.weight, 3.0);
      EXPECT_EQ(p.label, p.u_id == "a" ? 1 : 0);
    } else {
      ASSERT_EQ(pairs.size(), 2u);
      std::set<std::set<std::string>> got;
      for (const auto& p : pairs) got.insert({p.u_id, p.v_id});
      EXPECT_EQ(got, (std::set<std::set<std::string>>{{"a", "c"}, {"b", "d"}}));
    }
  }
  EXPECT_EQ(sizes, (std::set<std::size_t>{1, 2}));
}

TEST(MinePairs, EqualScoresGiveNothing) {
  EXPECT_TRUE(mine_pairs({{"a", 5.0}, {"b", 5.0}}, 1.5, 0).empty());
  EXPECT_ERROR_CODE(mine_pairs(kExampleLabels, -1.0, 0), ErrorCode::kInvalidParam);
}

TEST(MinePairs, DeterministicPerSeed) {
  const auto a = mine_pairs(kExampleLabels, 1.5, 42);
  const auto b = mine_pairs(kExampleLabels, 1.5, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].u_id, b[i].u_id);
    EXPECT_EQ(a[i].v_id, b[i].v_id);
  }
}

TEST(MinePairsProperty, GapAndAtMostOnce) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  int labels_seen[2] = {0, 0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::map<std::string, double> labels;
    for (int i = 0; i < 20; ++i) labels["p" + std::to_string(i)] = u(rng);
    std::set<std::string> used;
    for (const EdgeTarget& p : mine_pairs(labels, 1.5, seed)) {
      EXPECT_GT(std::abs(labels[p.u_id] - labels[p.v_id]), 1.5);
      EXPECT_DOUBLE_EQ(p.weight, std::abs(labels[p.u_id] - labels[p.v_id]));
      EXPECT_EQ(p.label, labels[p.u_id] > labels[p.v_id] ? 1 : 0);
      EXPECT_TRUE(used.insert(p.u_id).second);
      EXPECT_TRUE(used.insert(p.v_id).second);
      ++labels_seen[p.label];
    }
  }
  EXPECT_GT(labels_seen[0], 0);
  EXPECT_GT(labels_seen[1], 0);
}

TEST(NodeLoss, Examples) {
  const NodeTarget t = node_target(7.0, AnchorScale::iclr());
  const std::vector<NodeTarget> ts{t};
  EXPECT_NEAR(node_loss(ts, std::vector<Reals>{t.y}), entropy(t.y), 1e-12);

  NodeTarget one_hot;
  one_hot.y = {0, 1, 0};
  EXPECT_DOUBLE_EQ(node_loss(std::vector<NodeTarget>{one_hot}, std::vector<Reals>{{0, 1, 0}}), 0.0);

  NodeTarget t1, t2;
  t1.y = {0.5, 0.5};
  t2.y = {1.0, 0.0};
  const std::vector<Reals> preds{{0.25, 0.75}, {0.8, 0.2}};
  const double ce1 = -(0.5 * std::log(0.25) + 0.5 * std::log(0.75));
  const double ce2 = -std::log(0.8);
  EXPECT_NEAR(node_loss(std::vector<NodeTarget>{t1, t2}, preds), (ce1 + ce2) / 2, 1e-15);
}

TEST(NodeLoss, Errors) {
  NodeTarget t;
  t.y = {0.5, 0.5};
  EXPECT_ERROR_CODE(node_loss(std::vector<NodeTarget>{t}, std::vector<Reals>{}), ErrorCode::kSizeMismatch);
  EXPECT_ERROR_CODE(node_loss(std::vector<NodeTarget>{t}, std::vector<Reals>{{0.7, 0.7}}),
                    ErrorCode::kInvalidDistribution);
  EXPECT_ERROR_CODE(node_loss(std::vector<NodeTarget>{t}, std::vector<Reals>{{1.2, -0.2}}),
                    ErrorCode::kInvalidDistribution);
}

TEST(EdgeLoss, Examples) {
  EdgeTarget t{"a", "b", 1, 3.0};
  EXPECT_DOUBLE_EQ(edge_loss(std::vector<EdgeTarget>{t}, std::vector<Reals>{{0.0, 1.0}}), 0.0);
  EdgeTarget half{"a", "b", 0, 2.0};
  EXPECT_NEAR(edge_loss(std::vector<EdgeTarget>{half}, std::vector<Reals>{{0.5, 0.5}}),
              2.0 * std::log(2.0), 1e-15);
  EXPECT_ERROR_CODE(edge_loss(std::vector<EdgeTarget>{t, half}, std::vector<Reals>{{0.5, 0.5}}),
                    ErrorCode::kSizeMismatch);
}

TEST(LossProperty, GridMinimumAtTarget) {
  // Two classes.
  for (double q : {0.1, 0.3, 0.5, 0.8}) {
    NodeTarget t;
    t.y = {q, 1 - q};
    double best = 1e300, arg = -1;
    for (int i = 1; i < 1000; ++i) {
      const double p = i / 1000.0;
      const double l = node_loss(std::vector<NodeTarget>{t}, std::vector<Reals>{{p, 1 - p}});
      if (l < best) best = l, arg = p;
    }
    EXPECT_NEAR(arg, q, 1e-3);
  }
  // Three classes.
  NodeTarget t;
  t.y = {0.2, 0.5, 0.3};
  double best = 1e300;
  Reals arg;
  for (int i = 1; i < 100; ++i) {
    for (int j = 1; i + j < 100; ++j) {
      const Reals p{i / 100.0, j / 100.0, (100 - i - j) / 100.0};
      const double l = node_loss(std::vector<NodeTarget>{t}, std::vector<Reals>{p});
      if (l < best) best = l, arg = p;
    }
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(arg[k], t.y[k], 1e-9);
  EXPECT_NEAR(best, entropy(t.y), 1e-12);
}

namespace {

Corpus labeled_corpus(const std::map<std::string, double>& labels, bool label_all = true) {
  std::vector<Paper> papers;
  std::unordered_map<std::string, std::vector<double>> emb;
  std::map<std::string, double> kept;
  int i = 0;
  for (const auto& [id, s] : labels) {
    papers.push_back({id, Role::kSubmission, "ICLR", 2025, "text of " + id});
    emb[id] = {1.0, static_cast<double>(i++)};
    if (label_all || id != "a") kept[id] = s;
  }
  return Corpus(std::move(papers), std::move(emb), std::move(kept));
}

}  // namespace

TEST(Export, CountsFollowMinedPairs) {
  testing_support::TempDir dir;
  const Corpus corpus = labeled_corpus(kExampleLabels);
  const PromptSet prompts = PromptSet::load(GRAPHREVIEW_PROMPT_DIR);
  bool saw_single = false;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    ExportParams params;
    params.seed = seed;
    const auto summary = export_training_set(corpus, AnchorScale::iclr(), params, prompts,
                                             dir / "s.jsonl", dir / "c.jsonl");
    EXPECT_EQ(summary.scoring_records, 4u);
    EXPECT_EQ(summary.comparison_records, mine_pairs(kExampleLabels, 1.5, seed).size());
    saw_single |= summary.comparison_records == 1;
  }
  EXPECT_TRUE(saw_single);

  std::size_t lines = 0;
  util::read_jsonl(dir / "s.jsonl", [&](const util::Json& r, std::size_t) {
    ++lines;
    EXPECT_TRUE(r.contains("paper_id") && r.contains("prompt") && r.contains("anchors") &&
                r.contains("target") && r.contains("scalar"));
    EXPECT_NE(r["prompt"].get<std::string>().find("The correct score for this paper is"),
              std::string::npos);
  });
  EXPECT_EQ(lines, 4u);
}

TEST(Export, NoLabelsWritesEmptyFiles) {
  testing_support::TempDir dir;
  const Corpus corpus(
      {{"x", Role::kSubmission, "", 2025, "t"}}, {{"x", {1.0, 0.0}}});
  const auto summary = export_training_set(corpus, AnchorScale::iclr(), {}, PromptSet::defaults(),
                                           dir / "s.jsonl", dir / "c.jsonl");
  EXPECT_EQ(summary.scoring_records, 0u);
  EXPECT_EQ(summary.comparison_records, 0u);
  EXPECT_TRUE(util::read_text_file(dir / "s.jsonl").empty());
}

TEST(Export, UnlabeledPaperRequested) {
  testing_support::TempDir dir;
  const Corpus corpus = labeled_corpus(kExampleLabels, false);
  ExportParams params;
  params.paper_ids = {"a", "b"};
  EXPECT_ERROR_CODE(export_training_set(corpus, AnchorScale::iclr(), params, PromptSet::defaults(),
                                        dir / "s.jsonl", dir / "c.jsonl"),
                    ErrorCode::kMissingLabel);
}

TEST(FormatScore, ShortestDecimal) {
  EXPECT_EQ(format_score(8.0), "8");
  EXPECT_EQ(format_score(6.25), "6.25");
}
