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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles/linear_solve.hpp"
#include "test_support.hpp"

using namespace graphreview;

namespace {

using Reals = std::vector<double>;

struct RandomInstance {
  PreferenceDigraph digraph;
  Prior prior;
};

RandomInstance random_instance(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution link(0.3);
  std::bernoulli_distribution coin(0.5);
  RandomInstance out{PreferenceDigraph(n), {}};
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (!link(rng)) continue;
      if (coin(rng)) {
        out.digraph.add_preference(a, b);
      } else {
        out.digraph.add_preference(b, a);
      }
    }
  }
  Reals e(n);
  for (auto& x : e) x = u(rng) - 1.0;
  out.prior = build_prior(e);
  return out;
}

double sum(const Reals& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Prior, Examples) {
  const Prior p = build_prior(Reals{2, -1, 1}, 1e-9);
  const double total = 3.0 + 1e-9;
  EXPECT_NEAR(p.z[0], 2.0 / total, 1e-15);
  EXPECT_NEAR(p.z[1], 1e-9 / total, 1e-20);
  EXPECT_NEAR(p.z[2], 1.0 / total, 1e-15);
  EXPECT_NEAR(sum(p.z), 1.0, 1e-12);

  const Prior even = build_prior(Reals{5, 5}, 0.3);
  EXPECT_DOUBLE_EQ(even.z[0], 0.5);
  EXPECT_DOUBLE_EQ(even.z[1], 0.5);

  EXPECT_ERROR_CODE(build_prior(Reals{}), ErrorCode::kEmptyInput);
}

TEST(Prior, MissingValuesTakeTheFloor) {
  const Prior p = build_prior(Reals{1.0, std::nan("")}, 0.5);
  EXPECT_NEAR(p.z[0], 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(p.z[1], 0.5 / 1.5, 1e-15);
}

TEST(Digraph, KeepsLoserToWinnerOnly) {
  PreferenceDigraph g(3);
  g.add_preference(0, 2);
  g.add_preference(0, 2);
  EXPECT_TRUE(g.has_edge(2, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.out_degree(2), 1u);
  EXPECT_EQ(g.out_degree(0), 0u);
}

TEST(Transition, TwoNodeExample) {
  // Node 1 beat node 2 (0-based: 0 beat 1).
  PreferenceDigraph g(2);
  g.add_preference(0, 1);
  const TransitionMatrix m = TransitionMatrix::build(g, build_prior(Reals{1, 1}));
  const auto d = m.dense();
  EXPECT_DOUBLE_EQ(d[0][1], 1.0);
  EXPECT_DOUBLE_EQ(d[1][1], 0.0);
  EXPECT_DOUBLE_EQ(d[0][0], 0.5);
  EXPECT_DOUBLE_EQ(d[1][0], 0.5);
  EXPECT_TRUE(m.dangling(0));
  EXPECT_FALSE(m.dangling(1));
}

TEST(Transition, NoEdgesRepeatsPrior) {
  const Prior p = build_prior(Reals{1, 2, 3});
  const auto d = TransitionMatrix::build(PreferenceDigraph(3), p).dense();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(d[r][c], p.z[r]);
}

TEST(Transition, ThreeCycleColumnsAreSuccessors) {
  PreferenceDigraph g(3);
  g.add_preference(1, 0);  // 0 -> 1
  g.add_preference(2, 1);  // 1 -> 2
  g.add_preference(0, 2);  // 2 -> 0
  const TransitionMatrix m = TransitionMatrix::build(g, build_prior(Reals{1, 1, 1}));
  const auto d = m.dense();
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < 3; ++r) EXPECT_DOUBLE_EQ(d[r][c], r == (c + 1) % 3 ? 1.0 : 0.0);
    EXPECT_NEAR(m.column_sum(c), 1.0, 1e-12);
  }
}

TEST(Transition, SizeMismatch) {
  EXPECT_ERROR_CODE(TransitionMatrix::build(PreferenceDigraph(3), build_prior(Reals{1, 1})),
                    ErrorCode::kSizeMismatch);
}

TEST(Ppr, TwoNodeClosedForm) {
  PreferenceDigraph g(2);
  g.add_preference(0, 1);
  const Prior p = build_prior(Reals{1, 1});
  const PprResult r = ppr(TransitionMatrix::build(g, p), p, 0.2);
  EXPECT_NEAR(r.pi[0], 6.0 / 11.0, 1e-12);
  EXPECT_NEAR(r.pi[1], 5.0 / 11.0, 1e-12);
  EXPECT_LE(r.residual, kPprTolerance);
}

TEST(Ppr, NoEdgesReturnsPrior) {
  const Prior p = build_prior(Reals{4, 1, 2, 3});
  for (double lambda : {0.1, 0.5, 0.9}) {
    const PprResult r = ppr(TransitionMatrix::build(PreferenceDigraph(4), p), p, lambda);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.pi[i], p.z[i], 1e-15);
  }
}

TEST(Ppr, SymmetricCycleIsUniform) {
  PreferenceDigraph g(3);
  g.add_preference(1, 0);
  g.add_preference(2, 1);
  g.add_preference(0, 2);
  const Prior p = build_prior(Reals{1, 1, 1});
  const PprResult r = ppr(TransitionMatrix::build(g, p), p, 0.2);
  for (double x : r.pi) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(Ppr, RejectsBadInput) {
  const Prior p = build_prior(Reals{1, 1});
  const auto bad = TransitionMatrix::from_dense({{0.5, 0.2}, {0.5, 0.2}});
  EXPECT_ERROR_CODE(ppr(bad, p), ErrorCode::kNotStochastic);
  const auto m = TransitionMatrix::build(PreferenceDigraph(2), p);
  EXPECT_ERROR_CODE(ppr(m, p, 0.0), ErrorCode::kInvalidParam);
  EXPECT_ERROR_CODE(ppr(m, p, 1.0), ErrorCode::kInvalidParam);
  EXPECT_ERROR_CODE(ppr(m, build_prior(Reals{1, 1, 1})), ErrorCode::kSizeMismatch);
}

TEST(Ppr, MatchesDirectSolveOnRandomDigraphs) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> lam(0.05, 0.95);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 30;
    const RandomInstance inst = random_instance(n, rng);
    const double lambda = lam(rng);
    const TransitionMatrix m = TransitionMatrix::build(inst.digraph, inst.prior);
    const PprResult r = ppr(m, inst.prior, lambda);
    const Reals exact = oracle::ppr_exact(m.dense(), inst.prior.z, lambda);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.pi[i], exact[i], 1e-9);
    EXPECT_NEAR(sum(r.pi), 1.0, 1e-9);
    EXPECT_LE(fixed_point_residual(m, inst.prior, lambda, r.pi), 1e-9);
  }
}

TEST(PprProperty, WinnerDominatesForEveryLambda) {
  PreferenceDigraph g(2);
  g.add_preference(1, 0);
  const Prior p = build_prior(Reals{1, 1});
  const auto m = TransitionMatrix::build(g, p);
  for (int k = 1; k < 100; ++k) {
    const PprResult r = ppr(m, p, k / 100.0);
    EXPECT_GT(r.pi[1], r.pi[0]) << "lambda=" << k / 100.0;
  }
}

TEST(PprProperty, PermutationEquivariance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + trial % 20;
    const RandomInstance inst = random_instance(n, rng);
    std::vector<NodeId> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    PreferenceDigraph moved(n);
    for (NodeId v = 0; v < n; ++v)
      for (NodeId w : inst.digraph.successors(v)) moved.add_preference(sigma[w], sigma[v]);
    Prior pz;
    pz.z.resize(n);
    for (NodeId v = 0; v < n; ++v) pz.z[sigma[v]] = inst.prior.z[v];
    const Reals a = ppr(TransitionMatrix::build(inst.digraph, inst.prior), inst.prior).pi;
    const Reals b = ppr(TransitionMatrix::build(moved, pz), pz).pi;
    for (NodeId v = 0; v < n; ++v) EXPECT_NEAR(b[sigma[v]], a[v], 1e-12);
  }
}

TEST(Decide, AcceptCounts) {
  EXPECT_EQ(accept_count_for(500, 0.314), 157u);
  EXPECT_EQ(accept_count_for(3, 0.314), 0u);
  EXPECT_EQ(accept_count_for(10, 0.5), 5u);
}

TEST(Decide, ArgsortExample) {
  const RankingResult r =
      rank_and_decide({"s1", "s2", "s3"}, Reals{0.5, 0.3, 0.2}, Reals{}, 0.5);
  EXPECT_EQ(r.order(), (std::vector<std::string>{"s1", "s2", "s3"}));
  EXPECT_EQ(r.accept_count, 1u);
  EXPECT_EQ(r.at("s1").decision, Decision::kAccept);
  EXPECT_EQ(r.at("s2").decision, Decision::kReject);
  EXPECT_EQ(r.rank_of("s3"), 3u);
  EXPECT_ERROR_CODE(r.rank_of("s9"), ErrorCode::kUnknownPaper);
}

TEST(Decide, SmallPoolRejectsAll) {
  const RankingResult r = rank_and_decide({"a", "b", "c"}, Reals{0.2, 0.5, 0.3}, Reals{}, 0.314);
  EXPECT_EQ(r.accept_count, 0u);
  for (const auto& e : r.entries) EXPECT_EQ(e.decision, Decision::kReject);
}

TEST(Decide, TieBreakByPriorThenId) {
  const RankingResult r =
      rank_and_decide({"d", "c", "b", "a"}, Reals{0.25, 0.25, 0.25, 0.25}, Reals{1, 2, 2, 1}, 0.5);
  EXPECT_EQ(r.order(), (std::vector<std::string>{"b", "c", "a", "d"}));
}

TEST(Decide, FiveHundredSubmissions) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<std::string> ids;
  Reals pi;
  for (int i = 0; i < 500; ++i) {
    ids.push_back("p" + std::to_string(i));
    pi.push_back(u(rng));
  }
  const RankingResult r = rank_and_decide(ids, pi, Reals{}, 0.314);
  EXPECT_EQ(r.accept_count, 157u);
  std::size_t accepts = 0;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const bool accepted = r.entries[i].decision == Decision::kAccept;
    accepts += accepted;
    EXPECT_EQ(accepted, i < 157);
  }
  EXPECT_EQ(accepts, 157u);
}

TEST(Decide, ScalingPriorKeepsRanking) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  Reals e(12);
  for (auto& x : e) x = u(rng);
  Reals scaled(e);
  for (auto& x : scaled) x *= 7.5;
  std::vector<std::string> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("p" + std::to_string(i));
  auto rank = [&](const Reals& scores) {
    const Prior p = build_prior(scores);
    const PprResult r = ppr(TransitionMatrix::build(PreferenceDigraph(12), p), p);
    return rank_and_decide(ids, r.pi, scores, 0.314).order();
  };
  EXPECT_EQ(rank(e), rank(scaled));
  // Zero edges: ranking equals the ordering of e.
  std::vector<std::string> by_e = ids;
  std::sort(by_e.begin(), by_e.end(), [&](const auto& a, const auto& b) {
    return e[std::stoi(a.substr(1))] > e[std::stoi(b.substr(1))];
  });
  EXPECT_EQ(rank(e), by_e);
}

TEST(RankingExport, CsvRoundTrip) {
  testing_support::TempDir dir;
  const RankingResult r = rank_and_decide({"x", "y", "z", "w"}, Reals{0.1, 0.4, 0.3, 0.2},
                                          Reals{}, 0.5);
  write_ranking_csv(dir / "r.csv", r);
  write_ranking_jsonl(dir / "r.jsonl", r);
  const RankingResult back = read_ranking_csv(dir / "r.csv");
  EXPECT_EQ(back.order(), r.order());
  EXPECT_EQ(back.accept_count, r.accept_count);
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].pi, r.entries[i].pi);
    EXPECT_EQ(back.entries[i].decision, r.entries[i].decision);
  }
  EXPECT_EQ(util::read_text_file(dir / "r.csv").substr(0, 25), "rank,paper_id,pi,decision");
}
