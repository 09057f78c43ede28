#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "qslab/harness.hpp"
#include "qslab/poset.hpp"

using namespace qslab;

namespace {

Poset vee() { return Poset::from_relations(3, {{0, 1}, {0, 2}}); }

Poset random_dag_poset(std::size_t n, double p, Rng& rng) {
  // random labels on top of a graph order
  Poset g = gen_random_graph_order(n, p, rng);
  auto perm = random_order(n, rng);
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (auto [a, b] : g.relations()) rel.emplace_back(perm[a], perm[b]);
  return Poset::from_relations(n, rel);
}

}  // namespace

TEST(Closure, TransitiveAndCycles) {
  auto P = Poset::from_relations(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_TRUE(P.less(0, 3));
  EXPECT_EQ(P.relation_count(), 6u);
  EXPECT_TRUE(P.is_closed());
  EXPECT_EQ(P.covers().size(), 3u);
  EXPECT_THROW(Poset::from_relations(3, {{0, 1}, {1, 2}, {2, 0}}), ParameterError);
  EXPECT_THROW(Poset::from_relations(2, {{0, 0}}), ParameterError);
  EXPECT_THROW(Poset::from_relations(2, {{0, 5}}), ParameterError);
}

TEST(Generators, Extremes) {
  Rng rng(1);
  EXPECT_EQ(gen_random_graph_order(6, 1.0, rng), chain_poset(6));
  EXPECT_EQ(gen_random_graph_order(6, 0.0, rng), antichain_poset(6));
  auto c = gen_kdim_order(7, 1, rng);
  EXPECT_EQ(c.relation_count(), 21u);
  auto b1 = gen_bipartite_order(3, 1.0, rng);
  EXPECT_EQ(b1.relation_count(), 9u);
  EXPECT_EQ(gen_bipartite_order(3, 0.0, rng).relation_count(), 0u);
  auto L = gen_levels(3, 4);
  EXPECT_EQ(L.size(), 12u);
  EXPECT_EQ(count_linear_extensions(L), BigInt(24 * 24 * 24));
  EXPECT_THROW(gen_random_graph_order(3, 1.5, rng), ParameterError);
}

TEST(Generators, KdimTwoComparableFraction) {
  Rng rng(7);
  double comparable = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) comparable += gen_kdim_order(3, 2, rng).relation_count() / 3.0;
  double mean = comparable / trials;
  EXPECT_NEAR(mean, 0.5, 4 * std::sqrt(0.25 / 3 / trials) + 0.01);
}

TEST(Generators, BipartiteMeanExtensionsMatchesInterleavingSum) {
  // Expected e(P) = (3!)^2 sum over interleavings of q^(pairs with y before x).
  const double q = 0.5;
  double s = 0;
  for (int mask = 0; mask < 64; ++mask) {
    if (__builtin_popcount(mask) != 3) continue;
    int ys = 0, inv = 0;
    for (int i = 0; i < 6; ++i) {
      if (mask >> i & 1) ++ys;
      else inv += ys;
    }
    s += std::pow(q, inv);
  }
  const double expected = 36 * s;
  Rng rng(11);
  std::vector<double> v;
  for (int t = 0; t < 10000; ++t) v.push_back(to_double(Rational(count_linear_extensions(gen_bipartite_order(3, 0.5, rng)))));
  auto st = sample_stats(v);
  EXPECT_NEAR(st.mean, expected, 3 * st.stderr_mean());
}

TEST(Generators, IntervalOrderMatchesPoset) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto io = gen_interval_order(40, rng);
    auto m = metrics(io.poset());
    EXPECT_EQ(io.width(), m.width);
    EXPECT_EQ(io.height(), m.height);
  }
}

TEST(Uniform, LabelledPosetCounts) {
  std::vector<std::size_t> expected = {1, 1, 3, 19, 219, 4231};
  for (std::size_t n = 0; n <= 5; ++n) EXPECT_EQ(all_labelled_posets(n).size(), expected[n]) << n;
  Rng rng(5);
  EXPECT_THROW(gen_uniform_poset(6, rng, UniformMode::exact), CapacityError);
  auto big = gen_uniform_poset(60, rng, UniformMode::approximate);
  EXPECT_EQ(big.size(), 60u);
  EXPECT_LE(metrics(big).height, 3u);
}

TEST(Uniform, ThreeElementFrequencies) {
  Rng rng(2024);
  const auto& all = all_labelled_posets(3);
  std::vector<int> counts(all.size(), 0);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    auto P = gen_uniform_poset(3, rng);
    auto it = std::find(all.begin(), all.end(), P);
    ASSERT_NE(it, all.end());
    ++counts[static_cast<std::size_t>(it - all.begin())];
  }
  const double p = 1.0 / 19, sd = std::sqrt(draws * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, draws * p, 3 * sd);
}

TEST(Extensions, SmallExamples) {
  EXPECT_EQ(count_linear_extensions(chain_poset(7)), 1);
  EXPECT_EQ(count_linear_extensions(antichain_poset(7)), 5040);
  EXPECT_EQ(count_linear_extensions(vee()), 2);
  EXPECT_EQ(count_linear_extensions(antichain_poset(0)), 1);
  EXPECT_THROW(count_linear_extensions(antichain_poset(21)), CapacityError);
}

TEST(Extensions, DynamicProgrammingMatchesBruteForce) {
  Rng rng(99);
  for (int seed = 0; seed < 1000; ++seed) {
    std::size_t n = 1 + rng.below(8);
    auto P = random_dag_poset(n, rng.uniform01(), rng);
    ASSERT_EQ(count_linear_extensions(P), count_linear_extensions_brute(P)) << seed;
  }
}

TEST(Extensions, RandomExtensionIsUniform) {
  Rng rng(4);
  auto P = Poset::from_relations(4, {{0, 1}, {2, 3}});  // 6 extensions
  std::map<std::vector<std::size_t>, int> freq;
  const int draws = 60000;
  for (int t = 0; t < draws; ++t) {
    auto e = random_linear_extension(P, rng);
    ASSERT_TRUE(is_linear_extension(P, e));
    ++freq[e];
  }
  EXPECT_EQ(freq.size(), 6u);
  const double sd = std::sqrt(draws / 6.0 * 5 / 6);
  for (auto& [e, c] : freq) EXPECT_NEAR(c, draws / 6.0, 4 * sd);
  auto big = gen_kdim_order(300, 3, rng);
  EXPECT_TRUE(is_linear_extension(big, random_topological_order(big, rng)));
  EXPECT_TRUE(is_linear_extension(big, hidden_order(big, rng)));
}

TEST(Metrics, ChainAntichainVee) {
  auto c = metrics(chain_poset(5));
  EXPECT_EQ(c.width, 1u);
  EXPECT_EQ(c.height, 5u);
  EXPECT_EQ(c.posts.size(), 5u);
  auto a = metrics(antichain_poset(5));
  EXPECT_EQ(a.width, 5u);
  EXPECT_EQ(a.height, 1u);
  EXPECT_TRUE(a.posts.empty());
  auto v = metrics(vee());
  EXPECT_EQ(v.width, 2u);
  EXPECT_EQ(v.height, 2u);
  EXPECT_EQ(v.levels.size(), 2u);
  ASSERT_EQ(v.posts.size(), 1u);
  EXPECT_EQ(v.posts[0], 0u);
  EXPECT_EQ(*v.extension_count, 2);
}

TEST(Metrics, WidthMatchesBruteForce) {
  Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng.below(12);
    auto P = random_dag_poset(n, rng.uniform01() * 0.6, rng);
    auto m = metrics(P);
    EXPECT_EQ(m.width, max_antichain_brute(P));
    EXPECT_TRUE(is_antichain(P, m.antichain));
    for (auto& ch : m.chain_cover) EXPECT_TRUE(is_chain(P, ch));
  }
}

TEST(Metrics, SetupNumber) {
  EXPECT_EQ(setup_number(vee()), 1u);
  EXPECT_EQ(setup_number(chain_poset(6)), 0u);
  EXPECT_EQ(setup_number(antichain_poset(6)), 5u);
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + rng.below(9);
    auto P = random_dag_poset(n, rng.uniform01(), rng);
    EXPECT_GE(setup_number(P) + 1, metrics(P).width);
  }
}

TEST(Metrics, LinearSumAdditivity) {
  Rng rng(8);
  auto A = gen_kdim_order(8, 2, rng), B = gen_kdim_order(6, 3, rng);
  auto S = linear_sum(A, B);
  EXPECT_EQ(metrics(S).height, metrics(A).height + metrics(B).height);
  EXPECT_EQ(count_linear_extensions(S), count_linear_extensions(A) * count_linear_extensions(B));
  auto W = linear_sum(gen_levels(1, 2), linear_sum(chain_poset(1), gen_levels(1, 2)));
  auto m = metrics(W);
  ASSERT_EQ(m.posts.size(), 1u);
  EXPECT_EQ(m.posts[0], 2u);
  ASSERT_EQ(m.factors.size(), 2u);
  EXPECT_EQ(m.factors[0].size(), 3u);
  EXPECT_EQ(metrics(gen_levels(3, 2)).factors.size(), 1u);
}

TEST(FileFormat, RoundTripAndErrors) {
  Rng rng(12);
  auto P = gen_kdim_order(10, 2, rng);
  std::stringstream ss;
  write_poset(ss, P);
  EXPECT_EQ(read_poset(ss), P);
  std::istringstream ok("# comment\n3\n1 2\n1 3\n");
  EXPECT_EQ(read_poset(ok), vee());
  std::istringstream bad1("3\n1 4\n"), bad2("3\n1\n"), bad3("x\n"), cyc("2\n1 2\n2 1\n");
  EXPECT_THROW(read_poset(bad1), ParameterError);
  EXPECT_THROW(read_poset(bad2), ParameterError);
  EXPECT_THROW(read_poset(bad3), ParameterError);
  EXPECT_THROW(read_poset(cyc), ParameterError);
}
