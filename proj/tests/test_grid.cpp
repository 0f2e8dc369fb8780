#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "mapleja/multi_index.hpp"

using mapleja::MultiIndex;
using mapleja::MultiIndexSet;

namespace {

// Independent binomial via Pascal's triangle.
unsigned long long choose(unsigned n, unsigned k) {
  std::vector<std::vector<unsigned long long>> c(n + 1, std::vector<unsigned long long>(n + 1, 0));
  for (unsigned i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (unsigned j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c[n][k];
}

// Random downward-closed set grown by random admissible additions.
MultiIndexSet random_lower_set(std::mt19937_64& rng, std::size_t dim, std::size_t size) {
  MultiIndexSet s{MultiIndex(dim)};
  while (s.size() < size) {
    const auto adm = mapleja::admissible_neighbors(s);
    auto it = adm.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, adm.size() - 1)(rng));
    s.insert(*it);
  }
  return s;
}

}  // namespace

TEST(Grid, DownwardClosedExamples) {
  EXPECT_TRUE(mapleja::is_downward_closed({MultiIndex{0, 0}}));
  EXPECT_TRUE(mapleja::is_downward_closed({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
  EXPECT_FALSE(mapleja::is_downward_closed({{0, 0}, {2, 0}}));
}

TEST(Grid, AdmissibleNeighborExamples) {
  EXPECT_EQ(mapleja::admissible_neighbors({MultiIndex{0, 0}}), (MultiIndexSet{{1, 0}, {0, 1}}));
  EXPECT_EQ(mapleja::admissible_neighbors({{0, 0}, {1, 0}}), (MultiIndexSet{{2, 0}, {0, 1}}));
  EXPECT_EQ(mapleja::admissible_neighbors(mapleja::total_degree_set(2, 1)),
            (MultiIndexSet{{2, 0}, {1, 1}, {0, 2}}));
  EXPECT_THROW(mapleja::admissible_neighbors({{0, 0}, {2, 0}}), mapleja::ContractError);
}

TEST(Grid, SmolyakNodeCounts) {
  std::vector<std::vector<double>> seq(3, {0.0, -1.0, 1.0, 0.5});
  EXPECT_EQ(mapleja::smolyak_nodes(mapleja::total_degree_set(2, 2),
                                   std::span(seq.data(), 2)).size(), 6u);
  const auto root = mapleja::smolyak_nodes({MultiIndex{0, 0}}, std::span(seq.data(), 2));
  ASSERT_EQ(root.size(), 1u);
  EXPECT_EQ(root[0], (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(mapleja::smolyak_nodes(mapleja::total_degree_set(3, 1), seq).size(), 4u);
}

TEST(Grid, TotalDegreeCardinality) {
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned k = 0; k <= 8; ++k) {
      const auto s = mapleja::total_degree_set(n, k);
      EXPECT_EQ(s.size(), choose(n + k, n));
      EXPECT_TRUE(mapleja::is_downward_closed(s));
    }
}

TEST(Grid, AdmissibleAdditionPreservesClosure) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + trial % 5;
    const std::size_t size = 1 + (trial * 7) % 50;
    const auto s = random_lower_set(rng, dim, size);
    ASSERT_TRUE(mapleja::is_downward_closed(s));
    for (const auto& idx : mapleja::admissible_neighbors(s)) {
      EXPECT_FALSE(s.contains(idx));
      auto t = s;
      t.insert(idx);
      EXPECT_TRUE(mapleja::is_downward_closed(t));
    }
  }
}

TEST(Grid, NodeCountEqualsIndexCount) {
  std::mt19937_64 rng(23);
  std::vector<std::vector<double>> seq(4);
  for (auto& s : seq)
    for (int k = 0; k < 60; ++k) s.push_back(std::cos(0.37 * k + 0.1));
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_lower_set(rng, 4, 1 + trial);
    const auto nodes = mapleja::smolyak_nodes(s, seq);
    std::set<std::vector<double>> distinct(nodes.begin(), nodes.end());
    EXPECT_EQ(distinct.size(), s.size());
  }
}

TEST(Grid, LexicographicOrder) {
  EXPECT_LT((MultiIndex{0, 5}), (MultiIndex{1, 0}));
  EXPECT_LT((MultiIndex{1, 0}), (MultiIndex{1, 1}));
  const MultiIndexSet s{{1, 0}, {0, 1}, {0, 0}};
  EXPECT_EQ(*s.begin(), (MultiIndex{0, 0}));
  EXPECT_EQ(*s.rbegin(), (MultiIndex{1, 0}));
}
