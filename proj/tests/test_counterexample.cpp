#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace pathlyap;

namespace {

bool only_ones_at(const IntMatrix& a, const std::vector<std::pair<std::size_t, std::size_t>>& ones) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      const bool expected = std::find(ones.begin(), ones.end(), std::make_pair(i, j)) != ones.end();
      if (a[i][j] != (expected ? 1 : 0)) return false;
      count += expected;
    }
  return count == ones.size();
}

}  // namespace

TEST(SigmaW, Word121) {
  const auto s = build_sigma_w({0, 1, 0}, 2);
  EXPECT_EQ(s.dim, 4u);
  // 1-based (1,2), (3,4), (4,1) and (2,3).
  EXPECT_TRUE(only_ones_at(s.matrices[0], {{0, 1}, {2, 3}, {3, 0}}));
  EXPECT_TRUE(only_ones_at(s.matrices[1], {{1, 2}}));
}

TEST(SigmaW, SingleSymbolWordIsASwap) {
  const auto s = build_sigma_w({0}, 1);
  EXPECT_EQ(s.dim, 2u);
  EXPECT_EQ(s.matrices[0], (IntMatrix{{0, 1}, {1, 0}}));
}

TEST(SigmaW, EightCycle) {
  const auto a = corpus::digits(2);
  const auto s = build_sigma_w(a.parse_word({"2", "2", "1", "2", "1", "1", "1"}), 2);
  EXPECT_EQ(s.dim, 8u);
  const std::vector<int> expected_symbol{2, 2, 1, 2, 1, 1, 1, 1};  // edge k -> k+1 (mod 8)
  for (std::size_t k = 0; k < 8; ++k) {
    const std::size_t next = (k + 1) % 8;
    const auto sym = static_cast<std::size_t>(expected_symbol[k] - 1);
    EXPECT_EQ(s.matrices[sym][k][next], 1);
    EXPECT_EQ(s.matrices[1 - sym][k][next], 0);
  }
}

TEST(SigmaW, StructureInvariants) {
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t t = 1; t <= 4; ++t)
      for (const auto& w : corpus::words_of_length(m, t)) {
        const auto s = build_sigma_w(w, m);
        IntMatrix sum(s.dim, IntVector(s.dim, 0));
        for (const auto& a : s.matrices)
          for (std::size_t i = 0; i < s.dim; ++i) {
            std::int64_t row = 0, col = 0;
            for (std::size_t j = 0; j < s.dim; ++j) {
              row += a[i][j];
              col += a[j][i];
              sum[i][j] += a[i][j];
            }
            EXPECT_LE(row, 1);
            EXPECT_LE(col, 1);
          }
        for (std::size_t i = 0; i < s.dim; ++i)
          for (std::size_t j = 0; j < s.dim; ++j) EXPECT_EQ(sum[i][j], j == (i + 1) % s.dim ? 1 : 0);
      }
}

TEST(SigmaW, EmptyWordIsRejected) { EXPECT_THROW(build_sigma_w({}, 2), Error); }

TEST(Subproducts, Examples) {
  EXPECT_TRUE(subproduct_property(build_sigma_w({0, 1, 0}, 2), 8));
  EXPECT_TRUE(subproduct_property(build_sigma_w({0}, 1), 4));
  EXPECT_FALSE(subproduct_property(build_sigma_w({0, 1, 0}, 2), 2));
}

TEST(Subproducts, ExhaustiveSmallWords) {
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t t = 1; t <= 3; ++t)
      for (const auto& w : corpus::words_of_length(m, t)) {
        const auto s = build_sigma_w(w, m);
        EXPECT_TRUE(subproduct_property(s, 2 * s.dim));
      }
}

TEST(Counterexample, IncompletePairBundle) {
  const auto g = corpus::misses_121_graph();
  const auto b = synthesize_counterexample(g, {0, 1, 0});
  EXPECT_TRUE(b.exact_pass);
  EXPECT_EQ(b.system.dim(), 4u);
  ASSERT_EQ(b.diagonals.size(), 2u);
  std::vector<std::int64_t> all;
  for (const auto& p : b.diagonals)
    for (auto v : p) {
      EXPECT_GE(v, 1);
      EXPECT_LE(v, 8);
      all.push_back(v);
    }
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
  EXPECT_TRUE(verify_certificate(g, b.system, b.certificate(), 1e-9).pass);
  EXPECT_EQ(jsr_lower_bound(b.system, 4).bound, 1.0);
}

TEST(Counterexample, EdgelessGraph) {
  const LabeledGraph g(corpus::digits(1), {"P"}, {});
  const auto b = synthesize_counterexample(g, {0});
  EXPECT_TRUE(b.exact_pass);
  EXPECT_TRUE(b.exact_checks.empty());
  EXPECT_TRUE(verify_certificate(g, b.system, b.certificate(), 1e-9).pass);
}

TEST(Counterexample, ReadableWordHasACycle) {
  try {
    synthesize_counterexample(corpus::misses_121_graph(), {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cycle_detected);
  }
}

TEST(Counterexample, NumberingDecreasesAlongEdges) {
  const auto g = corpus::misses_121_graph();
  const auto s = build_sigma_w({0, 1, 0}, 2);
  const auto aux = build_auxiliary_graph(g, s);
  const auto number = reverse_topological_numbering(aux);
  for (std::size_t v = 0; v < aux.size(); ++v)
    for (auto t : aux.successors[v]) EXPECT_GT(number[v], number[t]);
}

TEST(Counterexample, RandomCorpusSoundness) {
  std::mt19937_64 rng(4242);
  int built = 0;
  while (built < 100) {
    const auto g = corpus::random_graph(rng);
    const auto pc = check_path_complete(g);
    if (pc.complete) continue;
    ++built;
    const auto b = synthesize_counterexample(g, pc.missing_word);
    EXPECT_TRUE(b.exact_pass);
    const auto rep = verify_certificate(g, b.system, b.certificate(), 1e-9);
    EXPECT_TRUE(rep.pass) << io::serialize_graph(g);
    // The exact and quadratic checks agree edge by edge.
    for (std::size_t e = 0; e < rep.edges.size(); ++e) EXPECT_EQ(rep.edges[e].pass, b.exact_checks[e].pass);
    EXPECT_EQ(jsr_lower_bound(b.system, b.sigma.dim).bound, 1.0);
  }
}
