#include "support.hpp"
#include "oracles/factorization_oracle.hpp"

#include "rdlab/centroid.hpp"
#include "rdlab/enumeration.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace rdlab;
using namespace rdlab::testing;

namespace {

FreeWord fw(std::initializer_list<int> letters) { return free_word(letters); }

GraphProduct z_times_z() { return GraphProduct({infinite_cyclic(), infinite_cyclic()}, {{0, 1}}); }

}  // namespace

// ---------------------------------------------------------------------------
// Tree median

TEST(TreeMedian, CommonPrefix) {
  EXPECT_EQ(tree_median(fw({1, 2, 2}), fw({1, 2, -1})), fw({1, 2}));
  EXPECT_EQ(tree_median(fw({1, 2, -1}), fw({1, 2, -1})), fw({1, 2, -1}));
  EXPECT_EQ(tree_median(fw({1}), fw({-2})), fw({}));
}

TEST(TreeMedian, LiesOnAllThreeGeodesics) {
  auto F = f2();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto g = random_walk(F, rng() % 9, rng);
    auto k = random_walk(F, rng() % 9, rng);
    auto m = tree_median(g, k);
    auto one = F.identity();
    EXPECT_EQ(distance(F, one, m) + distance(F, m, g), F.length(g));
    EXPECT_EQ(distance(F, one, m) + distance(F, m, k), F.length(k));
    EXPECT_EQ(distance(F, g, m) + distance(F, m, k), distance(F, g, k));
  }
}

TEST(TreeMedian, RejectsOtherBackends) {
  Group Z(zed());
  EXPECT_THROW(tree_median(Z, Z.identity(), Z.identity()), BackendMismatch);
  EXPECT_THROW(default_centroid_map(Z), PreconditionFailed);
}

// ---------------------------------------------------------------------------
// Product centroid

TEST(ProductCentroid, ComponentwiseMedian) {
  auto gp = z_times_z();
  auto co = product_centroid(gp, median_map(gp.vertex_group(0)), median_map(gp.vertex_group(1)));
  EXPECT_EQ(co(gp.identity(), gp.identity()), gp.identity());
  EXPECT_EQ(co(word(gp, {{0, 2}, {1, 3}}), word(gp, {{0, 5}, {1, 1}})), word(gp, {{0, 2}, {1, 1}}));
  EXPECT_EQ(co(word(gp, {{0, 2}, {1, -3}}), word(gp, {{0, -1}, {1, 4}})), gp.identity());
}

TEST(ProductCentroid, MatchesIntegerMedianOracle) {
  auto gp = z_times_z();
  auto co = default_centroid_map(Group(gp));
  // On Z the median of (0, x, y) is 0 for opposite signs, else the smaller magnitude.
  auto med = [](int x, int y) {
    if ((x > 0) != (y > 0) || x == 0 || y == 0) return 0;
    return x > 0 ? std::min(x, y) : std::max(x, y);
  };
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          Element x = word(gp, {{0, a}, {1, b}});
          Element y = word(gp, {{0, c}, {1, d}});
          EXPECT_EQ(co(x, y), Element(word(gp, {{0, med(a, c)}, {1, med(b, d)}})));
        }
}

TEST(ProductCentroid, RequiresCompleteGraph) {
  EXPECT_THROW(default_centroid_map(Group(path_uvw())), PreconditionFailed);
}

// ---------------------------------------------------------------------------
// (c1)-(c3) on the free group

TEST(CentroidCounts, C1Examples) {
  auto F = f2();
  auto co = median_map(F);
  EXPECT_EQ(verify_c1(F, co, fw({1, 2}), Rational(2)).count, 3u);
  EXPECT_EQ(verify_c1(F, co, fw({1, 2, -1}), Rational(0)).count, 1u);
  for (int r = 0; r <= 4; ++r) EXPECT_EQ(verify_c1(F, co, F.identity(), Rational(r)).count, 1u);
  auto rep = verify_c1(F, co, fw({1, 2}), Rational(2));
  EXPECT_EQ(rep.mode, "c1");
  EXPECT_EQ(rep.fixed_element, "a1 a2");
  EXPECT_FALSE(rep.stabilized.has_value());
  EXPECT_FALSE(rep.truncated);
}

TEST(CentroidCounts, C2ExamplesAndMonotone) {
  auto F = f2();
  auto co = median_map(F);
  auto rep = verify_c2(F, co, fw({1, 2}), Rational(4));
  EXPECT_EQ(rep.count, 3u);
  EXPECT_TRUE(rep.truncated);
  ASSERT_TRUE(rep.stabilized.has_value());
  EXPECT_TRUE(*rep.stabilized);
  EXPECT_EQ(verify_c2(F, co, F.identity(), Rational(3)).count, 1u);

  // Stabilization needs two full unit steps after the last new value.
  auto early = verify_c2(F, co, fw({1, 2, 2}), Rational(3));
  EXPECT_EQ(early.count, 4u);
  EXPECT_FALSE(*early.stabilized);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto g = random_walk(F, 1 + rng() % 4, rng);
    EXPECT_LE(verify_c2(F, co, g, Rational(2)).count, verify_c2(F, co, g, Rational(4)).count);
  }
}

TEST(CentroidCounts, C3Examples) {
  auto F = f2();
  auto co = median_map(F);
  EXPECT_LE(verify_c3(F, co, fw({2}), Rational(2)).count, 2u);
  EXPECT_EQ(verify_c3(F, co, F.identity(), Rational(3)).count, 1u);
  EXPECT_EQ(verify_c3(F, co, fw({1, -2}), Rational(0)).count, 1u);
}

TEST(CentroidCounts, RecountedWithOrderedSets) {
  auto F = f2();
  auto co = median_map(F);
  auto domain = ball(F, Rational(3)).elements;
  for (const auto& p : ball(F, Rational(2)).elements) {
    std::set<FreeWord> c1, c2, c3;
    for (const auto& x : domain) {
      c1.insert(co(x, p));
      c2.insert(co(p, x));
      c3.insert(F.multiply(F.inverse(x), co(x, F.multiply(x, p))));
    }
    EXPECT_EQ(verify_c1(F, co, p, Rational(3)).count, c1.size());
    EXPECT_EQ(verify_c2(F, co, p, Rational(3)).count, c2.size());
    EXPECT_EQ(verify_c3(F, co, p, Rational(3)).count, c3.size());
  }
}

TEST(CentroidCounts, ThroughTheGroupVariant) {
  Group G(f2());
  auto co = default_centroid_map(G);
  Element k = fw({1, 2});
  EXPECT_EQ(verify_c1(G, co, k, Rational(2)).count, 3u);
  Element stray = LatticePoint{{1}};
  EXPECT_THROW(verify_c1(G, co, stray, Rational(2)), BackendMismatch);
}

TEST(CentroidCounts, BudgetIsEnforced) {
  auto F = f2();
  EXPECT_THROW(verify_c1(F, median_map(F), F.identity(), Rational(6), 100), BudgetExceeded);
}

// ---------------------------------------------------------------------------
// Clique factorization

TEST(CliqueFactorization, TrivialRightFactor) {
  auto gp = path_uvw();
  auto g = word(gp, {{0, 1}, {1, 2}});
  auto f = clique_factorize(gp, g, gp.identity());
  EXPECT_EQ(f.g1, g);
  EXPECT_EQ(f.s1, gp.identity());
  EXPECT_EQ(f.w, gp.identity());
  EXPECT_EQ(f.s2, gp.identity());
  EXPECT_EQ(f.h1, gp.identity());
  EXPECT_TRUE(f.clique.empty());
  EXPECT_EQ(f.q, 0u);
}

TEST(CliqueFactorization, CancellationExample) {
  auto gp = path_uvw();
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto h = word(gp, {{1, -1}, {2, 1}});
  auto f = clique_factorize(gp, g, h);
  EXPECT_TRUE(f.clique.empty());
  EXPECT_EQ(f.w, gen(gp, 1));
  EXPECT_EQ(f.g1, gen(gp, 0));
  EXPECT_EQ(f.s1, gp.identity());
  EXPECT_EQ(f.s2, gp.identity());
  EXPECT_EQ(f.h1, gen(gp, 2));
  EXPECT_EQ(f.q, 2u);
}

TEST(CliqueFactorization, MergeExample) {
  auto gp = path_uvw();
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto h = word(gp, {{1, 1}, {2, 1}});
  auto f = clique_factorize(gp, g, h);
  EXPECT_EQ(f.clique, (std::vector<std::size_t>{1}));
  EXPECT_EQ(f.w, gp.identity());
  EXPECT_EQ(f.s1, gen(gp, 1));
  EXPECT_EQ(f.s2, gen(gp, 1));
  EXPECT_EQ(f.g1, gen(gp, 0));
  EXPECT_EQ(f.h1, gen(gp, 2));
  EXPECT_EQ(f.q, 1u);
}

TEST(CliqueFactorization, AdditiveProductHasNoOverlap) {
  auto gp = pentagon();
  auto g = word(gp, {{0, 1}, {2, 1}});
  auto h = word(gp, {{4, 1}, {1, -1}});
  ASSERT_EQ(gp.syllable_length(gp.multiply(g, h)), 4u);
  auto f = clique_factorize(gp, g, h);
  EXPECT_TRUE(f.clique.empty());
  EXPECT_EQ(f.w, gp.identity());
  EXPECT_EQ(f.q, 0u);
}

TEST(CliqueFactorization, EdgeCliqueThroughCommutingSyllables) {
  // 0 and 1 commute: a0 a1 times a1 a0 merges both, so C = {0, 1}.
  auto gp = pentagon();
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto h = word(gp, {{1, 2}, {0, 1}});
  auto f = clique_factorize(gp, g, h);
  EXPECT_EQ(f.clique, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(f.q, 2u);
  EXPECT_TRUE(factorization_violations(gp, g, h, f).empty());
}

TEST(CliqueFactorization, InvariantsOnRandomPairs) {
  auto gp = pentagon();
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 3000; ++i) {
    auto g = random_syllable_word(gp, rng() % 6, rng);
    auto h = random_syllable_word(gp, rng() % 6, rng);
    auto f = clique_factorize(gp, g, h);
    EXPECT_TRUE(factorization_violations(gp, g, h, f).empty());
    EXPECT_EQ(gp.multiply(gp.multiply(f.g1, f.s1), f.w), g);
    EXPECT_EQ(gp.multiply(gp.multiply(gp.inverse(f.w), f.s2), f.h1), h);
    EXPECT_EQ(f.q, f.clique.size() + 2 * gp.syllable_length(f.w));
  }
}

TEST(CliqueFactorization, ViolationsAreReported) {
  auto gp = path_uvw();
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto h = word(gp, {{1, 1}, {2, 1}});
  auto f = clique_factorize(gp, g, h);
  auto bad = f;
  bad.q = 3;
  EXPECT_FALSE(factorization_violations(gp, g, h, bad).empty());
  bad = f;
  bad.clique = {0, 2};
  EXPECT_FALSE(factorization_violations(gp, g, h, bad).empty());
  bad = f;
  bad.g1 = gp.identity();
  EXPECT_FALSE(factorization_violations(gp, g, h, bad).empty());
}

TEST(CliqueFactorization, RejectsForeignWords) {
  auto gp = pentagon();
  auto other = path_uvw();
  auto stray = word(gp, {{4, 1}});
  EXPECT_THROW(clique_factorize(other, stray, other.identity()), BackendMismatch);
}

// The instrumented reduction agrees with an exhaustive search of every split,
// up to the declared tie-break (largest lambda(w), then least C).
TEST(CliqueFactorization, MatchesExhaustiveOracle) {
  for (auto gp : {pentagon(), path_uvw()}) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 600; ++i) {
      auto g = random_syllable_word(gp, rng() % 4, rng, 2);
      auto h = random_syllable_word(gp, rng() % 4, rng, 2);
      auto f = clique_factorize(gp, g, h);
      auto expected = oracle::preferred_factorization(gp, g, h);
      ASSERT_TRUE(expected.has_value()) << gp.format(g) << " / " << gp.format(h);
      EXPECT_EQ(gp.syllable_length(f.w), expected->lambda_w) << gp.format(g) << " / " << gp.format(h);
      EXPECT_EQ(f.clique, expected->clique) << gp.format(g) << " / " << gp.format(h);
    }
  }
}

// Small words where an inverse of a g-syllable sits in h: exercises the cancel path densely.
TEST(CliqueFactorization, MatchesOracleOnNearInverses) {
  auto gp = pentagon();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 400; ++i) {
    auto g = random_syllable_word(gp, 1 + rng() % 3, rng, 2);
    auto tail = random_syllable_word(gp, rng() % 2, rng, 2);
    auto h = gp.multiply(gp.inverse(g), tail);
    if (gp.syllable_length(h) > 3) continue;
    auto f = clique_factorize(gp, g, h);
    auto expected = oracle::preferred_factorization(gp, g, h);
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(gp.syllable_length(f.w), expected->lambda_w);
    EXPECT_EQ(f.clique, expected->clique);
  }
}

// ---------------------------------------------------------------------------
// Relative centroid map

TEST(RelativeCentroid, Examples) {
  auto gp = path_uvw();
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto t = graph_product_rc(gp, g, g);
  EXPECT_EQ(t, (RcTriple<SyllableWord>{g, g, g}));

  auto merged = graph_product_rc(gp, g, word(gp, {{0, 1}, {1, 2}, {2, 1}}));
  EXPECT_EQ(merged.alpha, gen(gp, 0));
  EXPECT_EQ(merged.beta, word(gp, {{0, 1}, {1, 1}}));
  EXPECT_EQ(merged.gamma, word(gp, {{0, 1}, {1, 2}}));

  auto cancelled = graph_product_rc(gp, g, word(gp, {{0, 1}, {2, 1}}));
  EXPECT_EQ(cancelled, (RcTriple<SyllableWord>{gen(gp, 0), gen(gp, 0), gen(gp, 0)}));
}

TEST(RelativeCentroid, TriplesLieInACliqueCoset) {
  auto gp = pentagon();
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    auto g = random_syllable_word(gp, rng() % 5, rng);
    auto k = random_syllable_word(gp, rng() % 5, rng);
    auto t = graph_product_rc(gp, g, k);
    auto f = clique_factorize(gp, g, gp.multiply(gp.inverse(g), k));
    auto ai = gp.inverse(t.alpha);
    EXPECT_TRUE(gp.in_subgroup(gp.multiply(ai, t.beta), f.clique));
    EXPECT_TRUE(gp.in_subgroup(gp.multiply(ai, t.gamma), f.clique));
  }
}

TEST(RelativeCentroid, Rc4OnRandomPairs) {
  Group G(pentagon());
  const auto& gp = G.as<GraphProduct>("test");
  auto rc = clique_rc_map(G);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    Element g = random_syllable_word(gp, rng() % 6, rng);
    Element k = random_syllable_word(gp, rng() % 6, rng);
    EXPECT_TRUE(verify_rc4(G, rc, g, k));
  }
  Element g = word(gp, {{0, 1}, {1, 1}});
  auto same = rc4_report(G, rc, g, g);
  EXPECT_EQ(same.d_alpha_beta, Rational(0));
  EXPECT_EQ(same.d_alpha_gamma, Rational(0));
  EXPECT_EQ(same.d_beta_gamma, Rational(0));
}

TEST(RelativeCentroid, Rc4MergeExampleDistance) {
  auto gp = path_uvw();
  auto rc = clique_rc_map(gp);
  auto g = word(gp, {{0, 1}, {1, 1}});
  auto rep = rc4_report(gp, rc, g, word(gp, {{0, 1}, {1, 2}, {2, 1}}));
  EXPECT_EQ(rep.d_alpha_beta, gp.length(gen(gp, 1)));
  EXPECT_LE(rep.d_alpha_beta, rep.length_g);
  EXPECT_TRUE(rep.holds);
}

TEST(RelativeCentroid, TrivialCounts) {
  auto gp = pentagon();
  auto rc = clique_rc_map(gp);
  auto k = word(gp, {{0, 1}, {2, -1}});
  EXPECT_EQ(verify_rc(gp, rc, RcMode::rc1, k, Rational(0)).count, 1u);
  EXPECT_EQ(verify_rc(gp, rc, RcMode::rc3, gp.identity(), Rational(2)).count, 1u);
}

TEST(RelativeCentroid, CountsMatchOrderedRecount) {
  auto gp = pentagon();
  auto rc = clique_rc_map(gp);
  auto domain = ball(gp, Rational(2)).elements;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 6; ++i) {
    auto p = random_syllable_word(gp, 2, rng);
    std::set<std::pair<SyllableWord, SyllableWord>> r1, r2, r3;
    for (const auto& x : domain) {
      auto t1 = graph_product_rc(gp, x, p);
      r1.insert({t1.alpha, t1.gamma});
      auto t2 = graph_product_rc(gp, p, x);
      r2.insert({t2.alpha, t2.beta});
      auto t3 = graph_product_rc(gp, x, gp.multiply(x, p));
      auto xi = gp.inverse(x);
      r3.insert({gp.multiply(xi, t3.beta), gp.multiply(xi, t3.gamma)});
    }
    EXPECT_EQ(verify_rc(gp, rc, RcMode::rc1, p, Rational(2)).count, r1.size());
    EXPECT_EQ(verify_rc(gp, rc, RcMode::rc2, p, Rational(2)).count, r2.size());
    EXPECT_EQ(verify_rc(gp, rc, RcMode::rc3, p, Rational(2)).count, r3.size());
  }
}

TEST(RelativeCentroid, Rc2MonotoneInRadius) {
  auto gp = pentagon();
  auto rc = clique_rc_map(gp);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    auto g = random_syllable_word(gp, 1 + rng() % 3, rng);
    auto small = verify_rc(gp, rc, RcMode::rc2, g, Rational(1));
    auto large = verify_rc(gp, rc, RcMode::rc2, g, Rational(2));
    EXPECT_LE(small.count, large.count);
    EXPECT_TRUE(large.truncated);
    EXPECT_TRUE(large.stabilized.has_value());
  }
}

// Torsion vertex groups let a merge cancel; every pair within two generator
// steps of 1 in a mixed triangle product agrees with the oracle.
TEST(CliqueFactorization, MatchesOracleWithCyclicVertices) {
  GraphProduct gp({infinite_cyclic(), VertexGroup(CyclicGroup(3)), VertexGroup(CyclicGroup(2))}, {{0, 1}, {1, 2}, {0, 2}});
  std::set<SyllableWord> words{gp.identity()};
  for (int step = 0; step < 2; ++step) {
    std::set<SyllableWord> next = words;
    for (const auto& x : words)
      for (const auto& m : gp.moves()) next.insert(gp.multiply(x, m));
    words = std::move(next);
  }
  std::size_t compared = 0;
  for (const auto& g : words)
    for (const auto& h : words) {
      auto f = clique_factorize(gp, g, h);
      EXPECT_TRUE(factorization_violations(gp, g, h, f).empty());
      auto expected = oracle::preferred_factorization(gp, g, h);
      ASSERT_TRUE(expected.has_value());
      EXPECT_EQ(gp.syllable_length(f.w), expected->lambda_w) << gp.format(g) << " / " << gp.format(h);
      EXPECT_EQ(f.clique, expected->clique) << gp.format(g) << " / " << gp.format(h);
      ++compared;
    }
  EXPECT_EQ(compared, words.size() * words.size());
  EXPECT_GE(words.size(), 16u);
}
