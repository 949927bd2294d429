#include <gtest/gtest.h>

#include <cmath>

#include "lorgh/gh.hpp"
#include "lorgh/pom.hpp"
#include "support.hpp"

using namespace lorgh;
using lorgh::test::antichain;
using lorgh::test::chain;
using lorgh::test::random_pom;
using lorgh::test::small_sprinkle;

namespace {

BitMatrix grid_order(int w, int h) {
  const std::size_t n = static_cast<std::size_t>(w * h);
  BitMatrix m(n);
  for (int a = 0; a < w * h; ++a)
    for (int b = 0; b < w * h; ++b)
      if (a % w <= b % w && a / w <= b / w) m.set(static_cast<Index>(a), static_cast<Index>(b));
  return m;
}

BitMatrix total_order(std::size_t n) {
  BitMatrix m(n);
  for (Index a = 0; a < n; ++a)
    for (Index b = a; b < n; ++b) m.set(a, b);
  return m;
}

// Quantifiers written out literally.
BitMatrix beta_oracle(const BitMatrix& le) {
  const std::size_t n = le.size();
  auto lt = [&](Index a, Index b) { return a != b && le.test(a, b); };
  auto cmp = [&](Index a, Index b) { return le.test(a, b) || le.test(b, a); };
  BitMatrix out(n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      if (!lt(x, y)) continue;
      bool hit = false;
      for (Index u = 0; u < n && !hit; ++u)
        for (Index v = 0; v < n && !hit; ++v) {
          if (!(lt(x, u) && lt(u, v) && lt(v, y))) continue;
          for (Index a = 0; a < n && !hit; ++a)
            for (Index b = 0; b < n && !hit; ++b)
              hit = le.test(u, a) && le.test(a, v) && le.test(u, b) && le.test(b, v) && !cmp(a, b);
        }
      if (hit) out.set(x, y);
    }
  return out;
}

BitMatrix gamma_oracle(const BitMatrix& le) {
  const std::size_t n = le.size();
  auto lt = [&](Index a, Index b) { return a != b && le.test(a, b); };
  BitMatrix out(n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      bool ok = true;
      for (Index a = 0; a < n && ok; ++a) {
        if (!lt(p, a)) continue;
        bool e = false;
        for (Index b = 0; b < n && !e; ++b) e = lt(b, a) && lt(p, b) && le.test(b, q);
        ok = e;
      }
      for (Index c = 0; c < n && ok; ++c) {
        if (!lt(c, q)) continue;
        bool e = false;
        for (Index d = 0; d < n && !e; ++d) e = lt(c, d) && lt(d, q) && le.test(p, d);
        ok = e;
      }
      if (ok) out.set(p, q);
    }
  return out;
}

void expect_pseudometric(const SquareMatrix<double>& d) {
  for (Index i = 0; i < d.size(); ++i) {
    ASSERT_EQ(d(i, i), 0.0);
    for (Index j = 0; j < d.size(); ++j) {
      ASSERT_EQ(d(i, j), d(j, i));
      for (Index k = 0; k < d.size(); ++k) ASSERT_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
    }
  }
}

}  // namespace

TEST(PhiFp, IdentitySupIsSupMetric) {
  const auto s = small_sprinkle(30, 1);
  EXPECT_EQ(phi_fp(s, [](double v) { return v; }, Norm::Sup).d, sup_metric(s.sigma));
}

TEST(PhiFp, SignOnTwoChain) {
  const auto s = chain(2);
  const auto d = phi_fp(s, [](double v) { return double((v > 0) - (v < 0)); }, Norm::L2);
  EXPECT_DOUBLE_EQ(d.d(0, 1), std::sqrt(2.0));
}

TEST(PhiFp, ConstantIsZero) {
  const auto d = phi_fp(small_sprinkle(20, 2), [](double) { return 3.0; }, Norm::L2);
  for (double v : d.d.data()) EXPECT_EQ(v, 0.0);
}

TEST(PhiFp, L2NeedsWeights) {
  auto s = chain(2);
  s.mu.reset();
  EXPECT_THROW(phi_fp(s, [](double v) { return v; }, Norm::L2), InvalidArgument);
  EXPECT_NO_THROW(phi_fp(s, [](double v) { return v; }, Norm::Sup));
}

TEST(Dr, TwoChain) {
  const auto s = chain(2);
  EXPECT_DOUBLE_EQ(d_r(s, -1).d(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(d_r(s, 1).d(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(d_r(s, 0).d(0, 1), std::sqrt(2.0) / 2);
  EXPECT_THROW(d_r(s, 1.5), InvalidArgument);
  EXPECT_THROW(f_r(-1.01), InvalidArgument);
}

TEST(Dr, PomAndSpaceAgree) {
  const auto s = small_sprinkle(40, 3);
  const auto p = to_pom(s);
  for (double r : {-1.0, -0.5, 0.0, 0.25, 1.0}) {
    const auto a = d_r(s, r), b = d_r(p, r);
    for (Index i = 0; i < s.size(); ++i)
      for (Index j = 0; j < s.size(); ++j) EXPECT_NEAR(a.d(i, j), b.d(i, j), 1e-12);
  }
}

TEST(Dr, Pseudometric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_pom(30, seed);
    for (double r : {-1.0, -0.5, 0.0, 0.5, 1.0}) expect_pseudometric(d_r(p, r).d);
  }
}

TEST(Dr, EndpointsVanishOnEqualCones) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_pom(25, seed, 0.15);
    const auto c = cones_of(p);
    const auto dp = d_r(p, 1), dm = d_r(p, -1);
    for (Index i = 0; i < p.size(); ++i)
      for (Index j = 0; j < p.size(); ++j) {
        bool same_fut = true, same_past = true;
        for (Index z = 0; z < p.size(); ++z) {
          same_fut = same_fut && c.fut.test(i, z) == c.fut.test(j, z);
          same_past = same_past && c.past.test(i, z) == c.past.test(j, z);
        }
        EXPECT_EQ(dp.d(i, j) == 0, same_fut) << i << "," << j;
        EXPECT_EQ(dm.d(i, j) == 0, same_past) << i << "," << j;
      }
  }
}

TEST(Dr, EndpointIsSymmetricDifference) {
  const auto p = random_pom(30, 4);
  const auto c = cones_of(p);
  const auto dm = d_r(p, -1);
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < p.size(); ++j) {
      double sd = 0;
      for (Index z = 0; z < p.size(); ++z) sd += c.past.test(i, z) != c.past.test(j, z) ? p.mu[z] : 0.0;
      EXPECT_NEAR(dm.d(i, j), std::sqrt(sd), 1e-12);
    }
}

TEST(Recovery, RandomPoms) {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = random_pom(5 + seed % 46, seed, 0.05 + 0.01 * static_cast<double>(seed % 30));
    const auto c = cones_of(p);
    for (Index a = 0; a < p.size(); ++a)
      for (Index b = 0; b < p.size(); ++b) {
        const auto r = check_recovery_identity(c, a, b);
        worst = std::max({worst, r.plus, r.minus});
      }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Recovery, Trivial) {
  const auto one = chain(1);
  const auto r = check_recovery_identity(one, 0, 0);
  EXPECT_EQ(r.plus, 0.0);
  EXPECT_EQ(r.minus, 0.0);
  const auto s = small_sprinkle(20, 5);
  const auto r2 = check_recovery_identity(s, 3, 3);
  EXPECT_EQ(r2.plus + r2.minus, 0.0);
}

TEST(Harvest, IdentityOnRandomPoms) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = random_pom(30, seed);
    const auto c = cones_of(p);
    for (Index a = 0; a < p.size(); ++a)
      for (Index b = 0; b < p.size(); ++b) {
        const auto h = harvest_value(c, a, b);
        ASSERT_LT(h.residual(), 1e-9);
        ASSERT_EQ(h.self_cross, 0.0);
      }
  }
}

// The harvest is twice the weight of the open interval between the two points.
TEST(Harvest, EqualsTwiceOpenInterval) {
  const auto s = small_sprinkle(120, 6);
  const auto c = cones_of(s);
  for (Index a = 0; a < s.size(); ++a)
    for (Index b = 0; b < s.size(); ++b) {
      double w = 0;
      for (Index z = 0; z < s.size(); ++z)
        if ((c.fut.test(a, z) && c.past.test(b, z)) || (c.fut.test(b, z) && c.past.test(a, z))) w += (*s.mu)[z];
      EXPECT_NEAR(harvest_value(c, a, b).value, 2 * w, 1e-9);
    }
}

TEST(Harvest, Examples) {
  const auto s = chain(3);
  EXPECT_GT(harvest_value(s, 0, 2).value, 0.0);
  EXPECT_EQ(harvest_value(antichain(4), 0, 2).value, 0.0);
}

TEST(Detect, TrivialCases) {
  const auto s = small_sprinkle(50, 7);
  for (Index i = 0; i < s.size(); ++i) EXPECT_FALSE(detect_chron(s, i, i));
  const auto A = antichain(6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) EXPECT_FALSE(detect_chron(A, i, j));
}

TEST(Detect, SymmetricAndMatchesPairwise) {
  const auto s = small_sprinkle(80, 8);
  const auto all = detect_chron_all(s);
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j) {
      EXPECT_EQ(all.test(i, j), all.test(j, i));
      EXPECT_EQ(all.test(i, j), detect_chron(s, i, j));
    }
}

// Detection finds exactly the related pairs whose open interval carries weight;
// links (empty open interval) are invisible to the harvest.
TEST(Detect, RelatedPairsWithNonemptyInterior) {
  const auto s = sprinkle_n(Region::diamond(1, 2.0), 300, 9);
  const auto I = chronological_pairs(s);
  const auto det = detect_chron_all(s);
  std::size_t related = 0, links = 0;
  for (Index a = 0; a < s.size(); ++a)
    for (Index b = 0; b < s.size(); ++b) {
      const bool rel = I.test(a, b) || I.test(b, a);
      bool inner = false;
      for (Index z = 0; z < s.size() && !inner; ++z)
        inner = (I.test(a, z) && I.test(z, b)) || (I.test(b, z) && I.test(z, a));
      EXPECT_EQ(det.test(a, b), rel && inner);
      related += rel;
      links += rel && !inner;
    }
  EXPECT_GT(related, links);
  EXPECT_GT(links, 0U);
}

TEST(Orient, SprinkledChain) {
  const auto s = sprinkle_n(Region::diamond(1, 2.0), 200, 10);
  const auto I = chronological_pairs(s);
  const auto& L = *s.labels;
  // greedy chain: from the earliest point, step to the earliest point of its future
  Index cur = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (L[i][0] < L[cur][0]) cur = i;
  CausalChain ch{{cur}};
  for (;;) {
    Index next = s.size();
    I.for_each_in_row(cur, [&](Index j) {
      if (next == s.size() || L[j][0] < L[next][0]) next = j;
    });
    if (next == s.size()) break;
    ch.idx.push_back(cur = next);
  }
  ASSERT_GE(ch.idx.size(), 3U);
  EXPECT_EQ(orient_chain(s, ch), Orientation::Future);
  std::reverse(ch.idx.begin(), ch.idx.end());
  EXPECT_EQ(orient_chain(s, ch), Orientation::Past);
  EXPECT_THROW(orient_chain(s, CausalChain{{cur}}), InvalidArgument);
}

TEST(Orient, UnrelatedStepThrows) {
  EXPECT_THROW(orient_chain(antichain(3), CausalChain{{0, 1}}), InvalidArgument);
}

TEST(Beta, TotalOrderEmpty) {
  const auto b = beta_relation(total_order(8));
  for (Index i = 0; i < 8; ++i) EXPECT_EQ(b.count_row(i), 0U);
}

TEST(Beta, GridMatchesOracle) {
  const auto g = grid_order(4, 4);
  const auto b = beta_relation(g);
  EXPECT_EQ(b, beta_oracle(g));
  EXPECT_TRUE(b.test(0, 15));  // corners: the interior diamond (1,1)-(2,2) holds an incomparable pair
  for (Index x = 0; x < 16; ++x)
    for (Index y = 0; y < 16; ++y)
      if (b.test(x, y)) {
        EXPECT_TRUE(x != y && g.test(x, y));
      }
}

TEST(Beta, RandomOrdersMatchOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_pom(12, seed, 0.4);
    ASSERT_EQ(beta_relation(p.leq), beta_oracle(p.leq)) << seed;
  }
}

TEST(Gamma, Oracles) {
  EXPECT_EQ(gamma_relation(total_order(6)), gamma_oracle(total_order(6)));
  EXPECT_EQ(gamma_relation(grid_order(4, 3)), gamma_oracle(grid_order(4, 3)));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_pom(12, seed, 0.4);
    ASSERT_EQ(gamma_relation(p.leq), gamma_oracle(p.leq)) << seed;
  }
}

TEST(Gamma, DiscreteOrderIsVacuous) {
  // with only the diagonal both quantifiers range over nothing, so every pair qualifies
  const auto g = gamma_relation(BitMatrix::identity(4));
  EXPECT_EQ(g, gamma_oracle(BitMatrix::identity(4)));
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(g.count_row(i), 4U);
}

TEST(Pomc, Cases) {
  FinitePOM p;
  p.points = default_ids(16);
  p.leq = grid_order(4, 4);
  p.mu.assign(16, 1.0);
  EXPECT_TRUE(pomc_check(p));
  p.mu.assign(16, 0.0);
  EXPECT_FALSE(pomc_check(p));
  EXPECT_TRUE(pomc_check(to_pom(small_sprinkle(60, 11))));
}
