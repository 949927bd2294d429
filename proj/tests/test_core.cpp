#include <gtest/gtest.h>

#include "lorgh/core.hpp"
#include "lorgh/models.hpp"
#include "support.hpp"

using namespace lorgh;
using lorgh::test::antichain;
using lorgh::test::chain;
using lorgh::test::two_point;

TEST(Validate, GeodesicTripleIsValid) {
  const auto s = chain(3);
  EXPECT_DOUBLE_EQ(s.sigma(0, 2), 2.0);
  EXPECT_TRUE(validate_lorentz(s).ok());
}

TEST(Validate, ReportsAntisymmetry) {
  auto s = two_point(1);
  s.sigma(1, 0) = 1;
  const auto r = validate_lorentz(s);
  ASSERT_FALSE(r.ok());
  bool found = false;
  for (const auto& v : r.violations) found = found || v.axiom == Axiom::Antisymmetry;
  EXPECT_TRUE(found);
}

TEST(Validate, ReportsReverseTriangle) {
  auto s = chain(3);
  s.sigma(0, 2) = 1.5, s.sigma(2, 0) = -1.5;
  const auto r = validate_lorentz(s);
  ASSERT_EQ(r.total, 1U);
  EXPECT_EQ(r.violations[0].axiom, Axiom::ReverseTriangle);
  EXPECT_NEAR(r.violations[0].amount, 0.5, 1e-12);
}

TEST(Validate, SprinkledDiamond) {
  EXPECT_TRUE(validate_lorentz(lorgh::test::small_sprinkle(200, 11)).ok());
}

TEST(Validate, NonFiniteIsMalformed) {
  auto s = two_point(1);
  s.sigma(0, 1) = std::nan("");
  EXPECT_THROW(validate_lorentz(s), MalformedInput);
}

TEST(Validate, CausalMatrixChecked) {
  auto s = two_point(1);
  BitMatrix c(2);
  c.set(0, 0), c.set(1, 1);  // misses the chronological pair
  s.causal = c;
  const auto r = validate_lorentz(s);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations[0].axiom, Axiom::CausalMissesChronology);
}

TEST(Chronology, TwoPoints) {
  const auto c = chronological_pairs(two_point(1));
  EXPECT_TRUE(c.test(0, 1));
  EXPECT_FALSE(c.test(1, 0));
  EXPECT_FALSE(c.test(0, 0));
}

TEST(Chronology, AntichainEmpty) {
  const auto c = chronological_pairs(antichain(5));
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(c.count_row(i), 0U);
}

TEST(Chronology, SprinkleMatchesLightcones) {
  const auto s = lorgh::test::small_sprinkle(150, 4);
  const auto c = chronological_pairs(s);
  const auto& L = *s.labels;
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j) {
      const double dt = L[j][0] - L[i][0], dx = L[j][1] - L[i][1];
      EXPECT_EQ(c.test(i, j), dt > 0 && dt * dt - dx * dx > 1e-18) << i << "," << j;
    }
}

TEST(DerivedCausal, TwoPoints) {
  const auto c = derived_causal(two_point(1));
  EXPECT_TRUE(c.test(0, 0) && c.test(1, 1) && c.test(0, 1));
  EXPECT_FALSE(c.test(1, 0));
}

TEST(DerivedCausal, LatticeKeepsNullPairs) {
  const auto L = lattice(2, 1, 1);
  const auto J = derived_causal(L);
  const auto I = chronological_pairs(L);
  std::size_t null_pairs = 0;
  for (Index a = 0; a < L.size(); ++a)
    for (Index b = 0; b < L.size(); ++b) {
      const auto& x = (*L.labels)[a];
      const auto& y = (*L.labels)[b];
      const bool null = a != b && y[0] > x[0] && std::abs(std::abs(y[1] - x[1]) - (y[0] - x[0])) < 1e-12;
      if (null) {
        ++null_pairs;
        EXPECT_TRUE(J.test(a, b));
        EXPECT_FALSE(I.test(a, b));
      }
    }
  EXPECT_GT(null_pairs, 0U);
}

TEST(DerivedCausal, EmptyRelationIsIdentity) {
  EXPECT_EQ(derived_causal(antichain(4)), BitMatrix::identity(4));
}

TEST(DerivedCausal, BadSuppliedOrderThrows) {
  auto s = antichain(3);
  BitMatrix c = BitMatrix::identity(3);
  c.set(0, 1), c.set(1, 2);  // not transitive
  s.causal = c;
  EXPECT_THROW(derived_causal(s), MalformedInput);
}

TEST(Underline, ChainKeepsMiddle) {
  const auto u = restrict_underline(chain(3));
  ASSERT_EQ(u.size(), 1U);
  EXPECT_EQ(u.points[0], chain(3).points[1]);
}

TEST(Underline, AntichainEmpty) { EXPECT_EQ(restrict_underline(antichain(4)).size(), 0U); }

TEST(Underline, SlabMatchesCoordinates) {
  const auto s = sprinkle_n(Region::slab(1, 1, 1), 300, 8);
  const auto keep = underline_indices(s);
  const auto& L = *s.labels;
  std::vector<char> has_fut(s.size(), 0), has_past(s.size(), 0);
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j)
      if (minkowski_sigma(L[i], L[j]) > kTol) has_fut[i] = has_past[j] = 1;
  std::vector<Index> oracle;
  for (Index i = 0; i < s.size(); ++i)
    if (has_fut[i] && has_past[i]) oracle.push_back(i);
  EXPECT_EQ(keep, oracle);
}

// On a finite space the second pass sees a new boundary, so restriction is not
// idempotent; it is idempotent on the index set measured in the ambient space.
TEST(Underline, SecondPassPeelsNewBoundary) {
  EXPECT_EQ(restrict_underline(restrict_underline(chain(3))).size(), 0U);
  const auto s = lorgh::test::small_sprinkle(120, 2);
  const auto keep = underline_indices(s);
  const auto u = subspace(s, keep);
  EXPECT_LE(underline_indices(u).size(), keep.size());
  for (Index i : keep) EXPECT_TRUE(has_past(s, i, kTol) && has_future(s, i, kTol));
}

TEST(Boundary, Chain) {
  const auto b = boundary_sets(chain(3));
  EXPECT_EQ(b.past, std::vector<Index>{0});
  EXPECT_EQ(b.future, std::vector<Index>{2});
}

TEST(Boundary, Antichain) {
  const auto b = boundary_sets(antichain(3));
  EXPECT_EQ(b.past.size(), 3U);
  EXPECT_EQ(b.future.size(), 3U);
}

TEST(Boundary, LatticeRows) {
  const auto L = lattice(4, 1, 1);
  const auto b = boundary_sets(L);
  std::vector<Index> bottom, top;
  for (Index i = 0; i < L.size(); ++i) {
    if ((*L.labels)[i][0] == -1.0) bottom.push_back(i);
    if ((*L.labels)[i][0] == 1.0) top.push_back(i);
  }
  EXPECT_EQ(bottom.size(), 9U);
  EXPECT_EQ(b.past, bottom);
  EXPECT_EQ(b.future, top);
}

TEST(TimeDiameter, Pair) { EXPECT_DOUBLE_EQ(tdiam(two_point(1)).value, 1.0); }

TEST(TimeDiameter, Antichain) { EXPECT_DOUBLE_EQ(tdiam(antichain(3)).value, 0.0); }

TEST(TimeDiameter, DenseSlabApproachesHeight) {
  const double a = 0.5;
  double last = 0;
  for (std::size_t n : {500, 1500, 5000}) {
    const double v = tdiam(sprinkle_n(Region::slab(1, a, 1), n, 5)).value;
    EXPECT_GT(v, last);
    EXPECT_LE(v, 2 * a);
    last = v;
  }
  EXPECT_NEAR(last, 2 * a, 0.05 * 2 * a);
}

// ---- properties

TEST(Property, ChronologyTransitiveIrreflexive) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = lorgh::test::small_sprinkle(40, seed, 1 + seed % 2);
    const auto c = chronological_pairs(s);
    for (Index i = 0; i < s.size(); ++i) {
      EXPECT_FALSE(c.test(i, i));
      c.for_each_in_row(i, [&](Index j) { c.for_each_in_row(j, [&](Index k) { EXPECT_TRUE(c.test(i, k)); }); });
    }
  }
}

TEST(Property, PointwiseLimitValidates) {
  // sigma_k from coordinates jittered by 1/k converge entrywise; every term and the limit validate
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto base = uniform_points(Region::diamond(1, 2.0), 30, rng);
    FiniteLorentzSpace limit = space_from_coords(base);
    for (int k = 1; k <= 64; k *= 2) {
      auto pts = base;
      for (auto& p : pts)
        for (double& c : p) c += rng.uniform(-1, 1) / k;
      const auto sk = space_from_coords(pts);
      ASSERT_TRUE(validate_lorentz(sk).ok());
    }
    EXPECT_TRUE(validate_lorentz(limit).ok());
    // a limit of scalings r_k -> 1 of one valid matrix
    for (double r : {2.0, 1.5, 1.25, 1.125}) ASSERT_TRUE(validate_lorentz(scale(limit, r)).ok());
  }
}
