#pragma once

#include <cmath>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/models.hpp"
#include "lorgh/rng.hpp"

namespace lorgh::test {

// Points at times 0, 1, ..., n-1 on one worldline: sigma(i,j) = j - i.
inline FiniteLorentzSpace chain(std::size_t n, double step = 1.0) {
  std::vector<Coords> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({step * static_cast<double>(i), 0.0});
  return space_from_coords(pts, 1.0);
}

inline FiniteLorentzSpace antichain(std::size_t n) {
  std::vector<Coords> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({0.0, static_cast<double>(i)});
  return space_from_coords(pts, 1.0);
}

inline FiniteLorentzSpace two_point(double s) {
  FiniteLorentzSpace X;
  X.points = {"p", "q"};
  X.sigma = SquareMatrix<double>(2);
  X.sigma(0, 1) = s;
  X.sigma(1, 0) = -s;
  X.mu = std::vector<double>{1.0, 1.0};
  return X;
}

inline FiniteLorentzSpace small_sprinkle(std::size_t n, std::uint64_t seed, std::size_t dim = 1) {
  return sprinkle_n(Region::diamond(dim, 2.0), n, seed);
}

// Random weighted order on n points: random DAG on a random linear order, closed.
inline FinitePOM random_pom(std::size_t n, std::uint64_t seed, double density = 0.3) {
  Rng rng(seed);
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  for (Index i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  FinitePOM p;
  p.points = default_ids(n);
  p.leq = BitMatrix(n);
  for (Index i = 0; i < n; ++i) p.leq.set(i, i);
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (rng.uniform(0, 1) < density) p.leq.set(perm[a], perm[b]);
  transitive_closure_inplace(p.leq);
  for (Index i = 0; i < n; ++i) p.mu.push_back(rng.uniform(0.1, 2.0));
  return p;
}

// Space carrying a random order as its chronology, sigma = +-1 on related pairs.
// Not a Lorentzian distance in general; used where only the cones matter.
inline FiniteLorentzSpace order_as_space(const FinitePOM& p) {
  FiniteLorentzSpace s;
  s.points = p.points;
  s.sigma = SquareMatrix<double>(p.size());
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < p.size(); ++j)
      if (i != j && p.leq.test(i, j)) s.sigma(i, j) = 1, s.sigma(j, i) = -1;
  s.mu = p.mu;
  return s;
}

}  // namespace lorgh::test
