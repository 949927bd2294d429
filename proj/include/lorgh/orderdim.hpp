#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lorgh/core.hpp"

namespace lorgh {

// ---------------------------------------------------------- Dushnik-Miller

struct Realizer {
  std::vector<std::vector<Index>> orders;  // each a linear extension, listed bottom to top
};

// True iff every order extends leq and their intersection is exactly leq.
inline bool verify_realizer(const BitMatrix& leq, const Realizer& R) {
  const std::size_t n = leq.size();
  std::vector<std::vector<std::size_t>> pos;
  for (const auto& L : R.orders) {
    if (L.size() != n) return false;
    std::vector<std::size_t> p(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      if (L[k] >= n || p[L[k]] != n) return false;
      p[L[k]] = k;
    }
    pos.push_back(std::move(p));
  }
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      bool all = true;
      for (const auto& p : pos) all = all && p[x] <= p[y];
      if (all != leq.test(x, y)) return false;
    }
  return true;
}

struct DushnikMillerResult {
  int dimension = 0;
  Realizer realizer;
};

namespace detail {

using Rows = std::vector<std::uint32_t>;  // row x: bitmask of y with x <= y

inline Rows rows_of(const BitMatrix& leq) {
  Rows r(leq.size(), 0);
  for (Index x = 0; x < leq.size(); ++x)
    leq.for_each_in_row(x, [&](Index y) { r[x] |= std::uint32_t{1} << y; });
  return r;
}

// add y <= x to a closed order (caller checks that x <= y does not hold)
inline void add_relation(Rows& r, Index y, Index x) {
  const std::uint32_t up = r[x];
  for (Index a = 0; a < r.size(); ++a)
    if ((r[a] >> y) & 1U) r[a] |= up;
}

inline std::vector<Index> linear_extension(const Rows& r) {
  const std::size_t n = r.size();
  std::vector<Index> out;
  std::vector<char> used(n, 0);
  while (out.size() < n) {
    for (Index v = 0; v < n; ++v) {
      if (used[v]) continue;
      bool minimal = true;
      for (Index u = 0; u < n && minimal; ++u)
        if (!used[u] && u != v && ((r[u] >> v) & 1U)) minimal = false;
      if (minimal) {
        used[v] = 1;
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Least k <= max_k such that the incomparable ordered pairs (x above y) can be split into
// k classes, each consistent with leq after closure; the classes' linear extensions
// then form a realizer.
inline DushnikMillerResult dushnik_miller(const BitMatrix& leq, int max_k = 6, std::size_t max_n = 10) {
  const std::size_t n = leq.size();
  if (n > max_n || n > 32) throw BoundExceeded("dushnik_miller: " + std::to_string(n) + " points exceed the search bound " + std::to_string(max_n));
  if (auto d = partial_order_defect(leq); !d.empty()) throw MalformedInput("order " + d);
  const detail::Rows base = detail::rows_of(leq);
  std::vector<std::pair<Index, Index>> pairs;  // need some class with y below x
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (x != y && !leq.test(x, y) && !leq.test(y, x)) pairs.emplace_back(x, y);

  for (int k = 1; k <= max_k; ++k) {
    std::vector<detail::Rows> cls(static_cast<std::size_t>(k), base);
    std::function<bool(std::size_t, int)> rec = [&](std::size_t i, int used) -> bool {
      if (i == pairs.size()) return true;
      const auto [x, y] = pairs[i];
      for (int c = 0; c < used; ++c)
        if ((cls[c][y] >> x) & 1U) return rec(i + 1, used);  // already satisfied
      const int limit = std::min(k, used + 1);  // classes are interchangeable
      for (int c = 0; c < limit; ++c) {
        if ((cls[c][x] >> y) & 1U) continue;
        const detail::Rows saved = cls[c];
        detail::add_relation(cls[c], y, x);
        if (rec(i + 1, std::max(used, c + 1))) return true;
        cls[c] = saved;
      }
      return false;
    };
    if (rec(0, 0)) {
      DushnikMillerResult res;
      res.dimension = k;
      for (const auto& c : cls) res.realizer.orders.push_back(detail::linear_extension(c));
      return res;
    }
  }
  throw BoundExceeded("dushnik_miller: no realizer with at most " + std::to_string(max_k) + " orders");
}

struct DimsReport {
  int dushnik_miller = 0;
  std::size_t utility_size = 0;
  bool utility_verified = false;  // x <= y iff f_i(x) <= f_i(y) for all i
};

// On a finite poset the ranks in a minimal realizer form a real-valued utility of the same size.
inline DimsReport finite_dims_coincide(const BitMatrix& leq, int max_k = 6) {
  const auto dm = dushnik_miller(leq, max_k);
  const std::size_t n = leq.size();
  std::vector<std::vector<double>> f;
  for (const auto& L : dm.realizer.orders) {
    std::vector<double> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[L[k]] = static_cast<double>(k);
    f.push_back(std::move(rank));
  }
  bool ok = true;
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      bool all = true;
      for (const auto& g : f) all = all && g[x] <= g[y];
      ok = ok && (all == leq.test(x, y));
    }
  return {dm.dimension, f.size(), ok};
}

// Boolean lattice of subsets of an m-element set under inclusion.
inline BitMatrix boolean_lattice(std::size_t m) {
  const std::size_t n = std::size_t{1} << m;
  BitMatrix leq(n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      if ((a & b) == a) leq.set(a, b);
  return leq;
}

// ------------------------------------------------------------- horismos

struct Horismos {
  BitMatrix plus;   // plus(a, q): q in J^+(a) \ I^+(a), q != a
  BitMatrix minus;  // minus(a, q): q in J^-(a) \ I^-(a), q != a
};

inline Horismos horismos(const FiniteLorentzSpace& s, double tol = kTol) {
  if (!s.causal) throw InvalidArgument("horismos needs an exact causal matrix");
  const BitMatrix J = derived_causal(s, tol);
  const BitMatrix I = chronological_pairs(s, tol);
  BitMatrix plus(s.size());
  for (Index a = 0; a < s.size(); ++a)
    J.for_each_in_row(a, [&](Index q) {
      if (q != a && !I.test(a, q)) plus.set(a, q);
    });
  return {plus, plus.transposed()};
}

struct HorismoticityResult {
  int value = 0;
  std::vector<std::pair<Index, int>> witness;  // (a, +1 for E^+(a) or −1 for E^-(a))
};

inline HorismoticityResult horismoticity(const FiniteLorentzSpace& s, Index p, int max_a, double tol = kTol) {
  const Horismos H = horismos(s, tol);
  const std::size_t n = s.size();
  std::vector<std::pair<Index, int>> cand;  // sets E^±(a) containing p
  for (Index a = 0; a < n; ++a) {
    if (H.plus.test(a, p)) cand.emplace_back(a, +1);
    if (H.minus.test(a, p)) cand.emplace_back(a, -1);
  }
  const std::size_t W = H.plus.words_per_row();
  auto row = [&](const std::pair<Index, int>& c) { return (c.second > 0 ? H.plus : H.minus).row(c.first); };
  std::vector<BitMatrix::Word> target(W, 0);
  target[p >> 6] = BitMatrix::Word{1} << (p & 63);
  for (int k = 1; k <= max_a && static_cast<std::size_t>(k) <= cand.size(); ++k) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(k));
    std::vector<std::vector<BitMatrix::Word>> acc(static_cast<std::size_t>(k) + 1, std::vector<BitMatrix::Word>(W, ~BitMatrix::Word{0}));
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) -> bool {
      if (depth == static_cast<std::size_t>(k)) return acc[depth] == target;
      for (std::size_t c = from; c < cand.size(); ++c) {
        auto r = row(cand[c]);
        for (std::size_t w = 0; w < W; ++w) acc[depth + 1][w] = acc[depth][w] & r[w];
        // mask the padding bits of the last word
        if (n % 64) acc[depth + 1][W - 1] &= (BitMatrix::Word{1} << (n % 64)) - 1;
        pick[depth] = c;
        if (rec(depth + 1, c + 1)) return true;
      }
      return false;
    };
    if (rec(0, 0)) {
      HorismoticityResult res{k, {}};
      for (std::size_t c : pick) res.witness.push_back(cand[c]);
      return res;
    }
  }
  throw BoundExceeded("horismoticity: no horismos intersection of at most " + std::to_string(max_a) + " sets isolates the point");
}

struct BlumenthalResult {
  int value = 0;
  std::vector<Index> witness;
};

// Least |A|, A ⊂ M \ {p}, such that matching all distances to A forces q = p.
inline BlumenthalResult blumenthal_dim(const FiniteMetricSpace& M, Index p, int max_a, double tol = 1e-9) {
  const std::size_t n = M.size();
  if (p >= n) throw InvalidArgument("blumenthal_dim: point out of range");
  std::vector<Index> others;
  for (Index q = 0; q < n; ++q)
    if (q != p) others.push_back(q);
  if (others.empty()) return {0, {}};
  auto same = [&](double u, double v) { return std::abs(u - v) <= tol * std::max(1.0, std::abs(v)); };
  for (int k = 1; k <= max_a && static_cast<std::size_t>(k) <= others.size(); ++k) {
    std::vector<Index> pick;
    std::function<bool(std::size_t, std::vector<Index>)> rec = [&](std::size_t from, std::vector<Index> alive) -> bool {
      if (pick.size() == static_cast<std::size_t>(k)) return alive.empty();
      for (std::size_t c = from; c < others.size(); ++c) {
        const Index a = others[c];
        std::vector<Index> next;
        for (Index q : alive)
          if (same(M.d(q, a), M.d(p, a))) next.push_back(q);
        pick.push_back(a);
        if (rec(c + 1, std::move(next))) return true;
        pick.pop_back();
      }
      return false;
    };
    if (rec(0, others)) return {k, pick};
  }
  throw BoundExceeded("blumenthal_dim: no set of at most " + std::to_string(max_a) + " points determines the point");
}

struct EmbeddingCheck {
  bool embedding = false;   // injective and a <= b iff f(a) <= f(b)
  bool increasing = false;  // a <= b implies f(a) <= f(b)
};

inline EmbeddingCheck check_order_embedding(const std::vector<Index>& f, const BitMatrix& dom, const BitMatrix& cod) {
  if (f.size() != dom.size()) throw InvalidArgument("check_order_embedding: assignment is not total");
  for (Index v : f)
    if (v >= cod.size()) throw InvalidArgument("check_order_embedding: image index out of range");
  EmbeddingCheck r{true, true};
  for (Index a = 0; a < f.size(); ++a)
    for (Index b = 0; b < f.size(); ++b) {
      const bool x = dom.test(a, b), y = cod.test(f[a], f[b]);
      if (x && !y) r.increasing = false;
      if (x != y || (a != b && f[a] == f[b])) r.embedding = false;
    }
  return r;
}

// --------------------------------------------------------------- catchers

namespace detail {

struct CatcherSetup {
  std::vector<Index> candidates;        // J^+(a) \ I^-(c)
  std::vector<Index> bad;               // J^±(b) \ J^∓(d): points that must be caught
  std::vector<std::vector<char>> hits;  // hits[v][k]: bad[k] in I^±(candidate v)
};

inline CatcherSetup catcher_setup(const FiniteLorentzSpace& s, Index a, Index b, Index c, Index d, int sign,
                                  double tol) {
  const BitMatrix I = chronological_pairs(s, tol);
  if (!(I.test(a, b) && I.test(b, c) && I.test(c, d))) throw InvalidArgument("catcher: (a,b,c,d) is not a chronological chain");
  const BitMatrix J = derived_causal(s, tol);
  CatcherSetup st;
  for (Index v = 0; v < s.size(); ++v) {
    if (J.test(a, v) && !I.test(v, c)) st.candidates.push_back(v);
    const bool in_b = sign > 0 ? J.test(b, v) : J.test(v, b);
    const bool in_d = sign > 0 ? J.test(v, d) : J.test(d, v);
    if (in_b && !in_d) st.bad.push_back(v);
  }
  for (Index v : st.candidates) {
    std::vector<char> h(st.bad.size());
    for (std::size_t k = 0; k < st.bad.size(); ++k) h[k] = sign > 0 ? I.test(v, st.bad[k]) : I.test(st.bad[k], v);
    st.hits.push_back(std::move(h));
  }
  return st;
}

}  // namespace detail

// V ⊂ J^+(a) \ I^-(c) with J^±(b) \ I^±(V) ⊂ J^∓(d).
inline bool is_catcher_set(const FiniteLorentzSpace& s, const std::vector<Index>& V, Index a, Index b, Index c,
                           Index d, int sign, double tol = kTol) {
  const auto st = detail::catcher_setup(s, a, b, c, d, sign, tol);
  const BitMatrix I = chronological_pairs(s, tol);
  for (Index v : V)
    if (std::find(st.candidates.begin(), st.candidates.end(), v) == st.candidates.end()) return false;
  for (Index x : st.bad) {
    bool caught = false;
    for (Index v : V) caught = caught || (sign > 0 ? I.test(v, x) : I.test(x, v));
    if (!caught) return false;
  }
  return true;
}

struct CatcherResult {
  int value = 0;
  std::vector<Index> witness;
};

// Minimum catcher cardinality by brute force over candidate subsets, after discarding
// candidates whose catch is contained in another candidate's.
inline CatcherResult min_catcher(const FiniteLorentzSpace& s, Index a, Index b, Index c, Index d, int sign,
                                 int max_v, double tol = kTol) {
  const auto st = detail::catcher_setup(s, a, b, c, d, sign, tol);
  if (st.bad.empty()) return {0, {}};
  const std::size_t m = st.bad.size();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < st.candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < st.candidates.size() && !dominated; ++j) {
      if (i == j) continue;
      bool sub = true, equal = true;
      for (std::size_t k = 0; k < m; ++k) {
        if (st.hits[i][k] && !st.hits[j][k]) sub = false;
        if (st.hits[i][k] != st.hits[j][k]) equal = false;
      }
      if (sub && (!equal || j < i)) dominated = true;
    }
    bool any = false;
    for (char h : st.hits[i]) any = any || h;
    if (!dominated && any) keep.push_back(i);
  }
  for (int k = 1; k <= max_v; ++k) {
    std::vector<std::size_t> pick;
    std::vector<int> count(m, 0);
    std::size_t caught = 0;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
      if (caught == m) return true;
      if (pick.size() == static_cast<std::size_t>(k)) return false;
      for (std::size_t t = from; t < keep.size(); ++t) {
        const auto& h = st.hits[keep[t]];
        for (std::size_t q = 0; q < m; ++q)
          if (h[q] && count[q]++ == 0) ++caught;
        pick.push_back(keep[t]);
        if (rec(t + 1)) return true;
        pick.pop_back();
        for (std::size_t q = 0; q < m; ++q)
          if (h[q] && --count[q] == 0) --caught;
      }
      return false;
    };
    if (rec(0)) {
      CatcherResult r{k, {}};
      for (std::size_t i : pick) r.witness.push_back(st.candidates[i]);
      return r;
    }
  }
  throw BoundExceeded("min_catcher: no catcher set with at most " + std::to_string(max_v) + " points");
}

}  // namespace lorgh
