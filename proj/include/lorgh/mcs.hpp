#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/gh.hpp"
#include "lorgh/parallel.hpp"
#include "lorgh/pom.hpp"

namespace lorgh {

// Volume of the unit-proper-time causal diamond in N-dimensional Minkowski space.
inline double omega(double N) {
  if (!(N > 0)) throw InvalidArgument("omega: N must be positive");
  return std::pow(std::numbers::pi, (N - 1) / 2) / (N * std::tgamma((N + 1) / 2) * std::pow(2.0, N - 1));
}

// Order intervals J(a,b) = J^+(a) ∩ J^-(b) of a weighted order.
class IntervalIndex {
 public:
  explicit IntervalIndex(const FinitePOM& p) : leq_(p.leq), geq_(p.leq.transposed()), mu_(p.mu) {
    uniform_ = !mu_.empty() && std::all_of(mu_.begin(), mu_.end(), [&](double w) { return w == mu_[0]; });
  }

  std::size_t size() const { return leq_.size(); }
  const BitMatrix& leq() const { return leq_; }
  const BitMatrix& geq() const { return geq_; }
  const std::vector<double>& mu() const { return mu_; }
  bool le(Index a, Index b) const { return leq_.test(a, b); }
  bool lt(Index a, Index b) const { return a != b && leq_.test(a, b); }
  bool uniform() const { return uniform_; }

  std::size_t count(Index a, Index b) const { return and_count(leq_.row(a), geq_.row(b)); }
  double measure(Index a, Index b) const {
    if (uniform_) return static_cast<double>(count(a, b)) * mu_[0];
    return weight_and(mu_, leq_.row(a), geq_.row(b));
  }
  std::vector<Index> members(Index a, Index b) const {
    std::vector<Index> out;
    for (std::size_t w = 0; w < leq_.words_per_row(); ++w) {
      BitMatrix::Word x = leq_.row(a)[w] & geq_.row(b)[w];
      while (x) {
        out.push_back(w * 64 + static_cast<Index>(std::countr_zero(x)));
        x &= x - 1;
      }
    }
    return out;
  }

 private:
  BitMatrix leq_, geq_;
  std::vector<double> mu_;
  bool uniform_ = false;
};

// ------------------------------------------------------------------ covers

enum class CoverMode { Greedy, Exact };

// Which metric measures the diameter of a diamond J(p,q):
// Local  — sup over z in J(p,q) of |sigma(x,z) − sigma(y,z)|, the metric of the diamond itself;
// Global — the d^+ metric of the whole space restricted to J(p,q).
enum class DiameterMetric { Local, Global };

struct CoverByDiamonds {
  std::vector<std::pair<Index, Index>> diamonds;
};

struct CoverResult {
  double value = 0;
  CoverByDiamonds cover;
  std::string mode;
  std::size_t candidates = 0;
};

namespace detail {

struct CoverCand {
  Index p, q;
  double cost;
  std::vector<Index> hits;  // positions in A
};

// Every diamond J(p,q), p ≪ q, σ(p,q) ≤ delta and diameter ≤ delta, that meets A.
inline std::vector<CoverCand> cover_candidates(const FiniteLorentzSpace& s, const std::vector<Index>& A, double N,
                                               double delta, DiameterMetric metric, double tol) {
  const std::size_t n = s.size();
  const BitMatrix leq = derived_causal(s, tol);
  const BitMatrix geq = leq.transposed();
  SquareMatrix<double> dplus;
  if (metric == DiameterMetric::Global) dplus = sup_metric(s.sigma);
  std::vector<int> slot(n, -1);
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (A[k] >= n) throw InvalidArgument("mu_n_delta: subset index out of range");
    slot[A[k]] = static_cast<int>(k);
  }
  const double w = omega(N);
  std::vector<std::vector<CoverCand>> per_p(n);
  parallel_for(0, n, [&](Index p) {
    std::vector<Index> mem;
    std::vector<double> lo, hi;
    for (Index q = 0; q < n; ++q) {
      const double spq = s.sigma(p, q);
      if (!(spq > tol) || spq > delta) continue;
      mem.clear();
      for (std::size_t wd = 0; wd < leq.words_per_row(); ++wd) {
        BitMatrix::Word x = leq.row(p)[wd] & geq.row(q)[wd];
        while (x) {
          mem.push_back(wd * 64 + static_cast<Index>(std::countr_zero(x)));
          x &= x - 1;
        }
      }
      std::vector<Index> hits;
      for (Index v : mem)
        if (slot[v] >= 0) hits.push_back(static_cast<Index>(slot[v]));
      if (hits.empty()) continue;
      double diam = 0;
      if (metric == DiameterMetric::Local) {
        for (Index z : mem) {
          double a = kInf, b = -kInf;
          for (Index x : mem) a = std::min(a, s.sigma(x, z)), b = std::max(b, s.sigma(x, z));
          diam = std::max(diam, b - a);
        }
      } else {
        for (Index x : mem)
          for (Index y : mem) diam = std::max(diam, dplus(x, y));
      }
      if (diam > delta) continue;
      std::sort(hits.begin(), hits.end());
      per_p[p].push_back(CoverCand{p, q, w * std::pow(spq, N), std::move(hits)});
    }
  });
  std::vector<CoverCand> cands;
  for (auto& v : per_p)
    for (auto& c : v) cands.push_back(std::move(c));
  return cands;
}

}  // namespace detail

// Points of A that lie in no admissible diamond; mu_n_delta refuses such sets.
inline std::vector<Index> uncoverable_points(const FiniteLorentzSpace& s, const std::vector<Index>& A, double delta,
                                             DiameterMetric metric = DiameterMetric::Local, double tol = kTol) {
  std::vector<char> coverable(A.size(), 0);
  for (const auto& c : detail::cover_candidates(s, A, 2, delta, metric, tol))
    for (Index h : c.hits) coverable[h] = 1;
  std::vector<Index> out;
  for (std::size_t k = 0; k < A.size(); ++k)
    if (!coverable[k]) out.push_back(A[k]);
  return out;
}

// mu_{N,delta}(A): cheapest cover of A by diamonds J(p,q), p ≪ q, of diameter ≤ delta,
// cost omega(N) · sigma(p,q)^N per diamond.
inline CoverResult mu_n_delta(const FiniteLorentzSpace& s, const std::vector<Index>& A, double N, double delta,
                              CoverMode mode, DiameterMetric metric = DiameterMetric::Local, double tol = kTol) {
  CoverResult res;
  res.mode = mode == CoverMode::Greedy ? "greedy" : "exact";
  if (A.empty()) return res;
  if (mode == CoverMode::Exact && A.size() > 12) throw BoundExceeded("exact cover search is limited to |A| <= 12");
  const auto cands = detail::cover_candidates(s, A, N, delta, metric, tol);
  res.candidates = cands.size();


  std::vector<char> coverable(A.size(), 0);
  for (const auto& c : cands)
    for (Index h : c.hits) coverable[h] = 1;
  for (std::size_t k = 0; k < A.size(); ++k)
    if (!coverable[k])
      throw InvalidArgument("mu_n_delta: point " + (s.points.empty() ? std::to_string(A[k]) : s.points[A[k]]) +
                            " lies in no diamond of diameter <= delta");

  if (mode == CoverMode::Greedy) {
    // lazy greedy: cost per newly covered point only grows as coverage grows
    std::vector<char> covered(A.size(), 0);
    std::size_t left = A.size();
    using Item = std::tuple<double, Index, std::size_t>;  // ratio, candidate, gain at evaluation
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (Index i = 0; i < cands.size(); ++i) pq.emplace(cands[i].cost / static_cast<double>(cands[i].hits.size()), i, cands[i].hits.size());
    while (left > 0) {
      auto [ratio, i, gain] = pq.top();
      pq.pop();
      std::size_t g = 0;
      for (Index h : cands[i].hits) g += covered[h] ? 0 : 1;
      if (g == 0) continue;
      if (g != gain) {
        pq.emplace(cands[i].cost / static_cast<double>(g), i, g);
        continue;
      }
      for (Index h : cands[i].hits)
        if (!covered[h]) covered[h] = 1, --left;
      res.value += cands[i].cost;
      res.cover.diamonds.emplace_back(cands[i].p, cands[i].q);
    }
    return res;
  }

  // exact: dynamic programming over covered subsets of A
  const std::size_t full = (std::size_t{1} << A.size()) - 1;
  std::vector<std::pair<std::size_t, Index>> masks;  // cheapest candidate per coverage mask
  {
    std::vector<Index> best(full + 1, static_cast<Index>(-1));
    for (Index i = 0; i < cands.size(); ++i) {
      std::size_t m = 0;
      for (Index h : cands[i].hits) m |= std::size_t{1} << h;
      if (best[m] == static_cast<Index>(-1) || cands[i].cost < cands[best[m]].cost) best[m] = i;
    }
    for (std::size_t m = 1; m <= full; ++m)
      if (best[m] != static_cast<Index>(-1)) masks.emplace_back(m, best[m]);
  }
  std::vector<double> cost(full + 1, kInf);
  std::vector<Index> choice(full + 1, 0);
  cost[full] = 0;
  for (std::size_t m = full; m-- > 0;) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(~m & full));
    for (Index k = 0; k < masks.size(); ++k) {
      const auto [cm, ci] = masks[k];
      if (!((cm >> low) & 1U)) continue;
      const double c = cands[ci].cost + cost[m | cm];
      if (c < cost[m]) cost[m] = c, choice[m] = k;
    }
  }
  res.value = cost[0];
  for (std::size_t m = 0; m != full;) {
    const auto [cm, ci] = masks[choice[m]];
    res.cover.diamonds.emplace_back(cands[ci].p, cands[ci].q);
    m |= cm;
  }
  return res;
}

// ---------------------------------------------------------- midpoint scaling

struct MidpointResult {
  double phi = 0;
  Index b = 0;             // maximizing balanced point
  double imbalance = 0;    // |mu(J(a,b)) − mu(J(b,c))| at b
  std::size_t balanced = 0;  // candidates inside the tolerance band
};

// Phi(a,c): sup over b in J(a,c) \ {a,c} whose imbalance is within `balance_tol` of the
// smallest imbalance, of (mu(J(a,b)) + mu(J(b,c))) / mu(J(a,c)).
// balance_tol < 0 selects the smallest positive point weight in J(a,c).
inline MidpointResult phi_midpoint(const IntervalIndex& I, Index a, Index c, double balance_tol = -1) {
  if (!I.lt(a, c)) throw InvalidArgument("phi_midpoint: a must strictly precede c");
  const double total = I.measure(a, c);
  if (!(total > 0)) throw InvalidArgument("phi_midpoint: interval has zero measure");
  std::vector<Index> inner;
  for (Index v : I.members(a, c))
    if (v != a && v != c) inner.push_back(v);
  if (inner.empty()) throw InvalidArgument("phi_midpoint: interval has no interior point");
  if (balance_tol < 0) {
    balance_tol = kInf;
    for (Index v : I.members(a, c))
      if (I.mu()[v] > 0) balance_tol = std::min(balance_tol, I.mu()[v]);
    if (std::isinf(balance_tol)) balance_tol = 0;
  }
  std::vector<double> m1(inner.size()), m2(inner.size());
  double min_imb = kInf;
  for (std::size_t k = 0; k < inner.size(); ++k) {
    m1[k] = I.measure(a, inner[k]);
    m2[k] = I.measure(inner[k], c);
    min_imb = std::min(min_imb, std::abs(m1[k] - m2[k]));
  }
  const double band = std::max(min_imb, balance_tol);
  MidpointResult r;
  r.phi = -1;
  for (std::size_t k = 0; k < inner.size(); ++k) {
    const double imb = std::abs(m1[k] - m2[k]);
    if (imb > band) continue;
    ++r.balanced;
    const double v = (m1[k] + m2[k]) / total;
    if (v > r.phi) r.phi = v, r.b = inner[k], r.imbalance = imb;
  }
  return r;
}

inline MidpointResult phi_midpoint(const FinitePOM& p, Index a, Index c, double balance_tol = -1) {
  return phi_midpoint(IntervalIndex(p), a, c, balance_tol);
}

struct DmLevel {
  Index a = 0, c = 0;
  double target = 0;   // requested mu(J(a,b)) ≈ mu(J(b,c))
  double volume = 0;   // mu(J(a,c))
  std::size_t points = 0;
  double phi = 0;
  double dimension = 0;  // −log2(phi) + 1
};

struct DmEstimate {
  std::vector<DmLevel> levels;
  double estimate = 0;      // point-count weighted least-squares constant fit
  double slope = 0;         // weighted least-squares slope of dimension against log2(volume)
  double extrapolated = 0;  // linear fit evaluated at the smallest level
};

struct DmOptions {
  double shrink = 2.0;       // target volume ratio between consecutive levels
  double window = 0.1;       // relative tolerance for matching a target volume
  std::size_t max_candidates = 200;
  // Balanced-b band passed to phi_midpoint. Negative: on uniform weights (a sprinkle) the
  // counting noise of the level, sqrt(#J(a,c)) point weights; otherwise one point weight.
  // One point weight alone leaves one or two candidates on a sprinkle, and a single
  // off-axis survivor then decides phi.
  double balance_tol = -1;
};

// Nested diamonds J(a_k, c_k) around b with mu(J(a_k,b)) ≈ mu(J(b,c_k)) ≈ T_0 / shrink^k.
// Among near-target endpoints the pair with the smallest mu(J(a,c)) is used: by the
// reverse triangle inequality that is the pair best aligned with b.
inline DmEstimate dm_dimension(const IntervalIndex& I, Index b, std::size_t levels, const DmOptions& o = {}) {
  const std::size_t n = I.size();
  std::vector<std::pair<double, Index>> past, fut;
  for (Index v = 0; v < n; ++v) {
    if (I.lt(v, b)) past.emplace_back(I.measure(v, b), v);
    if (I.lt(b, v)) fut.emplace_back(I.measure(b, v), v);
  }
  if (past.empty() || fut.empty()) throw ResolutionError("dm_dimension: point has empty past or future");
  double T0 = std::min(std::max_element(past.begin(), past.end())->first,
                       std::max_element(fut.begin(), fut.end())->first);
  auto pick = [&](const std::vector<std::pair<double, Index>>& side, double T) {
    std::vector<std::pair<double, Index>> c;
    for (auto [v, i] : side) c.emplace_back(std::abs(v - T), i);
    std::sort(c.begin(), c.end());
    std::vector<Index> out;
    for (auto [d, i] : c) {
      if (!out.empty() && (d > o.window * T || out.size() >= o.max_candidates)) break;
      out.push_back(i);
    }
    return out;
  };
  DmEstimate est;
  for (std::size_t k = 0; k < levels; ++k) {
    const double T = T0 / std::pow(o.shrink, static_cast<double>(k));
    const auto ca = pick(past, T), cc = pick(fut, T);
    double best = kInf;
    Index ba = 0, bc = 0;
    for (Index a : ca)
      for (Index c : cc) {
        const double v = I.measure(a, c);
        if (v < best || (v == best && std::make_pair(a, c) < std::make_pair(ba, bc))) best = v, ba = a, bc = c;
      }
    DmLevel L;
    L.a = ba, L.c = bc, L.target = T, L.volume = best, L.points = I.count(ba, bc);
    try {
      double tol = o.balance_tol;
      if (tol < 0 && I.uniform()) tol = I.mu()[0] * std::sqrt(static_cast<double>(L.points));
      L.phi = phi_midpoint(I, ba, bc, tol).phi;
    } catch (const InvalidArgument&) {
      break;
    }
    L.dimension = -std::log2(L.phi) + 1;
    est.levels.push_back(L);
  }
  if (est.levels.empty()) throw ResolutionError("dm_dimension: no level has interior points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& L : est.levels) {
    const double wgt = static_cast<double>(L.points), x = std::log2(L.volume), y = L.dimension;
    sw += wgt, sx += wgt * x, sy += wgt * y, sxx += wgt * x * x, sxy += wgt * x * y;
  }
  est.estimate = sy / sw;
  const double var = sxx / sw - (sx / sw) * (sx / sw);
  if (est.levels.size() >= 2 && var > 1e-12) est.slope = (sxy / sw - (sx / sw) * (sy / sw)) / var;
  est.extrapolated = est.estimate + est.slope * (std::log2(est.levels.back().volume) - sx / sw);
  return est;
}

inline DmEstimate dm_dimension(const FinitePOM& p, Index b, std::size_t levels, const DmOptions& o = {}) {
  return dm_dimension(IntervalIndex(p), b, levels, o);
}

// Length of one diamond step: (mu(J(x,y)) / omega(D))^{1/D}.
inline double diamond_length(double volume, double D) { return std::pow(volume / omega(D), 1.0 / D); }

// inf over coarsenings (sub-chains with the same endpoints) of the summed diamond lengths,
// each step using the dimension at its lower point.
inline double lorentz_length(const IntervalIndex& I, const CausalChain& chain, std::span<const double> dm) {
  const auto& c = chain.idx;
  if (c.size() < 2) return 0;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (!I.lt(c[k - 1], c[k])) throw InvalidArgument("lorentz_length: chain is not causal");
  std::vector<double> best(c.size(), kInf);
  best[0] = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      best[i] = std::min(best[i], best[j] + diamond_length(I.measure(c[j], c[i]), dm[c[j]]));
  return best.back();
}

inline double lorentz_length(const FinitePOM& p, const CausalChain& chain, std::span<const double> dm) {
  return lorentz_length(IntervalIndex(p), chain, dm);
}

// sigma-hat(x,y) = longest admitted path from x to y, edges z < y with at least
// noise_floor points in J(z,y) weighted by diamond_length; antisymmetrized.
// Small intervals overstate their volume (closed counts include both endpoints) and the
// longest path collects those overstatements, so the floor trades resolution for bias:
// on 5000-point 2D sprinkles a floor of 4 gives +48% median error, 32 gives +8%.
inline FiniteLorentzSpace reconstruct_sigma(const FinitePOM& p, std::span<const double> dm, std::size_t noise_floor = 32) {
  check_pom(p);
  const std::size_t n = p.size();
  if (dm.size() != n) throw InvalidArgument("reconstruct_sigma: one dimension value per point required");
  const IntervalIndex I(p);
  // topological order: by size of the causal past
  std::vector<Index> order(n);
  std::vector<std::size_t> past(n);
  for (Index v = 0; v < n; ++v) order[v] = v, past[v] = I.geq().count_row(v);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return past[a] < past[b]; });
  std::vector<Index> rank(n);
  for (Index k = 0; k < n; ++k) rank[order[k]] = k;

  struct Edge {
    std::uint32_t from;
    float w;
  };
  std::vector<std::vector<Edge>> in(n);
  parallel_for(0, n, [&](Index y) {
    I.geq().for_each_in_row(y, [&](Index z) {
      if (z == y) return;
      if (I.count(z, y) < noise_floor) return;
      in[y].push_back({static_cast<std::uint32_t>(z), static_cast<float>(diamond_length(I.measure(z, y), dm[z]))});
    });
  });

  FiniteLorentzSpace out;
  out.points = p.points;
  out.sigma = SquareMatrix<double>(n);
  parallel_for(0, n, [&](Index x) {
    std::vector<double> dist(n, -kInf);
    dist[x] = 0;
    for (Index k = rank[x] + 1; k < n; ++k) {
      const Index y = order[k];
      if (!I.leq().test(x, y)) continue;
      double b = -kInf;
      for (const Edge& e : in[y]) {
        const double d = dist[e.from];
        if (d != -kInf) b = std::max(b, d + static_cast<double>(e.w));
      }
      dist[y] = b;
      if (b > 0) out.sigma(x, y) = b;
    }
  });
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (out.sigma(x, y) > 0) out.sigma(y, x) = -out.sigma(x, y);
  out.causal = p.leq;
  out.mu = p.mu;
  return out;
}

// max over r in {−1/2, 0, 1/2} of the distortion of C between the D_r metrics.
inline double dist_times(const Correspondence& C, const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y,
                         double tol = kTol) {
  double m = 0;
  for (double r : {-0.5, 0.0, 0.5}) m = std::max(m, distortion(C, d_r(X, r, tol).d, d_r(Y, r, tol).d));
  return m;
}

inline double dist_times(const Correspondence& C, const FinitePOM& X, const FinitePOM& Y) {
  double m = 0;
  for (double r : {-0.5, 0.0, 0.5}) m = std::max(m, distortion(C, d_r(X, r).d, d_r(Y, r).d));
  return m;
}

// ------------------------------------------------------- analytic stubs
//
// A weighted order whose intervals around b carry exact Minkowski diamond
// volumes kappa·tau^D for the nested proper times tau_k = tau0·2^{-k}:
//   chain a_0 < f_0 < a_1 < ... < f_{K-1} < b < g_{K-1} < ... < c_0,
// fillers f_k, g_k carry the half-diamond increments, and a side chain
// s_k < s'_k (incomparable to b, above f_k and below g_k) carries the remaining
// (2^D − 2)·kappa·tau_k^D of J(a_k, c_k) not in J(a_k,b) ∪ J(b,c_k).

struct AnalyticStub {
  FinitePOM pom;
  Index b = 0;
  std::vector<Index> a, c;
  std::vector<double> tau;
};

inline AnalyticStub analytic_stub(double D, std::size_t K, double tau0 = 1.0) {
  if (K == 0) throw InvalidArgument("analytic_stub: need at least one level");
  const double kappa = omega(D);
  AnalyticStub st;
  for (std::size_t k = 0; k < K; ++k) st.tau.push_back(tau0 * std::pow(0.5, static_cast<double>(k)));
  auto vol = [&](std::size_t k) { return k < K ? kappa * std::pow(st.tau[k], D) : 0.0; };
  std::vector<double> mu;
  std::vector<std::string> ids;
  auto add = [&](const std::string& id, double w) {
    mu.push_back(w);
    ids.push_back(id);
    return mu.size() - 1;
  };
  std::vector<Index> f(K), g(K), s1(K), s2(K);
  st.a.resize(K), st.c.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double half = vol(k) - vol(k + 1);
    const double side = (std::pow(2.0, D) - 2) * half;
    st.a[k] = add("a" + std::to_string(k), 0);
    f[k] = add("f" + std::to_string(k), half);
    st.c[k] = add("c" + std::to_string(k), 0);
    g[k] = add("g" + std::to_string(k), half);
    s1[k] = add("s" + std::to_string(k), side / 3);
    s2[k] = add("t" + std::to_string(k), 2 * side / 3);
  }
  st.b = add("b", 0);
  const std::size_t n = mu.size();
  BitMatrix leq(n);
  auto rel = [&](Index x, Index y) { leq.set(x, y); };
  std::vector<Index> spine;
  for (std::size_t k = 0; k < K; ++k) spine.push_back(st.a[k]), spine.push_back(f[k]);
  spine.push_back(st.b);
  for (std::size_t k = K; k-- > 0;) spine.push_back(g[k]), spine.push_back(st.c[k]);
  for (std::size_t i = 0; i < spine.size(); ++i)
    for (std::size_t j = i; j < spine.size(); ++j) rel(spine[i], spine[j]);
  for (std::size_t k = 0; k < K; ++k) {
    rel(s1[k], s2[k]);
    // below the side chain: a_0..a_k and f_0..f_k; above: c_0..c_k and g_0..g_k
    for (std::size_t i = 0; i <= k; ++i)
      for (Index s : {s1[k], s2[k]}) rel(st.a[i], s), rel(s, st.c[i]), rel(f[i], s), rel(s, g[i]);
  }
  for (Index v = 0; v < n; ++v) leq.set(v, v);
  transitive_closure_inplace(leq);
  st.pom = {ids, std::move(leq), std::move(mu)};
  return st;
}

}  // namespace lorgh
